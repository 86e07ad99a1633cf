import logging
import re
from functools import partial

from fkwave.core.errors import InputError, NumericError
from fkwave.repo.results_repo import write_branch, write_hull
from fkwave.schemas.hull import BranchRow, BranchSide, HullResult
from fkwave.schemas.nonlinearity import NonlinearitySpec
from fkwave.schemas.run import RunConfig
from fkwave.services.worker_pool import WorkerPool
from fkwave.solver.analysis import critical_velocities
from fkwave.solver.hull import trace_branch, solve_hull

logger = logging.getLogger(__name__)

_AUTO = re.compile(r"^auto(?P<offset>[+-]\d+(\.\d*)?([eE][+-]?\d+)?)?$")


def _hull_job(job: tuple[float, float], spec: NonlinearitySpec, config) -> HullResult:
    p, sigma = job
    return solve_hull(spec, p, sigma, config)


class HullService:
    """Effective velocities lambda_p and the vertical branch."""

    def __init__(self, spec: NonlinearitySpec, config: RunConfig):
        self.spec = spec
        self.config = config
        self.hull_config = config.hull_config()

    def run_hull(self, ps: list[float], sigmas: list[float]) -> list[HullResult]:
        jobs = [(p, s) for p in ps for s in sigmas]
        logger.info(f"Relaxing {len(jobs)} hull functions for {self.spec.label}")
        pool = WorkerPool(self.config.jobs)
        results = pool.map(partial(_hull_job, spec=self.spec, config=self.hull_config), jobs)
        write_hull(results, self.config.out / "hull.csv")
        stalled = [r for r in results if not r.converged]
        if stalled:
            worst = stalled[0]
            raise NumericError(
                f"{len(stalled)} hull relaxations did not converge "
                f"(first: p={worst.p:g}, sigma={worst.sigma:g})"
            )
        return results

    def resolve_velocity(self, c: str, side: BranchSide) -> float:
        """A number, or auto[+-offset] relative to the critical velocity on `side`."""
        try:
            return float(c)
        except ValueError:
            pass
        match = _AUTO.match(c.strip())
        if match is None:
            raise InputError(f"--c must be a number or auto[+-offset], got {c!r}")
        logger.info("Step 1: Critical velocity for --c auto")
        crit = critical_velocities(self.spec, self.config.wave_config(), jobs=self.config.jobs)
        base = crit.c_plus.estimate if side == "plus" else crit.c_minus.estimate
        offset = float(match.group("offset") or 0.0)
        logger.info(f"c{'+' if side == 'plus' else '-'} ~ {base:.6g}, probing c = {base + offset:.6g}")
        return base + offset

    def run_branch(self, c: str, ps: list[float], side: BranchSide) -> list[BranchRow]:
        velocity = self.resolve_velocity(c, side)
        logger.info("Step 2: Vertical branch")
        rows = trace_branch(self.spec, velocity, ps, side=side, config=self.hull_config, jobs=self.config.jobs)
        write_branch(rows, self.config.out / "branch.csv")
        return rows

