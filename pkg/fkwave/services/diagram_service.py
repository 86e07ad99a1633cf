import logging
from pathlib import Path

from pydantic import BaseModel, ConfigDict

from fkwave.repo.results_repo import write_diagram, write_profile, write_trace
from fkwave.plotting.svg import diagram_svg, trace_svg, write_svg
from fkwave.schemas.analysis import Diagram, DiagramPoint
from fkwave.schemas.nonlinearity import NonlinearitySpec
from fkwave.schemas.run import RunConfig
from fkwave.solver.analysis import critical_velocities, forcing_grid, run_wave, sweep_diagram
from fkwave.solver.nonlinearity import sigma_bounds

logger = logging.getLogger(__name__)


class WaveOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    point: DiagramPoint
    profile_csv: Path
    trace_csv: Path


class DiagramService:
    """
    Velocity diagram and single-wave runs for one operator, written to the
    run's output directory.
    """

    def __init__(self, spec: NonlinearitySpec, config: RunConfig):
        self.spec = spec
        self.config = config
        self.wave_config = config.wave_config()

    def run_diagram(self) -> Diagram:
        cfg = self.config
        logger.info(f"Starting velocity diagram for {self.spec.label}")

        logger.info("Step 1: Critical forcing")
        bounds = sigma_bounds(self.spec)
        logger.info(f"sigma- = {bounds[0]:.12g}, sigma+ = {bounds[1]:.12g}")

        logger.info("Step 2: Sweep")
        grid = forcing_grid(self.spec, cfg.points, cfg.margin, cfg.sigma_lo, cfg.sigma_hi)
        diagram = sweep_diagram(self.spec, grid, self.wave_config, jobs=cfg.jobs)
        if diagram.plateau is not None:
            logger.info(f"Pinned plateau [{diagram.plateau[0]:.6g}, {diagram.plateau[1]:.6g}]")

        logger.info("Step 3: Critical velocities")
        critical = critical_velocities(self.spec, self.wave_config, jobs=cfg.jobs)
        diagram = diagram.model_copy(update={"critical": critical})
        logger.info(
            f"c- = {diagram.c_minus:.6g}, c+ = {diagram.c_plus:.6g}, "
            f"gap {critical.gap:.3g} +/- {critical.gap_uncertainty:.2g}"
        )

        logger.info("Step 4: Writing results")
        write_diagram(diagram, cfg.out / "diagram.csv")
        write_svg(diagram_svg(diagram, bounds, title=self.spec.label), cfg.out / "diagram.svg")
        return diagram

    def run_wave(self, sigma: float, c_hint: float | None = None) -> WaveOutcome:
        """
        One front at sigma. A velocity hint that would carry the front out of
        the window within T switches recentring on from the start.
        """
        logger.info(f"Evolving a front for {self.spec.label} at sigma={sigma:g}")
        config = self.wave_config
        reach = config.grid.half_width - 2.0 * self.spec.r_star
        if c_hint is not None and abs(c_hint) * config.evolution.T > reach:
            evolution = config.evolution.model_copy(update={"recenter": True})
            config = config.model_copy(update={"evolution": evolution})
        point, profile, trace = run_wave(self.spec, sigma, config)
        out = self.config.out
        profile_csv = write_profile(profile, out / "profile.csv")
        trace_csv = write_trace(trace, out / "trace.csv")
        write_svg(trace_svg(trace, title=f"{self.spec.label}, sigma={sigma:g}"), out / "trace.svg")
        return WaveOutcome(point=point, profile_csv=profile_csv, trace_csv=trace_csv)
