"""
Hull functions and their effective velocity.

For p > 0 the periodic relaxation of v(z) = z + psi(z), psi 1-periodic, under
v_t = F((v(. + p r_i))_i) + sigma drifts at the rate lambda_p(sigma). The
drift is read from the spatial mean of v, which stays meaningful when the
stationary hull profile is discontinuous.
"""

import logging
import math
from functools import partial

import numpy as np
from scipy.stats import linregress

from fkwave.config import HULL_DT_CAP
from fkwave.core.errors import InputError, NumericError
from fkwave.schemas.hull import BranchRow, BranchSide, HullConfig, HullResult, HullState
from fkwave.schemas.nonlinearity import NonlinearitySpec
from fkwave.services.worker_pool import WorkerPool
from fkwave.solver.evolution import build_stencil, resolve_dt
from fkwave.solver.nonlinearity import eval_F, lipschitz_data, sigma_bounds

logger = logging.getLogger(__name__)

SAMPLES_PER_CHUNK = 100
MAX_BRACKET_EXPANSIONS = 8


def hull_bound(spec: NonlinearitySpec, p: float) -> float:
    """K (1 + p) with K = F_sup, a bound on |lambda_p - sigma|."""
    return lipschitz_data(spec).F_sup * (1.0 + p)


def relax_hull(
    spec: NonlinearitySpec,
    p: float,
    sigma: float,
    config: HullConfig = HullConfig(),
) -> tuple[HullResult, HullState]:
    if p <= 0:
        raise InputError(f"p must be positive, got {p}")
    M = config.M
    stencil = build_stencil(spec, 1.0 / M, scale=p)
    dt = resolve_dt(stencil, config.dt, cap=HULL_DT_CAP)

    j = np.arange(M)
    reads = []
    for k, t in zip(stencil.k, stencil.t):
        q = j + k
        reads.append((q % M, q / M, (q + 1) % M, (q + 1) / M, t))

    psi = np.zeros(M)
    drift = 0.0
    X = np.empty((spec.n_args, M))

    n_chunk = max(1, round(config.chunk_T / dt))
    every = max(1, n_chunk // SAMPLES_PER_CHUNK)
    times, means = [0.0], [0.0]
    estimate, previous = math.nan, math.nan
    residual = math.nan
    converged = False
    step_count = 0

    for chunk in range(config.max_chunks):
        for _ in range(n_chunk):
            for i, (i0, o0, i1, o1, t) in enumerate(reads):
                lo = psi[i0] + o0
                X[i] = lo if t == 0.0 else (1.0 - t) * lo + t * (psi[i1] + o1)
            psi += dt * (eval_F(spec, X) + sigma)
            step_count += 1
            if step_count % every == 0:
                # whole-integer recentring keeps F's arguments bounded without changing the dynamics
                whole = math.floor(np.mean(psi))
                if whole:
                    psi -= whole
                    drift += whole
                times.append(step_count * dt)
                means.append(float(np.mean(psi)) + drift)

        if chunk == 0:
            continue
        half = len(times) // 2
        t_fit, m_fit = np.asarray(times[half:]), np.asarray(means[half:])
        if np.ptp(m_fit) == 0.0:
            estimate, residual = 0.0, 0.0
        else:
            fit = linregress(t_fit, m_fit)
            estimate = float(fit.slope)
            residual = float(np.sqrt(np.mean((m_fit - fit.intercept - fit.slope * t_fit) ** 2)))
        if abs(estimate - previous) < config.tol_lambda:
            converged = True
            break
        previous = estimate

    if not converged:
        logger.warning(
            f"hull relaxation p={p:g} sigma={sigma:g} not converged after "
            f"{config.max_chunks} chunks (lambda ~ {estimate:.6g})"
        )

    state = HullState(p=p, sigma=sigma, psi=psi, drift=drift)
    result = HullResult(
        p=p,
        sigma=sigma,
        lambda_p=estimate,
        fit_residual=residual,
        converged=converged,
        amplitude=state.amplitude,
    )
    return result, state


def solve_hull(
    spec: NonlinearitySpec,
    p: float,
    sigma: float,
    config: HullConfig = HullConfig(),
) -> HullResult:
    """Effective velocity lambda_p(sigma) from the long-time mean drift."""
    return relax_hull(spec, p, sigma, config)[0]


def invert_hull(
    spec: NonlinearitySpec,
    p: float,
    c: float,
    config: HullConfig = HullConfig(),
) -> tuple[float, float]:
    """
    Bracket [sigma_lo, sigma_hi] with lambda_p(sigma_lo) <= c p <= lambda_p(sigma_hi).

    A bisection on the crossing of c p gives a bracket of width tol_sigma. When
    lambda_p stays within tol_lambda of c p for tol_sigma beyond either end,
    lambda_p is flat there and two more bisections locate where it leaves
    (c p - tol, c p + tol), so the bracket spans the plateau.
    """
    if p <= 0:
        raise InputError(f"p must be positive, got {p}")
    target = c * p
    tol = config.tol_lambda
    cache: dict[float, float] = {}

    def lam(sigma: float) -> float:
        if sigma not in cache:
            cache[sigma] = solve_hull(spec, p, sigma, config).lambda_p
        return cache[sigma]

    bound = hull_bound(spec, p)
    lo, hi = target - bound, target + bound
    for _ in range(MAX_BRACKET_EXPANSIONS):
        if lam(lo) <= target and lam(hi) >= target:
            break
        if lam(lo) > target:
            lo -= bound
        if lam(hi) < target:
            hi += bound
    else:
        raise NumericError(f"could not bracket lambda_p = {target:g}", bracket=(lo, hi))

    def boundary(below) -> tuple[float, float]:
        # a: largest cached sigma with below(lambda) true, b: smallest with it false
        a = max((s for s, v in cache.items() if below(v)), default=lo)
        b = min((s for s, v in cache.items() if not below(v) and s > a), default=hi)
        while b - a > 0.5 * config.tol_sigma:
            mid = 0.5 * (a + b)
            if below(lam(mid)):
                a = mid
            else:
                b = mid
        return a, b

    sigma_lo, sigma_hi = boundary(lambda v: v < target)
    width = config.tol_sigma
    if lam(sigma_lo - width) >= target - tol or lam(sigma_hi + width) <= target + tol:
        sigma_lo, _ = boundary(lambda v: v < target - tol)
        _, sigma_hi = boundary(lambda v: v <= target + tol)
    logger.debug(
        f"invert_hull p={p:g} c={c:g}: [{sigma_lo:.6g}, {sigma_hi:.6g}] after {len(cache)} solves"
    )
    return sigma_lo, sigma_hi


def _branch_row(p: float, spec: NonlinearitySpec, c: float, edge: float, config: HullConfig) -> BranchRow:
    lo, hi = invert_hull(spec, p, c, config)
    mid = 0.5 * (lo + hi)
    return BranchRow(p=p, sigma_lo=lo, sigma_hi=hi, sigma_mid=mid, gap=abs(mid - edge))


def trace_branch(
    spec: NonlinearitySpec,
    c: float,
    p_sequence: list[float],
    side: BranchSide = "plus",
    config: HullConfig = HullConfig(),
    jobs: int = 1,
) -> list[BranchRow]:
    """
    sigma(c, p) along a decreasing sequence p -> 0 and its gap to sigma+
    (side="plus") or sigma- (side="minus").
    """
    if not p_sequence or any(p <= 0 for p in p_sequence):
        raise InputError("p sequence must be non-empty and positive")
    if any(b >= a for a, b in zip(p_sequence, p_sequence[1:])):
        raise InputError(f"p sequence must be strictly decreasing, got {p_sequence}")

    sigma_minus, sigma_plus = sigma_bounds(spec)
    edge = sigma_plus if side == "plus" else sigma_minus
    logger.info(f"Vertical branch c={c:g} side={side} edge sigma={edge:g} p={p_sequence}")
    worker = partial(_branch_row, spec=spec, c=c, edge=edge, config=config)
    return WorkerPool(jobs).map(worker, p_sequence)
