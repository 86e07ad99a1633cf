"""
The velocity diagram c(sigma), critical velocities and the verifiers built on it.

The velocity of the front at a given forcing is measured by direct lattice
evolution; everything else is assembled from those measurements and from
closed-form constants of the operator.
"""

import logging
import math
from functools import partial

import numpy as np
from scipy.integrate import solve_ivp

from fkwave.config import (
    CRITICAL_DELTA_FRACTION,
    CRITICAL_LEVELS,
    DEFAULT_WINDOW_FRACTION,
    TOL_MONOTONE_DIAGRAM,
    TOL_SUPER,
)
from fkwave.core.errors import (
    DomainError,
    DomainExhaustedError,
    FKWaveError,
    NumericError,
    PreconditionError,
    UnsupportedSpecError,
)
from fkwave.schemas.analysis import (
    CriticalEstimate,
    CriticalVelocities,
    Diagram,
    DiagramPoint,
    SlopeBoundReport,
    SlopeViolation,
    SupersolutionReport,
    VelocityComparison,
    WaveConfig,
)
from fkwave.schemas.evolution import GridProfile
from fkwave.schemas.fronts import FrontTrace
from fkwave.schemas.nonlinearity import NonlinearitySpec
from fkwave.services.worker_pool import WorkerPool
from fkwave.solver.evolution import evolve, initial_front
from fkwave.solver.fronts import estimate_velocity, level_for, max_jump
from fkwave.solver.nonlinearity import (
    argmin_f,
    equilibria,
    eval_F,
    eval_f,
    lipschitz_data,
    sigma_bounds,
)

logger = logging.getLogger(__name__)

# Half-width of the window on which the supersolution ODE is resolved
SUPER_HALF_WIDTH = 40.0
SUPER_GRID_POINTS = 8001
# sigma+ of a normalized spec must vanish to this accuracy
NORMALIZED_TOL = 1e-9
# rounding room for a_epsilon = 1 + M / M
A_EPSILON_SLACK = 1e-12


# ----------------- Single velocity -----------------


def run_wave(
    spec: NonlinearitySpec,
    sigma: float,
    config: WaveConfig = WaveConfig(),
) -> tuple[DiagramPoint, GridProfile, FrontTrace]:
    """
    Evolve a monotone front at forcing sigma and measure its velocity.
    A run that exhausts the fixed window is repeated once with recentring.
    """
    sigma_minus, sigma_plus = sigma_bounds(spec)
    if not (sigma_minus < sigma < sigma_plus):
        raise DomainError(
            f"sigma={sigma:g} outside (sigma-, sigma+) = ({sigma_minus:g}, {sigma_plus:g}): "
            "there are no monotone traveling wave solutions for sigma outside [sigma-, sigma+]"
        )
    pair = equilibria(spec, sigma)
    u0 = initial_front(pair, config.grid, config.initial)
    level = level_for(pair)

    try:
        profile, trace = evolve(u0, spec, sigma, config.evolution, level=level)
    except DomainExhaustedError as e:
        if config.evolution.recenter:
            raise
        logger.info(f"sigma={sigma:g}: {e}; rerunning with recentring")
        recentred = config.evolution.model_copy(update={"recenter": True})
        profile, trace = evolve(u0, spec, sigma, recentred, level=level)

    est = estimate_velocity(
        trace,
        window_fraction=config.window_fraction,
        c_tol=config.c_tol,
        disp_tol=config.grid.h,
    )
    point = DiagramPoint(
        sigma=sigma,
        c=est.c,
        stderr=est.stderr,
        pinned=est.pinned,
        m_sigma=pair.m_sigma,
        b_sigma=pair.b_sigma,
        displacement=est.displacement,
        max_jump=max_jump(profile),
    )
    return point, profile, trace


def velocity_at(
    spec: NonlinearitySpec,
    sigma: float,
    config: WaveConfig = WaveConfig(),
) -> DiagramPoint:
    return run_wave(spec, sigma, config)[0]


def _diagram_row(sigma: float, spec: NonlinearitySpec, config: WaveConfig) -> DiagramPoint:
    try:
        return velocity_at(spec, sigma, config)
    except FKWaveError as e:
        logger.warning(f"sigma={sigma:g} failed: {e}")
        nan = math.nan
        return DiagramPoint(
            sigma=sigma,
            c=nan,
            stderr=nan,
            pinned=False,
            m_sigma=nan,
            b_sigma=nan,
            displacement=nan,
            max_jump=nan,
            failed=True,
            error=str(e),
        )


# ----------------- Diagram -----------------


def forcing_grid(
    spec: NonlinearitySpec,
    points: int,
    margin: float = 0.025,
    lo: float | None = None,
    hi: float | None = None,
) -> list[float]:
    """
    `points` equispaced forcings. Without explicit endpoints the grid stops a
    fraction `margin` of sigma+ - sigma- short of each end.
    """
    if points < 2:
        raise DomainError(f"a sweep needs at least two points, got {points}")
    sigma_minus, sigma_plus = sigma_bounds(spec)
    width = sigma_plus - sigma_minus
    lo = sigma_minus + margin * width if lo is None else lo
    hi = sigma_plus - margin * width if hi is None else hi
    return [float(s) for s in np.linspace(lo, hi, points)]


def _longest_pinned_run(points: list[DiagramPoint]) -> tuple[float, float] | None:
    best, start, best_len = None, None, 0
    for k, p in enumerate(points + [None]):
        if p is not None and p.pinned and not p.failed:
            if start is None:
                start = k
            continue
        if start is not None and k - start > best_len:
            best_len = k - start
            best = (points[start].sigma, points[k - 1].sigma)
        start = None
    return best


def mono_constant(spec: NonlinearitySpec, sigmas: list[float]) -> float:
    """K = 1 / (F_sup + max |sigma|), which bounds |F + sigma| by 1/K."""
    return 1.0 / (lipschitz_data(spec).F_sup + max(abs(s) for s in sigmas))


def sweep_diagram(
    spec: NonlinearitySpec,
    sigma_grid: list[float],
    config: WaveConfig = WaveConfig(),
    jobs: int = 1,
) -> Diagram:
    """
    Velocity at every grid forcing. Rows that fail are marked, the sweep goes
    on; the plateau is the longest contiguous run of pinned rows.
    """
    sigmas = sorted(float(s) for s in sigma_grid)
    sigma_minus, sigma_plus = sigma_bounds(spec)
    outside = [s for s in sigmas if not (sigma_minus < s < sigma_plus)]
    if outside:
        raise DomainError(
            f"sweep grid leaves (sigma-, sigma+) = ({sigma_minus:g}, {sigma_plus:g}) at {outside}"
        )

    points = WorkerPool(jobs).map(partial(_diagram_row, spec=spec, config=config), sigmas)
    failed = sum(p.failed for p in points)
    if failed:
        logger.warning(f"{failed} of {len(points)} diagram rows failed")

    diagram = Diagram(
        points=points,
        plateau=_longest_pinned_run(points),
        K_mono=mono_constant(spec, sigmas),
    )
    drops = diagram_violations(diagram)
    if drops:
        logger.warning(f"c decreases by more than {TOL_MONOTONE_DIAGRAM:g} at sigma={drops}")
    return diagram


def diagram_violations(diagram: Diagram, tol: float = TOL_MONOTONE_DIAGRAM) -> list[float]:
    """Forcings where c drops below its left neighbour by more than tol."""
    rows = diagram.valid_points
    return [b.sigma for a, b in zip(rows, rows[1:]) if b.c < a.c - tol]


def reflection_gaps(diagram: Diagram, reflected: Diagram) -> list[tuple[float, float]]:
    """
    (sigma, |c(sigma) + c^(-sigma)|) for the forcings present in both diagrams,
    where c^ is the velocity of the reflected operator. A diagram compared with
    itself measures odd symmetry.
    """
    mirror = {round(-p.sigma, 12): p.c for p in reflected.valid_points}
    return [
        (p.sigma, abs(p.c + mirror[round(p.sigma, 12)]))
        for p in diagram.valid_points
        if round(p.sigma, 12) in mirror
    ]


# ----------------- Critical velocities -----------------


def _critical_side(side: str, rows: list[DiagramPoint]) -> CriticalEstimate:
    rows = [r for r in rows if not r.failed]
    if len(rows) < 2:
        raise NumericError(f"fewer than two usable velocities toward sigma{'+' if side == 'plus' else '-'}")
    values = [r.c for r in rows]
    errs = [r.stderr for r in rows]
    last, prev = values[-1], values[-2]
    step = abs(last - prev)
    # toward sigma+ the sequence increases, toward sigma- it decreases
    direction = 1.0 if side == "plus" else -1.0
    monotone = all(
        direction * (b - a) >= -2.0 * (ea + eb)
        for a, b, ea, eb in zip(values, values[1:], errs, errs[1:])
    )
    if side == "plus":
        bracket = (min(values), last + step)
    else:
        bracket = (last - step, max(values))
    if not monotone:
        logger.warning(f"refinement toward sigma {side} is not monotone: {values}")
    return CriticalEstimate(
        side=side,
        sigmas=tuple(r.sigma for r in rows),
        values=tuple(values),
        stderrs=tuple(errs),
        estimate=last,
        bracket=bracket,
        monotone=monotone,
    )


def critical_velocities(
    spec: NonlinearitySpec,
    config: WaveConfig = WaveConfig(),
    levels: int = CRITICAL_LEVELS,
    jobs: int = 1,
) -> CriticalVelocities:
    """
    c(sigma+/- -/+ delta_k) for delta_k = delta_0 2^-k, delta_0 a tenth of
    sigma+ - sigma-. The last value estimates c+/-, the sequence brackets it.
    """
    sigma_minus, sigma_plus = sigma_bounds(spec)
    delta0 = CRITICAL_DELTA_FRACTION * (sigma_plus - sigma_minus)
    deltas = [delta0 * 2.0**-k for k in range(levels)]
    plus = [sigma_plus - d for d in deltas]
    minus = [sigma_minus + d for d in deltas]

    rows = WorkerPool(jobs).map(partial(_diagram_row, spec=spec, config=config), plus + minus)
    c_plus = _critical_side("plus", rows[:levels])
    c_minus = _critical_side("minus", rows[levels:])

    uncertainty = (
        (c_plus.bracket[1] - c_plus.bracket[0])
        + (c_minus.bracket[1] - c_minus.bracket[0])
        + c_plus.stderrs[-1]
        + c_minus.stderrs[-1]
    )
    return CriticalVelocities(
        c_minus=c_minus,
        c_plus=c_plus,
        gap=c_plus.estimate - c_minus.estimate,
        gap_uncertainty=uncertainty,
    )


# ----------------- Verifiers -----------------


def check_slope_bound(diagram: Diagram) -> SlopeBoundReport:
    """
    Forward differences against dc/dsigma >= K |c| on consecutive unpinned
    rows, with a 3 stderr / dsigma allowance for the fit noise.
    """
    rows = diagram.valid_points
    pairs = [(a, b) for a, b in zip(rows, rows[1:]) if not a.pinned and not b.pinned]
    if len(pairs) < 4:
        raise PreconditionError(
            f"slope bound needs at least 5 consecutive unpinned rows, found {len(pairs) + 1 if pairs else 0}"
        )
    K = diagram.K_mono
    violations = []
    for a, b in pairs:
        ds = b.sigma - a.sigma
        slope = (b.c - a.c) / ds
        required = K * min(abs(a.c), abs(b.c)) - 3.0 * (a.stderr + b.stderr) / ds
        if slope < required:
            violations.append(
                SlopeViolation(sigma_lo=a.sigma, sigma_hi=b.sigma, slope=slope, required=required)
            )
    return SlopeBoundReport(K_mono=K, checked=len(pairs), violations=violations)


def integral_identity(
    trace: FrontTrace,
    profile: GridProfile,
    spec: NonlinearitySpec,
    window_fraction: float = DEFAULT_WINDOW_FRACTION,
) -> float:
    """
    Residual of c (R - L) = (sum a_i r_i)(R - L) + int (f(u) + sigma) over the
    trailing fit window, for a zero-sum affine part.

    With A(t) the source integral accumulated by `evolve`, the identity says
    D(t) = (R - L) xi(t) - A(t) - (sum a_i r_i)(R - L) t stays bounded. The
    residual is the spread of D over the window divided by its length: a front
    running at c + delta against the source spreads D by delta (R - L) per
    unit time.
    """
    a = spec.affine
    if abs(sum(a)) > 1e-12:
        raise UnsupportedSpecError(
            f"integral identity needs sum a_i = 0, got {sum(a):g} for {spec.label}"
        )
    if trace.source is None:
        raise PreconditionError("trace carries no source integral")
    n_window = math.ceil(window_fraction * len(trace))
    if n_window < 2:
        raise PreconditionError(f"{n_window} samples in the identity window, at least 2 needed")

    jump = profile.right_limit - profile.left_limit
    drift = sum(ai * r for ai, r in zip(a, spec.shifts))
    t = trace.t[-n_window:]
    balance = jump * trace.xi[-n_window:] - trace.source[-n_window:] - drift * jump * t
    return float(np.ptp(balance) / (t[-1] - t[0]))


def normalize_to_sigma_plus(spec: NonlinearitySpec) -> NonlinearitySpec:
    """
    Absorb sigma+ into the operator so that f >= 0 with f(0) = f(1) = 0.
    When the minimum of f is not at 0 the state is translated onto it.
    """
    _, sigma_plus = sigma_bounds(spec)
    x_min = argmin_f(spec)
    x_min -= round(x_min)
    update = {"offset": spec.offset + sigma_plus}
    if abs(x_min) > 1e-6:
        update["state_shift"] = spec.state_shift + spec.orientation * x_min
    normalized = spec.model_copy(update=update)
    logger.debug(f"normalized {spec.label}: sigma+={sigma_plus:.12g}, shift={x_min:.3g}")
    return normalized


def _profile_ode(spec: NonlinearitySpec, span: float):
    """h' = f(h), h(0) = theta, integrated to both sides of 0."""

    def rhs(_, h):
        return [float(eval_f(spec, h[0]))]

    opts = dict(method="DOP853", rtol=1e-12, atol=1e-14, dense_output=True)
    forward = solve_ivp(rhs, (0.0, span), [spec.theta], **opts)
    backward = solve_ivp(rhs, (0.0, -span), [spec.theta], **opts)
    if not (forward.success and backward.success):
        raise NumericError(f"profile ODE failed: {forward.message or backward.message}")

    def h0(y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        out = np.empty_like(y)
        right = y >= 0.0
        out[right] = forward.sol(y[right])[0]
        out[~right] = backward.sol(y[~right])[0]
        return out

    return h0


def verify_supersolution(
    spec: NonlinearitySpec,
    epsilon: float,
    M: float | None = None,
    shrink_epsilon: bool = False,
) -> SupersolutionReport:
    """
    Check the supersolution built from h0' = f(h0), h0(0) = theta, at the
    velocity c = 1/epsilon: phi(x) = h0(a x epsilon) with a = 1 + M epsilon.

    mu = (1 + K max_i g(epsilon a r_i)) / a with g(b) = |b| exp(f'_sup |b|)
    and K the sum of the neighbour Lipschitz bounds; the certificate holds when
    mu <= 1 and c phi' - F(phi(. + r_i)) >= -tol on the grid.

    a_epsilon must not exceed 2. With shrink_epsilon an epsilon that breaks this
    is replaced by 1/M; the report carries the epsilon actually used.
    """
    _, sigma_plus = sigma_bounds(spec)
    if abs(sigma_plus) > NORMALIZED_TOL:
        raise PreconditionError(
            f"spec is not normalized (sigma+ = {sigma_plus:.3g}); apply normalize_to_sigma_plus"
        )
    if not (0.0 < epsilon <= 1.0):
        raise PreconditionError(f"epsilon must lie in (0, 1], got {epsilon:g}")

    lip = lipschitz_data(spec)
    K = lip.neighbour_sum
    r_star = spec.r_star
    M_threshold = K * 2.0 * r_star * math.exp(2.0 * r_star * lip.f_prime_sup)
    M = M_threshold if M is None else M
    if shrink_epsilon and M * epsilon > 1.0:
        logger.info(f"epsilon={epsilon:g} gives a_epsilon > 2 for M={M:.6g}, using epsilon=1/M")
        epsilon = 1.0 / M
    a = 1.0 + M * epsilon
    if a > 2.0 + A_EPSILON_SLACK:
        raise PreconditionError(f"a_epsilon = 1 + M epsilon = {a:g} exceeds 2")

    def g(b: float) -> float:
        return abs(b) * math.exp(lip.f_prime_sup * abs(b))

    neighbours = [r for r in spec.shifts if r != 0.0]
    mu = (1.0 + K * max((g(epsilon * a * r) for r in neighbours), default=0.0)) / a

    reach = epsilon * a * r_star
    h0 = _profile_ode(spec, SUPER_HALF_WIDTH + reach + 1.0)
    y = np.linspace(-SUPER_HALF_WIDTH, SUPER_HALF_WIDTH, SUPER_GRID_POINTS)
    X = np.stack([h0(y + epsilon * a * r) for r in spec.shifts])
    residual = a * eval_f(spec, h0(y)) - eval_F(spec, X)
    min_residual = float(np.min(residual))

    passed = mu <= 1.0 and min_residual >= -TOL_SUPER
    logger.info(
        f"supersolution {spec.label} eps={epsilon:g}: M={M:.6g} (threshold {M_threshold:.6g}) "
        f"mu={mu:.6g} min residual={min_residual:.3e} -> {'pass' if passed else 'fail'}"
    )
    return SupersolutionReport(
        spec_id=spec.label,
        epsilon=epsilon,
        M=M,
        M_threshold=M_threshold,
        K=K,
        a_epsilon=a,
        mu_epsilon=mu,
        grid_min_residual=min_residual,
        passed=passed,
    )


def compare_velocities(
    spec: NonlinearitySpec,
    sigma_1: float,
    sigma_2: float,
    config: WaveConfig = WaveConfig(),
) -> VelocityComparison:
    """sigma_1 <= sigma_2 must give c(sigma_1) <= c(sigma_2) up to the fit noise."""
    if sigma_1 > sigma_2:
        sigma_1, sigma_2 = sigma_2, sigma_1
    p1 = velocity_at(spec, sigma_1, config)
    p2 = velocity_at(spec, sigma_2, config)
    tol = max(3.0 * (p1.stderr + p2.stderr), TOL_MONOTONE_DIAGRAM)
    return VelocityComparison(
        sigma_1=sigma_1,
        sigma_2=sigma_2,
        c_1=p1.c,
        c_2=p2.c,
        tolerance=tol,
        holds=p1.c <= p2.c + tol,
    )
