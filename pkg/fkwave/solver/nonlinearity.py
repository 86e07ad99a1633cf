"""
The nonlinear operator F: evaluation, validation of the structural
assumptions, critical forcing values, equilibria, Lipschitz data and the
reflection conjugacy.

All functions are pure; a validated NonlinearitySpec can be shared freely
between worker processes.
"""

import logging
import math
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.interpolate import CubicSpline
from scipy.optimize import bisect, minimize_scalar

from fkwave.config import (
    GOLDEN_TOL,
    LIPSCHITZ_SAFETY,
    SCAN_POINTS,
    TOL_MONO,
    TOL_ROOT,
    VALIDATION_SAMPLES,
)
from fkwave.core.errors import AxiomViolation, DomainError, InputError, NumericError
from fkwave.schemas.nonlinearity import (
    EquilibriumPair,
    LipschitzData,
    LocalFunction,
    NonlinearitySpec,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

# Tolerance on sigma when deciding whether it lies in [sigma-, sigma+]
SIGMA_EDGE_TOL = 1e-9
PERIODICITY_TOL = 1e-9


def fk_spec(beta: float) -> NonlinearitySpec:
    """The classical overdamped Frenkel-Kontorova operator with f(x) = -beta cos(2 pi x)."""
    return NonlinearitySpec(kind="fk", beta=beta, shifts=(0.0, 1.0, -1.0), theta=0.5)


# ----------------- Local function -----------------


@lru_cache(maxsize=64)
def _table_spline(table: tuple[float, ...]) -> CubicSpline:
    n = len(table)
    nodes = np.arange(n + 1) / n
    values = np.append(np.asarray(table, dtype=float), table[0])
    return CubicSpline(nodes, values, bc_type="periodic")


def _local(lf: LocalFunction, x: NDArray, derivative: bool = False) -> NDArray:
    if lf.harmonics is not None:
        hm = lf.harmonics
        out = np.zeros_like(x) if derivative else np.full_like(x, hm.constant)
        for k, a in enumerate(hm.cos, start=1):
            if derivative:
                out = out - a * TWO_PI * k * np.sin(TWO_PI * k * x)
            else:
                out = out + a * np.cos(TWO_PI * k * x)
        for k, b in enumerate(hm.sin, start=1):
            if derivative:
                out = out + b * TWO_PI * k * np.cos(TWO_PI * k * x)
            else:
                out = out + b * np.sin(TWO_PI * k * x)
        return out
    spline = _table_spline(lf.table)
    return spline(np.mod(x, 1.0), 1 if derivative else 0)


def _local_bounds(lf: LocalFunction) -> tuple[float, float]:
    """(sup |g|, sup |g'|) over a period."""
    if lf.harmonics is not None:
        hm = lf.harmonics
        g_sup = abs(hm.constant) + sum(abs(a) for a in hm.cos) + sum(abs(b) for b in hm.sin)
        d_sup = sum(TWO_PI * k * abs(a) for k, a in enumerate(hm.cos, start=1)) + sum(
            TWO_PI * k * abs(b) for k, b in enumerate(hm.sin, start=1)
        )
        return g_sup, d_sup
    x = np.arange(SCAN_POINTS) / SCAN_POINTS
    g_sup = float(np.max(np.abs(_local(lf, x)))) * LIPSCHITZ_SAFETY
    d_sup = float(np.max(np.abs(_local(lf, x, derivative=True)))) * LIPSCHITZ_SAFETY
    return g_sup, d_sup


# ----------------- Evaluation -----------------


def eval_F(spec: NonlinearitySpec, X: ArrayLike) -> NDArray | float:
    """
    F(X_0, ..., X_N) without sigma. X has the arguments on its first axis, so a
    stack of shape (N+1, n) evaluates n neighbourhoods at once.
    """
    X = np.asarray(X, dtype=float)
    if X.shape[0] != spec.n_args:
        raise InputError(f"F takes {spec.n_args} arguments, got {X.shape[0]}")
    s = spec.orientation
    Y = s * X + spec.state_shift if (s != 1 or spec.state_shift != 0.0) else X
    linear = sum(a * Y[i] for i, a in enumerate(spec.affine) if a != 0.0)
    value = s * (linear + _local(spec.local_function, Y[0])) + spec.offset
    return float(value) if np.ndim(value) == 0 else value


def eval_f(spec: NonlinearitySpec, v: ArrayLike) -> NDArray | float:
    """Diagonal f(v) = F(v, ..., v)."""
    v = np.asarray(v, dtype=float)
    return eval_F(spec, np.broadcast_to(v, (spec.n_args,) + v.shape))


def eval_f_prime(spec: NonlinearitySpec, v: ArrayLike) -> NDArray:
    v = np.asarray(v, dtype=float)
    Y = spec.orientation * v + spec.state_shift
    # s * s = 1 cancels the orientation in the chain rule
    return sum(spec.affine) + _local(spec.local_function, Y, derivative=True)


# ----------------- Validation -----------------


def validate(spec: NonlinearitySpec) -> NonlinearitySpec:
    """
    Check the monotonicity, periodicity and bistability assumptions on
    sampled data. Returns the spec unchanged or raises AxiomViolation naming
    the broken assumption.
    """
    rng = np.random.default_rng(0)
    n = spec.n_args

    X = rng.uniform(-2.0, 2.0, size=(n, VALIDATION_SAMPLES))
    gap = np.max(np.abs(eval_F(spec, X + 1.0) - eval_F(spec, X)))
    if gap > PERIODICITY_TOL:
        raise AxiomViolation("Periodicity", f"|F(X+E) - F(X)| reaches {gap:.3e}")

    for i in range(1, n):
        if spec.affine[i] < -TOL_MONO:
            raise AxiomViolation(
                "Monotonicity", f"coefficient a_{i} = {spec.affine[i]:g} is negative"
            )
        delta = rng.uniform(0.0, 1.0, size=VALIDATION_SAMPLES)
        bumped = X.copy()
        bumped[i] += delta
        worst = float(np.min(eval_F(spec, bumped) - eval_F(spec, X)))
        if worst < -TOL_MONO:
            raise AxiomViolation(
                "Monotonicity", f"F decreases by {-worst:.3e} in argument {i}"
            )

    theta = spec.theta
    f0, f1 = eval_f(spec, 0.0), eval_f(spec, 1.0)
    if abs(f0 - f1) > PERIODICITY_TOL * max(1.0, abs(f0)):
        raise AxiomViolation("Bistability", f"f(0) = {f0:.6g} differs from f(1) = {f1:.6g}")
    rising = eval_f(spec, np.linspace(0.0, theta, SCAN_POINTS // 2 + 1))
    falling = eval_f(spec, np.linspace(theta, 1.0, SCAN_POINTS // 2 + 1))
    if np.min(np.diff(rising)) < -TOL_MONO or rising[-1] <= rising[0]:
        raise AxiomViolation("Bistability", f"f is not increasing on (0, theta={theta:g})")
    if np.max(np.diff(falling)) > TOL_MONO or falling[-1] >= falling[0]:
        raise AxiomViolation("Bistability", f"f is not decreasing on (theta={theta:g}, 1)")

    logger.debug(f"Validated {spec.label}")
    return spec


# ----------------- Critical forcing -----------------


def _extremum(spec: NonlinearitySpec, sign: float) -> tuple[float, float]:
    """
    Location and value of the minimum of sign * f over a period: a dense scan
    followed by golden-section refinement around the best sample.
    """
    x = np.arange(SCAN_POINTS) / SCAN_POINTS
    values = sign * eval_f(spec, x)
    j = int(np.argmin(values))
    x_best, v_best = float(x[j]), float(values[j])
    dx = 1.0 / SCAN_POINTS

    # Refine in a coordinate centred at 1 so the relative tolerance stays meaningful at x = 0
    def objective(u: float) -> float:
        return float(sign * eval_f(spec, x_best - 1.0 + u))

    try:
        res = minimize_scalar(
            objective,
            bracket=(1.0 - dx, 1.0, 1.0 + dx),
            method="golden",
            options={"xtol": GOLDEN_TOL, "maxiter": 500},
        )
    except ValueError:
        # flat bracket: the scan value is already the extremum to working precision
        return x_best, sign * v_best

    if not res.success:
        raise NumericError(
            "golden-section refinement of f did not converge",
            bracket=(x_best - dx, x_best + dx),
        )
    if res.fun < v_best:
        x_best, v_best = float(x_best - 1.0 + res.x), float(res.fun)
    return x_best, sign * v_best


def sigma_bounds(spec: NonlinearitySpec) -> tuple[float, float]:
    """(sigma-, sigma+) = (-max f, -min f)."""
    _, f_min = _extremum(spec, 1.0)
    _, f_max = _extremum(spec, -1.0)
    return -f_max, -f_min


def argmin_f(spec: NonlinearitySpec) -> float:
    return _extremum(spec, 1.0)[0]


def equilibria(spec: NonlinearitySpec, sigma: float) -> EquilibriumPair:
    """Roots m_sigma in [theta-1, 0] and b_sigma in [0, theta] of f(s) + sigma = 0."""
    sigma_minus, sigma_plus = sigma_bounds(spec)
    if not (sigma_minus - SIGMA_EDGE_TOL <= sigma <= sigma_plus + SIGMA_EDGE_TOL):
        raise DomainError(
            f"sigma={sigma:g} outside [sigma-, sigma+] = [{sigma_minus:g}, {sigma_plus:g}]: "
            "f(s) + sigma = 0 has no root"
        )

    def g(s: float) -> float:
        return float(eval_f(spec, s)) + sigma

    m_sigma = _monotone_root(g, spec.theta - 1.0, 0.0)
    b_sigma = _monotone_root(g, 0.0, spec.theta)
    return EquilibriumPair(sigma=sigma, m_sigma=min(m_sigma, 0.0), b_sigma=max(b_sigma, 0.0))


def _monotone_root(g, a: float, b: float) -> float:
    ga, gb = g(a), g(b)
    if abs(ga) <= TOL_ROOT and abs(ga) <= abs(gb):
        return a
    if abs(gb) <= TOL_ROOT:
        return b
    if ga * gb > 0:
        raise NumericError("f + sigma does not change sign", bracket=(a, b))
    root = bisect(g, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    if abs(g(root)) > TOL_ROOT:
        raise NumericError(f"root residual {abs(g(root)):.3e} above tolerance", bracket=(a, b))
    return float(root)


# ----------------- Lipschitz data -----------------


def lipschitz_data(spec: NonlinearitySpec) -> LipschitzData:
    """
    Bounds read off the affine coefficients; the local part contributes its
    exact harmonic bound, or a sampled bound times a safety factor for tables.
    """
    a = spec.affine
    g_sup, g_prime_sup = _local_bounds(spec.local_function)
    total = sum(a)
    lin_range = max(sum(max(x, 0.0) for x in a), -sum(min(x, 0.0) for x in a))
    F_sup = lin_range + abs(spec.state_shift * total) + g_sup + abs(spec.offset)
    return LipschitzData(
        L=(abs(a[0]) + g_prime_sup,) + tuple(abs(x) for x in a[1:]),
        L_center_lower=a[0] - g_prime_sup,
        f_prime_sup=abs(total) + g_prime_sup,
        F_sup=F_sup,
    )


# ----------------- Reflection -----------------


def reflect(spec: NonlinearitySpec) -> NonlinearitySpec:
    """
    Conjugate operator F^(X) = -F((theta - X_i)_i) with shifts -r_i.

    This is -F(1 - X) re-anchored by the state shift 1 - theta, which keeps the
    diagonal bistable with the same theta; profiles map as
    phi^(z) = theta - phi(-z), velocities as c^ = -c and sigma^ = -sigma.

    Because of the re-anchoring the conjugacy reads
    eval_F(reflect(spec), theta - X) = -eval_F(spec, X), not the unanchored
    eval_F(reflect(spec), 1 - X) = -eval_F(spec, X), and the diagonal is
    f^(v) = -f(theta - v) rather than -f(1 - v). For FK that makes f^ = f where
    the unanchored conjugate would give -f; sigma+/- and the velocities are
    the same under either anchoring.
    """
    s = spec.orientation
    return spec.model_copy(
        update={
            "shifts": tuple(0.0 - r for r in spec.shifts),
            "orientation": -s,
            "state_shift": s * spec.theta + spec.state_shift,
            "offset": -spec.offset,
        }
    )
