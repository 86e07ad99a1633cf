"""
Front positions and velocity fitting.
"""

import math

import numpy as np
from scipy.stats import linregress

from fkwave.config import C_TOL, DEFAULT_WINDOW_FRACTION, MIN_FIT_SAMPLES
from fkwave.core.errors import DomainError, EstimationError
from fkwave.schemas.evolution import GridProfile
from fkwave.schemas.fronts import FrontTrace, VelocityEstimate
from fkwave.schemas.nonlinearity import EquilibriumPair


def level_for(pair: EquilibriumPair) -> float:
    """Midpoint between the limits m_sigma and m_sigma + 1."""
    return pair.m_sigma + 0.5


def front_position(u: GridProfile, level: float) -> float:
    """
    Where the piecewise-linear interpolant of u (extended by its limits one
    cell beyond each end) first reaches `level`.
    """
    if not (u.left_limit < level < u.right_limit):
        raise DomainError(
            f"level {level:g} outside the profile range ({u.left_limit:g}, {u.right_limit:g})"
        )
    v = np.concatenate(([u.left_limit], u.values, [u.right_limit]))
    j = int(np.argmax(v >= level))
    lo, hi = v[j - 1], v[j]
    frac = (level - lo) / (hi - lo)
    # v[0] sits one cell left of z_left
    return u.z_left + (j - 2 + frac) * u.h


def max_jump(u: GridProfile) -> float:
    """Largest jump between adjacent samples, limits included."""
    v = np.concatenate(([u.left_limit], u.values, [u.right_limit]))
    return float(np.max(np.abs(np.diff(v))))


def estimate_velocity(
    trace: FrontTrace,
    window_fraction: float = DEFAULT_WINDOW_FRACTION,
    c_tol: float = C_TOL,
    disp_tol: float = 0.05,
) -> VelocityEstimate:
    """Least-squares slope of xi against t over the trailing window."""
    n = len(trace)
    n_window = math.ceil(window_fraction * n)
    if n_window < MIN_FIT_SAMPLES:
        raise EstimationError(
            f"{n_window} samples in the fit window, at least {MIN_FIT_SAMPLES} needed"
        )
    t = trace.t[-n_window:]
    xi = trace.xi[-n_window:]

    if np.ptp(xi) == 0.0:
        c, stderr = 0.0, 0.0
    else:
        fit = linregress(t, xi)
        c, stderr = float(fit.slope), float(fit.stderr)

    displacement = float(np.ptp(xi))
    return VelocityEstimate(
        c=c,
        stderr=stderr,
        window=(float(t[0]), float(t[-1])),
        pinned=abs(c) <= c_tol and displacement <= disp_tol,
        displacement=displacement,
    )
