"""
Schemas for the hull-function relaxation and the vertical branch as p -> 0.

Flow overview:
1) solve_hull relaxes v = z + psi(z) on one period and reports the drift lambda_p.
2) invert_hull brackets the sigma with lambda_p(sigma) = c p.
3) trace_branch repeats the inversion along p -> 0 and reports the gap to sigma+/-.
"""

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from fkwave.config import HULL_CHUNK_T, HULL_M, HULL_MAX_CHUNKS, TOL_LAMBDA, TOL_SIGMA


class HullConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    M: int = Field(default=HULL_M, ge=64)
    dt: float | None = Field(default=None, gt=0)
    chunk_T: float = Field(default=HULL_CHUNK_T, gt=0)
    max_chunks: int = Field(default=HULL_MAX_CHUNKS, ge=2)
    tol_lambda: float = Field(default=TOL_LAMBDA, gt=0)
    tol_sigma: float = Field(default=TOL_SIGMA, gt=0)


class HullState(BaseModel):
    """
    h_p(z) = z + psi(z) sampled at z_j = j / M. psi is kept centred; the drift
    removed from it is accumulated in `drift`.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    p: float = Field(..., gt=0)
    sigma: float
    psi: np.ndarray
    drift: float = 0.0

    @property
    def M(self) -> int:
        return int(self.psi.size)

    @property
    def amplitude(self) -> float:
        return float(np.ptp(self.psi))


class HullResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: float
    sigma: float
    lambda_p: float
    fit_residual: float
    converged: bool
    amplitude: float


class BranchRow(BaseModel):
    """One p along the vertical branch: the sigma bracket of lambda_p(sigma) = c p."""

    model_config = ConfigDict(frozen=True)

    p: float
    sigma_lo: float
    sigma_hi: float
    sigma_mid: float
    gap: float


BranchSide = Literal["plus", "minus"]
