from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from fkwave.config import DEFAULT_H, DEFAULT_HALF_WIDTH, DEFAULT_T

InitialShape = Literal["logistic", "ramp"]
TimeScheme = Literal["euler", "ssprk3"]


class GridProfile(BaseModel):
    """
    A profile sampled on a uniform grid, z_j = z_left + j * h.
    Reads beyond the interior use left_limit / right_limit.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    z_left: float
    h: float = Field(..., gt=0)
    values: np.ndarray
    left_limit: float
    right_limit: float

    @field_validator("values", mode="before")
    @classmethod
    def _as_array(cls, v):
        arr = np.array(v, dtype=float)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("values must be a 1-d array with at least two samples")
        return arr

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def z(self) -> np.ndarray:
        return self.z_left + self.h * np.arange(self.n)

    @property
    def z_right(self) -> float:
        return self.z_left + self.h * (self.n - 1)

    def is_monotone(self, tol: float = 1e-12) -> bool:
        v = self.values
        return bool(
            np.all(np.diff(v) >= -tol)
            and self.left_limit <= v[0] + tol
            and v[-1] <= self.right_limit + tol
        )

    def shifted(self, cells: int) -> "GridProfile":
        """The same samples carried `cells` grid cells to the right."""
        return self.model_copy(update={"z_left": self.z_left + cells * self.h})

    def plus(self, constant: float) -> "GridProfile":
        return self.model_copy(
            update={
                "values": self.values + constant,
                "left_limit": self.left_limit + constant,
                "right_limit": self.right_limit + constant,
            }
        )


class GridSpec(BaseModel):
    """Uniform grid on [-half_width, half_width]."""

    model_config = ConfigDict(frozen=True)

    h: float = Field(default=DEFAULT_H, gt=0)
    half_width: float = Field(default=DEFAULT_HALF_WIDTH, gt=0)

    @property
    def n(self) -> int:
        return int(round(2.0 * self.half_width / self.h)) + 1

    @property
    def z_left(self) -> float:
        return -self.h * (self.n // 2)


class EvolutionConfig(BaseModel):
    """
    - dt: time step; None picks the largest monotone step (capped)
    - scheme: forward Euler or the three-stage strong-stability-preserving
      Runge-Kutta scheme built from Euler stages
    - T: horizon
    - recenter: keep the front in the central third by integer-cell window shifts
    - record_every: steps between front samples; None gives ~400 samples
    """

    model_config = ConfigDict(frozen=True)

    dt: float | None = Field(default=None, gt=0)
    scheme: TimeScheme = "ssprk3"
    T: float = Field(default=DEFAULT_T, gt=0)
    recenter: bool = False
    record_every: int | None = Field(default=None, ge=1)


class ShiftStencil(BaseModel):
    """
    Off-grid reads u(z_j + r_i) ~ (1 - t_i) u[j + k_i] + t_i u[j + k_i + 1].
    - diag_overlap: weight each shift puts back on the centre cell
    - L_eff: aggregated worst-case negative diagonal contribution
    - dt_max: largest step keeping the explicit update monotone
    """

    model_config = ConfigDict(frozen=True)

    h: float
    scale: float = 1.0
    k: tuple[int, ...]
    t: tuple[float, ...]
    diag_overlap: tuple[float, ...]
    L_eff: float
    dt_max: float

    @property
    def ghost(self) -> int:
        return max(abs(k) for k in self.k) + 1