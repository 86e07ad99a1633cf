import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class FrontTrace(BaseModel):
    """
    Time series of the wave phase xi = -z_front, where z_front is the level
    crossing of the profile. Since u(t, z) = phi(z + c t), xi grows like c t.
    - level: crossing level used
    - shift_accum: window recentring offset already folded into xi
    - source: running time integral of sum_j (f(u_j) + sigma) h, sampled with t
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    t: np.ndarray
    xi: np.ndarray
    level: float
    shift_accum: float = 0.0
    source: np.ndarray | None = None

    @field_validator("t", "xi", mode="before")
    @classmethod
    def _as_array(cls, v):
        return np.array(v, dtype=float)

    @field_validator("source", mode="before")
    @classmethod
    def _optional_array(cls, v):
        return None if v is None else np.array(v, dtype=float)

    @field_validator("t")
    @classmethod
    def _increasing(cls, v):
        if v.size > 1 and np.any(np.diff(v) <= 0):
            raise ValueError("trace times must be strictly increasing")
        return v

    @model_validator(mode="after")
    def _aligned(self):
        if self.xi.size != self.t.size:
            raise ValueError("t and xi must have the same length")
        if self.source is not None and self.source.size != self.t.size:
            raise ValueError("source must be sampled at the trace times")
        return self

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.t.tolist(), self.xi.tolist()))

    def __len__(self) -> int:
        return int(self.t.size)


class VelocityEstimate(BaseModel):
    """
    Trailing-window regression of xi against t.
    - pinned: |c| <= c_tol and the window displacement <= disp_tol
    """

    model_config = ConfigDict(frozen=True)

    c: float
    stderr: float
    window: tuple[float, float]
    pinned: bool
    displacement: float
