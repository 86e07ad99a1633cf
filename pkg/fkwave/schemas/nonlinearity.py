"""
Schemas for the nonlinear operator F and the data derived from it.

The operator is stored in "affine plus local" form

    F(X) = s * ( sum_i a_i Y_i + g(Y_0) ) + offset,   Y = s * X + q

where g is a 1-periodic local function. The built-in Frenkel-Kontorova
operator is the special case a = (-2, 1, 1), shifts (0, 1, -1),
g(x) = -beta cos(2 pi x). The orientation s, state shift q and offset are
only touched by reflection and normalization; a freshly loaded spec has
s = 1, q = 0, offset = 0.
"""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator


class Harmonics(BaseModel):
    """
    Closed-form local function
        g(x) = constant + sum_k cos[k-1] cos(2 pi k x) + sin[k-1] sin(2 pi k x)
    """

    model_config = ConfigDict(frozen=True)

    constant: float = 0.0
    cos: tuple[float, ...] = ()
    sin: tuple[float, ...] = ()


class LocalFunction(BaseModel):
    """
    The 1-periodic local part g. Exactly one of `harmonics` or `table` is set.
    - harmonics: closed form Fourier sum
    - table: samples of g at x = j / len(table), j = 0..len-1, interpolated by a
      periodic cubic spline
    """

    model_config = ConfigDict(frozen=True)

    harmonics: Harmonics | None = None
    table: tuple[float, ...] | None = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.harmonics is None) == (self.table is None):
            raise ValueError("local function needs exactly one of 'harmonics' or 'table'")
        if self.table is not None and len(self.table) < 8:
            raise ValueError("local function table needs at least 8 samples")
        return self


class NonlinearitySpec(BaseModel):
    """
    The operator F with its shifts r_i and bistability threshold theta.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["fk", "affine_local"]
    shifts: tuple[float, ...]
    theta: float = Field(..., gt=0, lt=1)
    beta: float | None = Field(default=None, gt=0)
    coefficients: tuple[float, ...] | None = None
    local: LocalFunction | None = None

    orientation: Literal[1, -1] = 1
    state_shift: float = 0.0
    offset: float = 0.0

    @model_validator(mode="after")
    def _structure(self):
        if not self.shifts or self.shifts[0] != 0.0:
            raise ValueError("shifts must start with r_0 = 0")
        if len(set(self.shifts)) != len(self.shifts):
            raise ValueError("shifts must be pairwise distinct")
        if self.kind == "fk":
            if self.beta is None:
                raise ValueError("fk kind requires beta")
            if sorted(abs(r) for r in self.shifts) != [0.0, 1.0, 1.0]:
                raise ValueError("fk kind uses the nearest-neighbour shifts (0, 1, -1)")
        else:
            if self.coefficients is None or self.local is None:
                raise ValueError("affine_local kind requires coefficients and local")
            if len(self.coefficients) != len(self.shifts):
                raise ValueError("one coefficient per shift is required")
        return self

    @computed_field  # type: ignore[prop-decorator]
    @property
    def r_star(self) -> float:
        return max(abs(r) for r in self.shifts)

    @property
    def n_args(self) -> int:
        return len(self.shifts)

    @property
    def affine(self) -> tuple[float, ...]:
        """Linear coefficients a_i, in shift order."""
        if self.kind == "fk":
            return tuple(-2.0 if r == 0.0 else 1.0 for r in self.shifts)
        return self.coefficients  # type: ignore[return-value]

    @property
    def local_function(self) -> LocalFunction:
        if self.kind == "fk":
            return LocalFunction(harmonics=Harmonics(cos=(-self.beta,)))
        return self.local  # type: ignore[return-value]

    @property
    def label(self) -> str:
        base = f"fk(beta={self.beta:g})" if self.kind == "fk" else f"affine_local(N={self.n_args - 1})"
        tags = []
        if self.orientation == -1:
            tags.append("reflected")
        if self.offset != 0.0 or self.state_shift != 0.0:
            tags.append("normalized")
        return base + (f"[{','.join(tags)}]" if tags else "")


class LipschitzData(BaseModel):
    """
    Concrete bounds for F on which every step size and certificate depends.
    - L: per-argument Lipschitz bound, L[0] is the bound on |dF/dX_0|
    - L_center_lower: lower bound on dF/dX_0, can be negative
    - f_prime_sup: bound on |f'| over a period
    - F_sup: bound on |F| over [0,1]^(N+1)
    """

    model_config = ConfigDict(frozen=True)

    L: tuple[float, ...]
    L_center_lower: float
    f_prime_sup: float
    F_sup: float

    @property
    def neighbour_sum(self) -> float:
        return float(sum(self.L[1:]))


class EquilibriumPair(BaseModel):
    """The two roots m_sigma in [theta-1, 0] and b_sigma in [0, theta] of f(s) + sigma = 0."""

    model_config = ConfigDict(frozen=True)

    sigma: float
    m_sigma: float
    b_sigma: float

    @model_validator(mode="after")
    def _ordered(self):
        if self.m_sigma > 0.0 or self.b_sigma < 0.0:
            raise ValueError("equilibria must satisfy m_sigma <= 0 <= b_sigma")
        return self
