from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from fkwave.config import C_TOL, DEFAULT_WINDOW_FRACTION
from fkwave.schemas.evolution import EvolutionConfig, GridSpec, InitialShape


class WaveConfig(BaseModel):
    """Everything one velocity measurement needs besides the spec and sigma."""

    model_config = ConfigDict(frozen=True)

    grid: GridSpec = GridSpec()
    evolution: EvolutionConfig = EvolutionConfig()
    window_fraction: float = Field(default=DEFAULT_WINDOW_FRACTION, gt=0, le=1)
    c_tol: float = Field(default=C_TOL, gt=0)
    initial: InitialShape = "logistic"


class DiagramPoint(BaseModel):
    """
    One row of the velocity diagram. Failed rows keep their sigma, carry the
    error message and NaN numbers.
    """

    model_config = ConfigDict(frozen=True)

    sigma: float
    c: float
    stderr: float
    pinned: bool
    m_sigma: float
    b_sigma: float
    displacement: float = 0.0
    max_jump: float = 0.0
    failed: bool = False
    error: str | None = None


class CriticalEstimate(BaseModel):
    """
    c(sigma) sampled toward one end of (sigma-, sigma+).
    - estimate: last value of the refinement
    - bracket: (lower, upper) built from the monotone sequence
    - monotone: the sequence moves toward the limit within 2 stderr
    """

    model_config = ConfigDict(frozen=True)

    side: Literal["minus", "plus"]
    sigmas: tuple[float, ...]
    values: tuple[float, ...]
    stderrs: tuple[float, ...]
    estimate: float
    bracket: tuple[float, float]
    monotone: bool


class CriticalVelocities(BaseModel):
    model_config = ConfigDict(frozen=True)

    c_minus: CriticalEstimate
    c_plus: CriticalEstimate
    # measured c+ - c-; whether c- = 0 = c+ is left to the reader
    gap: float
    gap_uncertainty: float


class Diagram(BaseModel):
    model_config = ConfigDict(frozen=True)

    points: list[DiagramPoint]
    plateau: tuple[float, float] | None = None
    K_mono: float
    critical: CriticalVelocities | None = None

    @model_validator(mode="after")
    def _sorted(self):
        sigmas = [p.sigma for p in self.points]
        if sigmas != sorted(sigmas):
            raise ValueError("diagram points must be sorted by sigma")
        return self

    @property
    def c_minus(self) -> float | None:
        return self.critical.c_minus.estimate if self.critical else None

    @property
    def c_plus(self) -> float | None:
        return self.critical.c_plus.estimate if self.critical else None

    @property
    def valid_points(self) -> list[DiagramPoint]:
        return [p for p in self.points if not p.failed]


class SlopeViolation(BaseModel):
    model_config = ConfigDict(frozen=True)

    sigma_lo: float
    sigma_hi: float
    slope: float
    required: float


class SlopeBoundReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    K_mono: float
    checked: int
    violations: list[SlopeViolation] = []

    @property
    def passed(self) -> bool:
        return not self.violations


class SupersolutionReport(BaseModel):
    """
    Certificate for the supersolution at c = 1/epsilon.
    - M_threshold: K (2 r*) exp(2 r* f'_sup), the smallest M the estimate allows
    - a_epsilon: 1 + M epsilon
    - grid_min_residual: min over the grid of c phi' - F(phi(. + r_i))
    """

    model_config = ConfigDict(frozen=True)

    spec_id: str
    epsilon: float
    M: float
    M_threshold: float
    K: float
    a_epsilon: float
    mu_epsilon: float
    grid_min_residual: float
    passed: bool


class VelocityComparison(BaseModel):
    model_config = ConfigDict(frozen=True)

    sigma_1: float
    sigma_2: float
    c_1: float
    c_2: float
    tolerance: float
    holds: bool


class CheckResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    value: float | None = None
    threshold: float | None = None
    detail: str = ""


class VerificationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    spec_id: str
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]
