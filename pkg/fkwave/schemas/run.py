from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, model_validator

from fkwave.config import C_TOL, DEFAULT_H, DEFAULT_HALF_WIDTH, DEFAULT_T, DEFAULT_WINDOW_FRACTION, HULL_M
from fkwave.schemas.analysis import WaveConfig
from fkwave.schemas.evolution import EvolutionConfig, GridSpec, InitialShape
from fkwave.schemas.hull import HullConfig


class RunConfig(BaseModel):
    """
    One CLI invocation: where the operator comes from, numeric overrides,
    sweep grid and output location. Missing values fall back to Settings.
    """

    model_config = ConfigDict(frozen=True)

    # Operator source: exactly one of the two
    fk_beta: float | None = Field(default=None, gt=0)
    spec_path: Path | None = None

    # Numerics
    h: float = Field(default=DEFAULT_H, gt=0)
    dt: float | None = Field(default=None, gt=0)
    T: float = Field(default=DEFAULT_T, gt=0)
    domain_half_width: float = Field(default=DEFAULT_HALF_WIDTH, gt=0)
    M: int = Field(default=HULL_M, ge=64)
    c_tol: float = Field(default=C_TOL, gt=0)
    window_fraction: float = Field(default=DEFAULT_WINDOW_FRACTION, gt=0, le=1)
    initial: InitialShape = "logistic"

    # Sweep grid: explicit endpoints or a margin fraction of sigma+ - sigma-
    points: int = Field(default=41, ge=2)
    margin: float = Field(default=0.025, ge=0, lt=0.5)
    sigma_lo: float | None = None
    sigma_hi: float | None = None

    out: Path = Path("out")
    jobs: int = Field(default=1, ge=1)
    seed: int = 0

    @model_validator(mode="after")
    def _one_source(self):
        if (self.fk_beta is None) == (self.spec_path is None):
            raise ValueError("give exactly one of --fk-beta or --spec")
        if (self.sigma_lo is None) != (self.sigma_hi is None):
            raise ValueError("sweep endpoints come in pairs")
        if self.sigma_lo is not None and self.sigma_lo >= self.sigma_hi:
            raise ValueError("sweep endpoints must satisfy lo < hi")
        return self

    def wave_config(self) -> WaveConfig:
        return WaveConfig(
            grid=GridSpec(h=self.h, half_width=self.domain_half_width),
            evolution=EvolutionConfig(dt=self.dt, T=self.T),
            window_fraction=self.window_fraction,
            c_tol=self.c_tol,
            initial=self.initial,
        )

    def hull_config(self) -> HullConfig:
        return HullConfig(M=self.M, dt=self.dt)
