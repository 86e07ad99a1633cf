import pytest

from fkwave.core.config import get_settings
from fkwave.schemas.analysis import WaveConfig
from fkwave.schemas.evolution import EvolutionConfig, GridSpec
from fkwave.schemas.nonlinearity import Harmonics, LocalFunction, NonlinearitySpec
from fkwave.solver.nonlinearity import fk_spec


@pytest.fixture
def fk1() -> NonlinearitySpec:
    return fk_spec(1.0)


@pytest.fixture
def fk2() -> NonlinearitySpec:
    return fk_spec(2.0)


@pytest.fixture
def next_nearest() -> NonlinearitySpec:
    """Zero-sum stencil reaching two neighbours on each side."""
    return NonlinearitySpec(
        kind="affine_local",
        theta=0.5,
        shifts=(0.0, 1.0, -1.0, 2.0, -2.0),
        coefficients=(-2.5, 1.0, 1.0, 0.25, 0.25),
        local=LocalFunction(harmonics=Harmonics(cos=(-0.8,))),
    )


@pytest.fixture
def uncoupled() -> NonlinearitySpec:
    """F = f(X_0): no coupling between sites."""
    return NonlinearitySpec(
        kind="affine_local",
        theta=0.5,
        shifts=(0.0, 1.0, -1.0),
        coefficients=(0.0, 0.0, 0.0),
        local=LocalFunction(harmonics=Harmonics(cos=(-0.5,))),
    )


@pytest.fixture
def small_wave() -> WaveConfig:
    """A coarse, short run for tests that only need qualitative behaviour."""
    return WaveConfig(
        grid=GridSpec(h=0.1, half_width=10.0),
        evolution=EvolutionConfig(T=20.0),
    )


@pytest.fixture(autouse=True)
def _fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
