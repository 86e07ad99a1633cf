import math

import numpy as np
import pytest

from fkwave.core.errors import InputError
from fkwave.schemas.analysis import WaveConfig
from fkwave.schemas.hull import HullConfig, HullResult
from fkwave.solver.analysis import critical_velocities
from fkwave.solver.hull import trace_branch, hull_bound, invert_hull, relax_hull, solve_hull
from fkwave.solver.nonlinearity import sigma_bounds

COARSE = HullConfig(M=64)


class TestSolveHull:
    def test_bound_constant(self, fk2):
        assert hull_bound(fk2, 0.5) == pytest.approx(6.0)

    def test_bound_ignores_reach(self, next_nearest):
        assert hull_bound(next_nearest, 0.5) == pytest.approx(3.3 * 1.5)

    def test_pinned_at_zero_forcing(self, fk2):
        result = solve_hull(fk2, 0.5, 0.0, COARSE)
        assert result.converged
        assert result.lambda_p == pytest.approx(0.0, abs=1e-3)

    def test_large_forcing_drifts_within_bound(self, fk2):
        result, state = relax_hull(fk2, 0.5, 5.0, COARSE)
        assert result.lambda_p > 0
        assert abs(result.lambda_p - 5.0) <= hull_bound(fk2, 0.5)
        assert state.M == 64
        assert result.amplitude == pytest.approx(state.amplitude)

    def test_fk_drift_is_odd_in_forcing(self, fk2):
        up = solve_hull(fk2, 0.5, 3.0, COARSE).lambda_p
        down = solve_hull(fk2, 0.5, -3.0, COARSE).lambda_p
        assert up == pytest.approx(-down, abs=1e-3)

    @pytest.mark.parametrize("sigma", [0.0, 5.0])
    def test_amplitude_stays_within_one_period(self, fk2, sigma):
        result = solve_hull(fk2, 0.5, sigma, COARSE)
        assert result.amplitude <= 1.0 + 1e-6

    def test_period_must_be_positive(self, fk2):
        with pytest.raises(InputError):
            solve_hull(fk2, 0.0, 0.0, COARSE)


class TestInvertHull:
    """Inversion against synthetic lambda_p(sigma) curves."""

    @pytest.fixture
    def drift(self, monkeypatch):
        def install(curve):
            def fake(spec, p, sigma, config=None):
                return HullResult(
                    p=p, sigma=sigma, lambda_p=curve(sigma), fit_residual=0.0, converged=True, amplitude=0.0
                )

            monkeypatch.setattr("fkwave.solver.hull.solve_hull", fake)

        return install

    def test_sloped_crossing_is_narrow(self, fk1, drift):
        drift(lambda s: 0.15 * (s - 1.0))
        lo, hi = invert_hull(fk1, 0.5, 0.0, COARSE)
        assert lo <= 1.0 <= hi
        assert hi - lo <= COARSE.tol_sigma

    def test_plateau_is_spanned(self, fk1, drift):
        drift(lambda s: math.copysign(max(abs(s) - 0.5, 0.0), s))
        lo, hi = invert_hull(fk1, 0.5, 0.0, COARSE)
        assert lo <= -0.5
        assert hi >= 0.5
        assert hi - lo <= 1.0 + 2 * COARSE.tol_sigma

    def test_brackets_follow_velocity_order(self, fk1, drift):
        drift(lambda s: s**3)
        lo1, hi1 = invert_hull(fk1, 0.5, 0.2, COARSE)
        lo2, hi2 = invert_hull(fk1, 0.5, 0.6, COARSE)
        assert lo1 <= lo2
        assert hi1 <= hi2
        assert hi1 <= lo2


class TestTraceBranchInput:
    @pytest.mark.parametrize("ps", [[], [0.4, -0.1], [0.1, 0.2], [0.2, 0.2]])
    def test_sequence_is_validated(self, fk1, ps):
        with pytest.raises(InputError):
            trace_branch(fk1, 1.0, ps, config=COARSE)


@pytest.mark.slow
class TestHullAcceptance:
    @pytest.mark.parametrize("p", [0.5, 0.25])
    def test_bound_and_order(self, fk2, p):
        sigmas = [-1.0, 0.0, 1.0, 3.0]
        lambdas = [solve_hull(fk2, p, s).lambda_p for s in sigmas]
        for s, lam in zip(sigmas, lambdas):
            assert abs(lam - s) <= 4.0 * (1 + p)
        assert all(b >= a - 1e-4 for a, b in zip(lambdas, lambdas[1:]))
        assert lambdas[1] == pytest.approx(0.0, abs=1e-3)

    def test_drift_is_monotone_in_forcing(self, fk2):
        lambdas = [solve_hull(fk2, 0.5, s, COARSE).lambda_p for s in np.linspace(-3.0, 3.0, 21)]
        assert all(b >= a - 1e-4 for a, b in zip(lambdas, lambdas[1:]))

    def test_doubling_resolution_keeps_the_drift(self, fk2):
        coarse = solve_hull(fk2, 0.5, 3.0, HullConfig(M=128)).lambda_p
        fine = solve_hull(fk2, 0.5, 3.0, HullConfig(M=256)).lambda_p
        assert abs(coarse - fine) <= 2e-4

    def test_zero_velocity_bracket_spans_zero_forcing(self, fk2):
        lo, hi = invert_hull(fk2, 0.5, 0.0, COARSE)
        assert lo <= 0.0 <= hi

    def test_branch_approaches_sigma_plus(self, fk1):
        crit = critical_velocities(fk1, WaveConfig())
        rows = trace_branch(fk1, crit.c_plus.estimate + 1.0, [0.4, 0.2, 0.1], side="plus", jobs=3)
        gaps = [r.gap for r in rows]
        assert all(b <= a + 1e-3 for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < gaps[0] / 2
        assert all(r.sigma_lo <= r.sigma_hi for r in rows)
        assert sigma_bounds(fk1)[1] == pytest.approx(1.0, abs=1e-6)

    def test_branch_below_critical_velocity_stays_inside(self, fk1, small_wave):
        crit = critical_velocities(fk1, small_wave)
        sigma_minus, sigma_plus = sigma_bounds(fk1)
        rows = trace_branch(fk1, 0.25 * crit.c_plus.estimate, [0.2, 0.1], side="plus", config=COARSE)
        for r in rows:
            assert sigma_minus < r.sigma_lo <= r.sigma_hi < sigma_plus
