import math
from pathlib import Path

import numpy as np
import pytest

from fkwave.core.errors import DomainError, PreconditionError, UnsupportedSpecError
from fkwave.repo.spec_repo import load_spec
from fkwave.schemas.analysis import CriticalEstimate, CriticalVelocities, Diagram, DiagramPoint, WaveConfig
from fkwave.schemas.evolution import EvolutionConfig, GridProfile, GridSpec
from fkwave.schemas.fronts import FrontTrace
from fkwave.schemas.nonlinearity import Harmonics, LocalFunction, NonlinearitySpec
from fkwave.solver.analysis import (
    check_slope_bound,
    compare_velocities,
    critical_velocities,
    diagram_violations,
    forcing_grid,
    integral_identity,
    normalize_to_sigma_plus,
    reflection_gaps,
    run_wave,
    sweep_diagram,
    velocity_at,
    verify_supersolution,
)
from fkwave.solver.nonlinearity import eval_f, fk_spec, reflect, sigma_bounds

SPECS = Path(__file__).resolve().parents[1] / "specs"


def row(sigma: float, c: float, stderr: float = 0.0, pinned: bool = False) -> DiagramPoint:
    return DiagramPoint(sigma=sigma, c=c, stderr=stderr, pinned=pinned, m_sigma=-0.2, b_sigma=0.2)


def diagram(rows: list[DiagramPoint], K: float = 0.2) -> Diagram:
    return Diagram(points=rows, K_mono=K)


class TestForcingGrid:
    def test_margin_keeps_off_the_ends(self, fk2):
        grid = forcing_grid(fk2, 41)
        assert grid[0] == pytest.approx(-1.9, abs=1e-6)
        assert grid[-1] == pytest.approx(1.9, abs=1e-6)
        assert len(grid) == 41

    def test_explicit_range(self, fk2):
        assert forcing_grid(fk2, 8, lo=1.2, hi=1.9) == pytest.approx(list(np.linspace(1.2, 1.9, 8)))

    def test_single_point_is_rejected(self, fk2):
        with pytest.raises(DomainError):
            forcing_grid(fk2, 1)


class TestDiagramAssembly:
    def test_points_must_be_sorted(self):
        with pytest.raises(ValueError):
            diagram([row(0.5, 0.0), row(0.1, 0.0)])

    def test_violations_skip_failed_rows(self):
        rows = [row(0.0, 0.0), row(0.1, 0.1), row(0.2, 0.05)]
        failed = DiagramPoint(
            sigma=0.3, c=math.nan, stderr=math.nan, pinned=False,
            m_sigma=math.nan, b_sigma=math.nan, failed=True, error="boom",
        )
        d = diagram(rows + [failed])
        assert diagram_violations(d) == [pytest.approx(0.2)]
        assert len(d.valid_points) == 3

    def test_odd_diagram_has_zero_reflection_gap(self):
        sigmas = np.linspace(-1.0, 1.0, 9)
        d = diagram([row(float(s), float(s**3)) for s in sigmas])
        gaps = reflection_gaps(d, d)
        assert len(gaps) == 9
        assert max(g for _, g in gaps) == pytest.approx(0.0, abs=1e-12)

    def test_critical_properties(self):
        d = diagram([row(0.0, 0.0)])
        assert d.c_plus is None
        assert d.c_minus is None

        def side(name: str, value: float) -> CriticalEstimate:
            return CriticalEstimate(
                side=name, sigmas=(0.9,), values=(value,), stderrs=(0.0,),
                estimate=value, bracket=(value - 0.1, value + 0.1), monotone=True,
            )

        critical = CriticalVelocities(
            c_minus=side("minus", -0.4), c_plus=side("plus", 0.6), gap=1.0, gap_uncertainty=0.4
        )
        d = d.model_copy(update={"critical": critical})
        assert d.c_minus == -0.4
        assert d.c_plus == 0.6


class TestSlopeBound:
    def test_exponential_branch_passes(self):
        sigmas = np.linspace(1.0, 1.5, 6)
        d = diagram([row(float(s), 0.1 * math.exp(5 * (s - 1.0))) for s in sigmas])
        report = check_slope_bound(d)
        assert report.passed
        assert report.checked == 5

    def test_flat_step_is_flagged(self):
        cs = [0.1, 0.2, 0.3, 0.3, 0.4, 0.5]
        d = diagram([row(1.0 + 0.1 * k, c) for k, c in enumerate(cs)])
        report = check_slope_bound(d)
        assert not report.passed
        assert [(v.sigma_lo, v.sigma_hi) for v in report.violations] == [
            (pytest.approx(1.2), pytest.approx(1.3))
        ]

    def test_noise_allowance(self):
        cs = [0.1, 0.2, 0.3, 0.3, 0.4, 0.5]
        d = diagram([row(1.0 + 0.1 * k, c, stderr=0.01) for k, c in enumerate(cs)])
        assert check_slope_bound(d).passed

    def test_pinned_rows_do_not_count(self):
        rows = [row(0.1 * k, 0.0, pinned=True) for k in range(4)] + [row(0.5, 0.1), row(0.6, 0.2)]
        with pytest.raises(PreconditionError):
            check_slope_bound(diagram(rows))


class TestNormalization:
    @pytest.mark.parametrize("beta", [0.1, 1.0, 2.0])
    def test_fk_bounds_move_to_zero(self, beta):
        lo, hi = sigma_bounds(normalize_to_sigma_plus(fk_spec(beta)))
        assert lo == pytest.approx(-2 * beta, abs=1e-6)
        assert hi == pytest.approx(0.0, abs=1e-9)

    def test_minimum_is_moved_to_zero(self):
        spec = NonlinearitySpec(
            kind="affine_local",
            theta=0.5,
            shifts=(0.0, 1.0, -1.0),
            coefficients=(-2.0, 1.0, 1.0),
            local=LocalFunction(harmonics=Harmonics(cos=(-1.0,), sin=(0.3,))),
        )
        normalized = normalize_to_sigma_plus(spec)
        assert normalized.state_shift != 0.0
        assert eval_f(normalized, 0.0) == pytest.approx(0.0, abs=1e-9)
        assert eval_f(normalized, 1.0) == pytest.approx(0.0, abs=1e-9)
        assert np.all(eval_f(normalized, np.linspace(0, 1, 101)) >= -1e-9)
        assert "normalized" in normalized.label


class TestSupersolution:
    def test_certificate_for_small_beta(self):
        report = verify_supersolution(normalize_to_sigma_plus(fk_spec(0.1)), 0.01)
        assert report.M_threshold == pytest.approx(4 * math.exp(0.4 * math.pi))
        assert report.M == report.M_threshold
        assert report.K == pytest.approx(2.0)
        assert report.mu_epsilon <= 1.0
        assert report.grid_min_residual >= -1e-8
        assert report.passed

    def test_small_M_fails(self):
        report = verify_supersolution(normalize_to_sigma_plus(fk_spec(0.1)), 0.01, M=1.0)
        assert report.mu_epsilon > 1.0
        assert not report.passed

    def test_requires_normalized_spec(self):
        with pytest.raises(PreconditionError):
            verify_supersolution(fk_spec(0.1), 0.01)

    @pytest.mark.parametrize("epsilon", [0.0, -0.1, 1.5])
    def test_epsilon_range(self, epsilon):
        with pytest.raises(PreconditionError):
            verify_supersolution(normalize_to_sigma_plus(fk_spec(0.1)), epsilon)

    def test_large_a_is_rejected(self):
        with pytest.raises(PreconditionError):
            verify_supersolution(normalize_to_sigma_plus(fk_spec(0.1)), 0.01, M=200.0)

    def test_large_threshold_shrinks_epsilon(self):
        report = verify_supersolution(normalize_to_sigma_plus(fk_spec(2.0)), 0.01, shrink_epsilon=True)
        assert report.M_threshold == pytest.approx(4 * math.exp(8 * math.pi))
        assert report.epsilon == pytest.approx(1 / report.M_threshold)
        assert report.a_epsilon == pytest.approx(2.0)
        assert report.mu_epsilon <= 1.0
        assert report.passed

    def test_admissible_epsilon_is_kept(self):
        report = verify_supersolution(normalize_to_sigma_plus(fk_spec(0.1)), 0.01, shrink_epsilon=True)
        assert report.epsilon == 0.01

    def test_large_threshold_without_shrinking(self):
        with pytest.raises(PreconditionError):
            verify_supersolution(normalize_to_sigma_plus(fk_spec(2.0)), 0.01)


class TestIntegralIdentity:
    PROFILE = GridProfile(z_left=0.0, h=0.5, values=[0.0, 1.0], left_limit=0.0, right_limit=1.0)

    def trace(self, source_rate: float) -> FrontTrace:
        t = np.linspace(0.0, 10.0, 101)
        return FrontTrace(t=t, xi=0.5 * t, level=0.5, source=source_rate * t)

    def test_balanced_source(self, fk1):
        assert integral_identity(self.trace(0.5), self.PROFILE, fk1) == pytest.approx(0.0, abs=1e-12)

    def test_residual_is_the_velocity_mismatch(self, fk1):
        assert integral_identity(self.trace(0.4), self.PROFILE, fk1) == pytest.approx(0.1)

    def test_trace_without_source(self, fk1):
        t = np.linspace(0.0, 10.0, 101)
        with pytest.raises(PreconditionError):
            integral_identity(FrontTrace(t=t, xi=t, level=0.5), self.PROFILE, fk1)

    def test_nonzero_affine_sum_is_unsupported(self):
        spec = NonlinearitySpec(
            kind="affine_local",
            theta=0.5,
            shifts=(0.0, 1.0, -1.0),
            coefficients=(-1.0, 1.0, 1.0),
            local=LocalFunction(harmonics=Harmonics(cos=(-1.0,))),
        )
        with pytest.raises(UnsupportedSpecError):
            integral_identity(self.trace(0.5), self.PROFILE, spec)

    def test_pinned_front_balances(self, fk2):
        config = WaveConfig(grid=GridSpec(h=0.1, half_width=10.0), evolution=EvolutionConfig(T=40.0))
        point, profile, trace = run_wave(fk2, 0.0, config)
        assert point.pinned
        assert integral_identity(trace, profile, fk2) <= 1e-3


class TestReflectionConjugacy:
    """Unequal shifts make c(sigma) lopsided, so only the conjugate run can match it."""

    @pytest.fixture
    def asymmetric(self):
        return load_spec(SPECS / "asymmetric.yaml")

    def test_reflected_velocity(self, asymmetric, small_wave):
        lo, hi = sigma_bounds(asymmetric)
        sigma = lo + 0.9 * (hi - lo)
        c = velocity_at(asymmetric, sigma, small_wave).c
        c_reflected = velocity_at(reflect(asymmetric), -sigma, small_wave).c
        assert c > 0
        assert abs(c + c_reflected) <= 5e-3

    def test_critical_velocities_swap(self, asymmetric, small_wave):
        crit = critical_velocities(asymmetric, small_wave)
        mirrored = critical_velocities(reflect(asymmetric), small_wave)
        assert mirrored.c_plus.estimate == pytest.approx(-crit.c_minus.estimate, abs=5e-3)
        assert mirrored.c_minus.estimate == pytest.approx(-crit.c_plus.estimate, abs=5e-3)


class TestVelocity:
    @pytest.mark.parametrize("sigma", [-1.2, 1.2, 1.5])
    def test_outside_forcing_range(self, fk1, sigma):
        with pytest.raises(DomainError):
            velocity_at(fk1, sigma)

    def test_sweep_rejects_points_outside(self, fk1, small_wave):
        with pytest.raises(DomainError):
            sweep_diagram(fk1, [0.0, 1.2], small_wave)

    def test_uncoupled_sites_are_pinned(self, uncoupled, small_wave):
        point, profile, trace = run_wave(uncoupled, 0.2, small_wave)
        assert point.pinned
        assert point.c == pytest.approx(0.0, abs=1e-3)
        assert profile.is_monotone(tol=1e-10)
        assert len(trace) > 0

    @pytest.mark.parametrize("h", [0.1, 0.05])
    def test_pinned_profile_keeps_its_jump(self, fk2, h):
        config = WaveConfig(grid=GridSpec(h=h, half_width=10.0), evolution=EvolutionConfig(T=20.0))
        point = velocity_at(fk2, 0.0, config)
        assert point.pinned
        assert point.max_jump > 0.2

    def test_uncoupled_sweep_is_one_plateau(self, uncoupled, small_wave):
        d = sweep_diagram(uncoupled, [-0.3, 0.0, 0.3], small_wave)
        assert d.plateau == (pytest.approx(-0.3), pytest.approx(0.3))
        assert diagram_violations(d) == []


@pytest.mark.slow
class TestVelocityAcceptance:
    @pytest.mark.parametrize("sigma", [0.0, 0.5, -0.5, 0.9, -0.9])
    def test_pinning_plateau(self, fk2, sigma):
        point = velocity_at(fk2, sigma)
        assert point.pinned
        assert point.displacement < 0.05

    def test_depinned_signs(self, fk2):
        up = velocity_at(fk2, 1.8)
        down = velocity_at(fk2, -1.8)
        assert up.c > 0 and up.c > 10 * up.stderr
        assert down.c < 0 and -down.c > 10 * down.stderr

    def test_diagram_is_monotone_and_odd(self, fk2):
        d = sweep_diagram(fk2, forcing_grid(fk2, 41), jobs=4)
        assert not any(p.failed for p in d.points)
        assert diagram_violations(d) == []
        assert max(g for _, g in reflection_gaps(d, d)) <= 5e-3
        assert d.plateau is not None
        assert d.plateau[0] <= -0.9 and d.plateau[1] >= 0.9

    def test_critical_velocities(self, fk1):
        crit = critical_velocities(fk1, jobs=2)
        assert crit.c_plus.estimate > 0
        assert crit.c_minus.estimate < 0
        assert crit.c_plus.monotone and crit.c_minus.monotone
        assert crit.c_plus.bracket[0] <= crit.c_plus.estimate <= crit.c_plus.bracket[1]
        assert crit.c_minus.bracket[0] <= crit.c_minus.estimate <= crit.c_minus.bracket[1]

    def test_slope_bound_on_depinned_branch(self, fk2):
        d = sweep_diagram(fk2, forcing_grid(fk2, 8, lo=1.2, hi=1.9), jobs=4)
        report = check_slope_bound(d)
        assert report.passed, report.violations

    def test_integral_identity_improves_with_resolution(self, fk1):
        residuals = []
        for h, dt in ((0.05, 0.02), (0.025, 0.01)):
            config = WaveConfig(grid=GridSpec(h=h), evolution=EvolutionConfig(dt=dt))
            point, profile, trace = run_wave(fk1, 0.8, config)
            residual = integral_identity(trace, profile, fk1)
            assert residual <= 0.02 * abs(point.c)
            residuals.append(residual)
        assert residuals[1] < residuals[0]

    def test_initial_data_independence(self, fk2):
        logistic = velocity_at(fk2, 1.5, WaveConfig(initial="logistic"))
        ramp = velocity_at(fk2, 1.5, WaveConfig(initial="ramp"))
        assert abs(logistic.c - ramp.c) <= max(3 * (logistic.stderr + ramp.stderr), 1e-3)

    def test_velocity_comparison(self, fk2):
        result = compare_velocities(fk2, 1.6, 1.2)
        assert result.sigma_1 == 1.2
        assert result.holds
