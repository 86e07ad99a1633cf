import pytest

from fkwave.cli import build_parser, main, run_config
from fkwave.core.config import get_settings

FAST = ["--h", "0.1", "--half-width", "10", "--T", "20"]

NEGATIVE_NEIGHBOUR_YAML = """\
kind: affine_local
theta: 0.5
shifts: [0, 1, -1]
coefficients: [-2, -1, 3]
local:
  harmonics: {cos: [-1.0]}
"""


class TestSettings:
    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("FKWAVE_JOBS", "3")
        monkeypatch.setenv("FKWAVE_H", "0.2")
        settings = get_settings()
        assert settings.JOBS == 3
        assert settings.H == 0.2

    def test_flags_win_over_settings(self, monkeypatch, tmp_path):
        monkeypatch.setenv("FKWAVE_H", "0.2")
        monkeypatch.setenv("FKWAVE_OUT", str(tmp_path))
        args = build_parser().parse_args(["wave", "--fk-beta", "2", "--sigma", "0", "--T", "5"])
        config = run_config(args)
        assert config.h == 0.2
        assert config.T == 5.0
        assert config.out == tmp_path
        assert config.wave_config().grid.h == 0.2


class TestInvalidInput:
    def test_malformed_list(self):
        with pytest.raises(SystemExit) as e:
            main(["hull", "--fk-beta", "2", "--p", "a,b", "--sigma", "0"])
        assert e.value.code == 2

    def test_forcing_outside_range(self, tmp_path):
        assert main(["wave", "--fk-beta", "2", "--sigma", "3", "--out", str(tmp_path)]) == 2

    def test_two_operator_sources(self, tmp_path):
        spec = tmp_path / "spec.yaml"
        spec.write_text("kind: fk\nbeta: 1\ntheta: 0.5\nshifts: [0, 1, -1]\n")
        assert main(["wave", "--fk-beta", "2", "--spec", str(spec), "--sigma", "0"]) == 2

    def test_no_operator_source(self):
        assert main(["wave", "--sigma", "0"]) == 2

    def test_axiom_failure_is_named(self, tmp_path, capsys):
        spec = tmp_path / "bad.yaml"
        spec.write_text(NEGATIVE_NEIGHBOUR_YAML)
        assert main(["verify", "--spec", str(spec), "--out", str(tmp_path)]) == 2
        assert "Monotonicity" in capsys.readouterr().out

    def test_unknown_auto_velocity(self, tmp_path):
        code = main(["branch", "--fk-beta", "1", "--c", "automatic", "--p", "0.4", "--M", "64", "--out", str(tmp_path)])
        assert code == 2

    def test_increasing_p_sequence(self, tmp_path):
        code = main(["branch", "--fk-beta", "1", "--c", "1.5", "--p", "0.1,0.2", "--M", "64", "--out", str(tmp_path)])
        assert code == 2


class TestCommands:
    def test_hull_writes_csv(self, tmp_path):
        code = main(["hull", "--fk-beta", "2", "--M", "64", "--p", "0.5", "--sigma", "0", "--out", str(tmp_path)])
        assert code == 0
        lines = (tmp_path / "hull.csv").read_text().splitlines()
        assert lines[0] == "p,sigma,lambda_p,residual,converged"
        assert len(lines) == 2
        assert lines[1].endswith(",true")

    def test_wave_writes_profile_and_trace(self, tmp_path):
        code = main(["wave", "--fk-beta", "2", "--sigma", "0", *FAST, "--out", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "profile.csv").read_text().startswith("z,u\n")
        assert (tmp_path / "trace.csv").read_text().startswith("t,xi\n")
        assert (tmp_path / "trace.svg").exists()

    def test_diagram_is_deterministic(self, tmp_path):
        outputs = []
        for run in ("a", "b"):
            out = tmp_path / run
            code = main(["diagram", "--fk-beta", "2", "--points", "3", *FAST, "--out", str(out)])
            assert code == 0
            outputs.append((out / "diagram.csv").read_bytes())
        assert outputs[0] == outputs[1]
        header = outputs[0].decode().splitlines()[0]
        assert header == "sigma,c,stderr,pinned,m_sigma,b_sigma,failed"
        assert len(outputs[0].decode().splitlines()) == 4

    @pytest.mark.slow
    def test_verify_fails_with_small_supersolution_constant(self, tmp_path):
        code = main(["verify", "--fk-beta", "0.1", "--supersolution-M", "1", "--out", str(tmp_path)])
        assert code == 1

    @pytest.mark.slow
    def test_verify_passes_for_strong_pinning(self, tmp_path):
        assert main(["verify", "--fk-beta", "2", "--out", str(tmp_path)]) == 0
