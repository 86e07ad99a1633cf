import csv
import math

import pytest

from fkwave.core.errors import AxiomViolation, InputError
from fkwave.repo.results_repo import (
    DIAGRAM_COLUMNS,
    format_cell,
    write_diagram,
    write_hull,
    write_trace,
)
from fkwave.repo.spec_repo import dump_spec, load_spec, resolve_spec
from fkwave.schemas.analysis import Diagram, DiagramPoint
from fkwave.schemas.fronts import FrontTrace
from fkwave.schemas.hull import HullResult

NEXT_NEAREST_YAML = """\
kind: affine_local
theta: 0.5
shifts: [0, 1, -1, 2, -2]
coefficients: [-2.5, 1, 1, 0.25, 0.25]
local:
  harmonics: {cos: [-0.8]}
"""

NEGATIVE_NEIGHBOUR_YAML = """\
kind: affine_local
theta: 0.5
shifts: [0, 1, -1]
coefficients: [-2, -1, 3]
local:
  harmonics: {cos: [-1.0]}
"""


class TestSpecRepo:
    def test_load_valid_spec(self, tmp_path, next_nearest):
        path = tmp_path / "nn.yaml"
        path.write_text(NEXT_NEAREST_YAML)
        assert load_spec(path) == next_nearest

    def test_dump_then_load(self, tmp_path, next_nearest):
        path = tmp_path / "out.yaml"
        dump_spec(next_nearest, path)
        assert "r_star" not in path.read_text()
        assert load_spec(path) == next_nearest

    def test_axiom_is_named(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text(NEGATIVE_NEIGHBOUR_YAML)
        with pytest.raises(AxiomViolation) as e:
            load_spec(path)
        assert e.value.axiom == "Monotonicity"

    def test_structure_errors(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("kind: fk\ntheta: 0.5\nshifts: [0, 1, -1]\n")
        with pytest.raises(AxiomViolation) as e:
            load_spec(path)
        assert e.value.axiom == "Structure"

    @pytest.mark.parametrize("text", ["- 1\n- 2\n", "kind: [unclosed\n"])
    def test_unreadable_files(self, tmp_path, text):
        path = tmp_path / "bad.yaml"
        path.write_text(text)
        with pytest.raises(InputError):
            load_spec(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError):
            load_spec(tmp_path / "absent.yaml")

    def test_resolve_requires_a_source(self):
        with pytest.raises(InputError):
            resolve_spec(None, None)

    def test_resolve_builtin(self):
        assert resolve_spec(2.0, None).beta == 2.0


class TestResultsRepo:
    def test_seventeen_significant_digits(self):
        assert format_cell(0.1) == "0.10000000000000001"
        assert float(format_cell(1 / 3)) == 1 / 3

    def test_cells(self):
        assert format_cell(True) == "true"
        assert format_cell(False) == "false"
        assert format_cell(3) == "3"
        assert format_cell(math.nan) == "nan"

    def test_diagram_csv(self, tmp_path):
        points = [
            DiagramPoint(sigma=-0.5, c=0.0, stderr=0.0, pinned=True, m_sigma=-0.3, b_sigma=0.3),
            DiagramPoint(sigma=1.8, c=0.123456789012345678, stderr=1e-5, pinned=False, m_sigma=-0.1, b_sigma=0.1),
            DiagramPoint(
                sigma=1.9, c=math.nan, stderr=math.nan, pinned=False,
                m_sigma=math.nan, b_sigma=math.nan, failed=True, error="domain exhausted",
            ),
        ]
        path = write_diagram(Diagram(points=points, K_mono=0.2), tmp_path / "nested" / "diagram.csv")
        with open(path) as f:
            rows = list(csv.reader(f))
        assert tuple(rows[0]) == DIAGRAM_COLUMNS
        assert rows[0][-1] == "failed"
        assert rows[1][3] == "true"
        assert float(rows[2][1]) == points[1].c
        assert [r[-1] for r in rows[1:]] == ["false", "false", "true"]
        assert rows[3][:2] == ["1.8999999999999999", "nan"]

    def test_hull_and_trace_headers(self, tmp_path):
        hull = write_hull(
            [HullResult(p=0.5, sigma=0.0, lambda_p=0.0, fit_residual=0.0, converged=True, amplitude=0.4)],
            tmp_path / "hull.csv",
        )
        assert hull.read_text().splitlines() == ["p,sigma,lambda_p,residual,converged", "0.5,0,0,0,true"]
        trace = write_trace(FrontTrace(t=[0.0, 1.0], xi=[0.0, 0.25], level=0.5), tmp_path / "trace.csv")
        assert trace.read_text().splitlines()[0] == "t,xi"
