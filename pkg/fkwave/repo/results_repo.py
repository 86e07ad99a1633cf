"""
Flat-file results. Every CSV starts with a header row; numbers carry 17
significant digits so a file read back reproduces the doubles exactly.
"""

import csv
import logging
from pathlib import Path
from typing import Iterable, Sequence

from fkwave.config import CSV_DIGITS
from fkwave.schemas.analysis import Diagram
from fkwave.schemas.evolution import GridProfile
from fkwave.schemas.fronts import FrontTrace
from fkwave.schemas.hull import BranchRow, HullResult

logger = logging.getLogger(__name__)

DIAGRAM_COLUMNS = ("sigma", "c", "stderr", "pinned", "m_sigma", "b_sigma", "failed")
PROFILE_COLUMNS = ("z", "u")
TRACE_COLUMNS = ("t", "xi")
HULL_COLUMNS = ("p", "sigma", "lambda_p", "residual", "converged")
BRANCH_COLUMNS = ("p", "sigma_lo", "sigma_hi", "sigma_mid", "gap")


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return f"{float(value):.{CSV_DIGITS}g}"
    return str(value)


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])
            count += 1
    logger.info(f"Wrote {count} rows to {path}")
    return path


def write_diagram(diagram: Diagram, path: Path) -> Path:
    """Failed rows keep their sigma, carry NaN numbers and failed=true."""
    return write_csv(
        path,
        DIAGRAM_COLUMNS,
        (
            (p.sigma, p.c, p.stderr, p.pinned, p.m_sigma, p.b_sigma, p.failed)
            for p in diagram.points
        ),
    )


def write_profile(profile: GridProfile, path: Path) -> Path:
    return write_csv(path, PROFILE_COLUMNS, zip(profile.z.tolist(), profile.values.tolist()))


def write_trace(trace: FrontTrace, path: Path) -> Path:
    return write_csv(path, TRACE_COLUMNS, trace.samples)


def write_hull(results: Iterable[HullResult], path: Path) -> Path:
    return write_csv(
        path,
        HULL_COLUMNS,
        ((r.p, r.sigma, r.lambda_p, r.fit_residual, r.converged) for r in results),
    )


def write_branch(rows: Iterable[BranchRow], path: Path) -> Path:
    return write_csv(
        path,
        BRANCH_COLUMNS,
        ((r.p, r.sigma_lo, r.sigma_hi, r.sigma_mid, r.gap) for r in rows),
    )
