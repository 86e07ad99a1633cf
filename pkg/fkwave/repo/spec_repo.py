import logging
from pathlib import Path

import yaml
from pydantic import ValidationError

from fkwave.core.errors import AxiomViolation, InputError
from fkwave.schemas.nonlinearity import NonlinearitySpec
from fkwave.solver.nonlinearity import fk_spec, validate

logger = logging.getLogger(__name__)


def load_spec(path: Path) -> NonlinearitySpec:
    """
    Read a nonlinearity spec from YAML and run every validation axiom on it.

    Example:
        kind: affine_local
        theta: 0.5
        shifts: [0, 1, -1, 2, -2]
        coefficients: [-2.5, 1, 1, 0.25, 0.25]
        local:
          harmonics: {cos: [-0.8]}
    """
    try:
        with open(path, "r") as f:
            raw = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        raise InputError(f"cannot read spec file {path}: {e}") from e
    if not isinstance(raw, dict):
        raise InputError(f"spec file {path} must hold a mapping, got {type(raw).__name__}")

    try:
        spec = NonlinearitySpec.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"]) or "spec"
        raise AxiomViolation("Structure", f"{where}: {first['msg']}") from e

    logger.info(f"Loaded {spec.label} from {path}")
    return validate(spec)


def dump_spec(spec: NonlinearitySpec, path: Path) -> None:
    data = spec.model_dump(mode="json", exclude_defaults=True, exclude={"r_star"})
    with open(path, "w") as f:
        yaml.safe_dump(data, f, sort_keys=False)


def resolve_spec(fk_beta: float | None, spec_path: Path | None) -> NonlinearitySpec:
    if spec_path is not None:
        return load_spec(spec_path)
    if fk_beta is None:
        raise InputError("no operator given: pass --fk-beta or --spec")
    return validate(fk_spec(fk_beta))
