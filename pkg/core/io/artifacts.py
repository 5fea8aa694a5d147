"""Loading and dumping JSON artifacts."""

import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import ValidationError as SchemaError

from core.io.schemas import (
    BoxUnionModel, KernelMatrixModel, PolyMeasureModel, RawCylinderTableModel, SetFunctionModel
)
from core.measure.diagbox import BoxUnion
from core.measure.interference import SetFunction
from core.measure.kernel import KernelMatrix
from core.measure.polymeasure import PolyMeasure, RawCylinderTable
from core.security.input_validation import ValidationError

logger = logging.getLogger(__name__)

Artifact = Union[SetFunction, PolyMeasure, RawCylinderTable, BoxUnion, KernelMatrix]

# kind -> (schema, domain type)
ARTIFACT_KINDS: Dict[str, tuple] = {
    "setfn": (SetFunctionModel, SetFunction),
    "polymeasure": (PolyMeasureModel, PolyMeasure),
    "cylinder-table": (RawCylinderTableModel, RawCylinderTable),
    "boxes": (BoxUnionModel, BoxUnion),
    "kernel": (KernelMatrixModel, KernelMatrix),
}


class ArtifactError(ValidationError):
    """Malformed JSON, with the position of the problem."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        super().__init__(message)
        self.line = line
        self.column = column


def parse_json(text: str) -> Any:
    """
    Parse JSON text.

    Raises:
        ArtifactError: With line and column on malformed input
    """
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ArtifactError(f"malformed JSON: {e.msg}", e.lineno, e.colno)


def read_json(path: str) -> Any:
    """Read and parse a JSON file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ValidationError(f"Cannot read {path}: {e.strerror}")
    return parse_json(text)


def detect_kind(data: Any) -> str:
    """Guess the artifact kind from its top-level keys."""
    if not isinstance(data, dict):
        raise ValidationError("An artifact must be a JSON object")
    if "values" in data:
        return "setfn"
    if "tensor" in data:
        return "polymeasure"
    if "boxes" in data:
        return "boxes"
    if "entries" in data:
        return "cylinder-table" if "factors" in data else "kernel"
    raise ValidationError("Unrecognized artifact: expected values, tensor, entries or boxes")


def _schema_message(error: SchemaError) -> str:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first.get("loc", ()))
    return f"{location}: {first.get('msg')}" if location else str(first.get("msg"))


def parse_artifact(data: Any, kind: Optional[str] = None) -> Artifact:
    """
    Validate an artifact against its schema and build the domain value.

    Args:
        data: Parsed JSON
        kind: Expected kind, or None to detect it

    Raises:
        ValidationError: On schema or domain violations
    """
    detected = detect_kind(data)
    if kind is not None and detected != kind:
        raise ValidationError(f"Expected a {kind} artifact, got {detected}")
    schema, domain = ARTIFACT_KINDS[detected]
    try:
        model = schema.model_validate(data)
    except SchemaError as e:
        raise ValidationError(_schema_message(e))
    return domain.from_dict(model.model_dump(exclude={"meta"}))


def load_artifact(path: str, kind: Optional[str] = None) -> Artifact:
    """Read, validate and build an artifact from a file."""
    artifact = parse_artifact(read_json(path), kind)
    logger.debug(f"Loaded {type(artifact).__name__} from {path}")
    return artifact


def dump_json(data: Any) -> str:
    """Deterministic JSON text (insertion-ordered keys, two-space indent)."""
    return json.dumps(data, indent=2) + "\n"


def write_output(text: str, path: Optional[str] = None):
    """Write to a file, or to stdout when path is None."""
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8")
    logger.info(f"Wrote {path}")
