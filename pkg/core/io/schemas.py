"""Pydantic models for the JSON artifacts read by the CLI."""

from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, StrictInt, StrictStr, field_validator

from core.measure.scalar import parse_scalar
from core.security.input_validation import validate_atoms, validate_set_key

ScalarValue = Union[StrictStr, StrictInt]


def _check_scalar(value: Any) -> Any:
    parse_scalar(value)
    return value


class SpaceModel(BaseModel):
    """Space artifact: {"atoms": [...]}."""
    model_config = ConfigDict(extra="forbid")

    atoms: List[StrictStr]

    @field_validator("atoms")
    @classmethod
    def check_atoms(cls, atoms: List[str]) -> List[str]:
        return list(validate_atoms(atoms))


class SetFunctionModel(BaseModel):
    """Set function artifact: total table keyed by canonical set keys."""
    model_config = ConfigDict(extra="forbid")
    meta: Optional[Dict[str, Any]] = None

    space: SpaceModel
    values: Dict[str, ScalarValue]

    @field_validator("values")
    @classmethod
    def check_values(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        for key, value in values.items():
            validate_set_key(key)
            _check_scalar(value)
        return values


class PolyMeasureModel(BaseModel):
    """Polymeasure artifact: factor spaces and a nested tensor, outermost axis = slot 0."""
    model_config = ConfigDict(extra="forbid")
    meta: Optional[Dict[str, Any]] = None

    factors: List[SpaceModel] = Field(min_length=1)
    tensor: Any


class CylinderEntryModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    sets: List[StrictStr]
    value: ScalarValue

    @field_validator("sets")
    @classmethod
    def check_sets(cls, sets: List[str]) -> List[str]:
        return [validate_set_key(key) for key in sets]

    @field_validator("value")
    @classmethod
    def check_value(cls, value: Any) -> Any:
        return _check_scalar(value)


class RawCylinderTableModel(BaseModel):
    """Cylinder table artifact."""
    model_config = ConfigDict(extra="forbid")
    meta: Optional[Dict[str, Any]] = None

    factors: List[SpaceModel] = Field(min_length=1)
    entries: List[CylinderEntryModel]


class BoxModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    sides: List[Tuple[ScalarValue, ScalarValue]] = Field(min_length=1)

    @field_validator("sides")
    @classmethod
    def check_sides(cls, sides: List[Tuple[Any, Any]]) -> List[Tuple[Any, Any]]:
        for lo, hi in sides:
            _check_scalar(lo)
            _check_scalar(hi)
        return sides


class BoxUnionModel(BaseModel):
    """Box union artifact with rational endpoints as strings."""
    model_config = ConfigDict(extra="forbid")
    meta: Optional[Dict[str, Any]] = None

    dim: StrictInt = Field(ge=1)
    boxes: List[BoxModel]


class KernelMatrixModel(BaseModel):
    """Kernel artifact: size and square nested entries."""
    model_config = ConfigDict(extra="forbid")
    meta: Optional[Dict[str, Any]] = None

    n: StrictInt = Field(ge=1)
    entries: Any
