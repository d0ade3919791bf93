"""Pydantic basemodels for accelerator descriptor files."""
import re
from typing import List, Literal, Optional
from pydantic import BaseModel, ConfigDict, Field, field_validator

# field names are plain identifiers so they print unquoted in the IR
FIELD_NAME_PATTERN = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


# one configuration register
class FieldSpec(BaseModel):
    """A named configuration register and its width in bytes."""
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    # register name as used by setup operations
    name: str = Field(..., description="Field name, unique within a descriptor.")

    # width in bytes, written as "bytes" in the descriptor file
    width: int = Field(..., alias="bytes", ge=1, le=8, description="Field width in bytes (1..8).")

    @field_validator("name")
    @classmethod
    def validate_name(cls, value: str) -> str:
        """Ensure the field name is an identifier."""
        if not FIELD_NAME_PATTERN.match(value):
            raise ValueError(f"field name '{value}' is not an identifier")
        return value


# host and accelerator costs
class CostModel(BaseModel):
    """Host-side cycle costs used by the simulator.

    A setup of n field writes costs ceil(n / write_group) * write_cost cycles.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    # cycles per (grouped) register write, fractional values are rejected
    write_cost: int = Field(..., gt=0, description="Cycles per group of field writes.")
    # cycles per pure host arithmetic operation
    arith_cost: int = Field(3, ge=0, description="Cycles per pure host op.")
    # cycles to issue one launch
    launch_cost: int = Field(1, ge=0, description="Cycles to issue a launch.")
    # cycles charged when an await finds the job already finished
    await_poll_cost: int = Field(0, ge=0, description="Cycles of an await on an idle accelerator.")
    # number of consecutive field writes charged as one write
    write_group: int = Field(1, ge=1, description="Field writes per charged write.")


# full descriptor file
class AcceleratorDescriptor(BaseModel):
    """Accelerator registers, configuration scheme and cost model."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = Field(..., min_length=1, description="Accelerator name as declared in programs.")
    scheme: Literal["sequential", "concurrent"] = Field(
        ..., description="Configuration scheme driving the simulator semantics.")
    peak_perf: float = Field(..., gt=0, description="Peak performance in ops/cycle.")
    mem_bandwidth: Optional[float] = Field(
        None, gt=0, description="Memory bandwidth in bytes/cycle, roofsurface only.")
    fields: List[FieldSpec] = Field(..., min_length=1, description="Configuration registers.")
    cost: CostModel

    @field_validator("fields")
    @classmethod
    def validate_unique_fields(cls, value: List[FieldSpec]) -> List[FieldSpec]:
        """Ensure field names are unique."""
        seen = set()
        for field_spec in value:
            if field_spec.name in seen:
                raise ValueError(f"duplicate field name '{field_spec.name}'")
            seen.add(field_spec.name)
        return value

    @property
    def field_names(self) -> List[str]:
        return [f.name for f in self.fields]

    def field_width(self, name: str) -> Optional[int]:
        """Width in bytes of a declared field, None if undeclared."""
        for field_spec in self.fields:
            if field_spec.name == name:
                return field_spec.width
        return None
