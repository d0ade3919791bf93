"""Pydantic basemodel for an ordered pass selection."""
from typing import List
from pydantic import BaseModel, Field, field_validator
from accel_config_toolkit.errors import PipelineConfigError

# every selectable pass, by CLI name
PASS_NAMES = ("canonicalize", "trace", "hoist-if", "hoist-loop", "dedup", "cleanup", "pipeline", "overlap")

# order used by --all
CANONICAL_ORDER = (
    "canonicalize", "trace", "hoist-if", "hoist-loop", "dedup", "cleanup", "pipeline", "overlap", "cleanup")

# (earlier, later) pairs that must keep this order when both are selected
ORDER_RULES = (("trace", "dedup"), ("dedup", "pipeline"), ("dedup", "overlap"))


class PassPipeline(BaseModel):
    """Ordered pass names plus the overlap switch."""

    passes: List[str] = Field(default_factory=list, description="Pass names in execution order.")
    enable_overlap: bool = Field(True, description="Run pipeline/overlap on concurrent accelerators.")

    @field_validator("passes")
    @classmethod
    def validate_passes(cls, value: List[str]) -> List[str]:
        """Reject unknown names and ordering violations."""
        for name in value:
            if name not in PASS_NAMES:
                raise PipelineConfigError(f"unknown pass '{name}', expected one of {', '.join(PASS_NAMES)}")
        for earlier, later in ORDER_RULES:
            if earlier in value and later in value and value.index(earlier) > value.index(later):
                raise PipelineConfigError(f"pass '{earlier}' must run before '{later}'")
        return value

    @classmethod
    def parse(cls, text: str, enable_overlap: bool = True) -> "PassPipeline":
        """Build a pipeline from the flag syntax "trace,dedup" ("all" expands to the canonical order)."""
        names = [name.strip() for name in (text or "").split(",") if name.strip()]
        if names == ["all"]:
            names = list(CANONICAL_ORDER)
        return cls(passes=names, enable_overlap=enable_overlap)

    @classmethod
    def full(cls) -> "PassPipeline":
        return cls(passes=list(CANONICAL_ORDER))
