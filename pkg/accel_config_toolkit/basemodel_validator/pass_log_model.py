"""Pydantic basemodel for pass pipeline log entries."""
from typing import Optional
from pydantic import BaseModel, Field


class PassLogEntry(BaseModel):
    """Static setup counts before and after one pass."""
    pass_name: str
    setups_before: int = Field(..., ge=0)
    setups_after: int = Field(..., ge=0)
    fields_before: int = Field(..., ge=0)
    fields_after: int = Field(..., ge=0)
    # only known when descriptors are supplied
    bytes_before: Optional[int] = None
    bytes_after: Optional[int] = None
    changed: bool = False
    skipped: bool = False

    def describe(self) -> str:
        """Stable single-line rendering used by `opt`."""
        text = (
            f"{self.pass_name}: setups {self.setups_before}->{self.setups_after}, "
            f"fields {self.fields_before}->{self.fields_after}")
        if self.bytes_before is not None:
            text += f", bytes {self.bytes_before}->{self.bytes_after}"
        if self.skipped:
            text += " (skipped)"
        return text
