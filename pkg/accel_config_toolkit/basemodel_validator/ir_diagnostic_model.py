"""Pydantic basemodel for verifier diagnostics."""
from typing import Literal
from pydantic import BaseModel, Field

# rule ids reported by the verifier
DiagnosticRule = Literal[
    "dominance",
    "type",
    "attribute",
    "undeclared-accel",
    "duplicate-field",
    "live-state",
    "double-await",
    "yield-mismatch",
    "redefinition",
]


class Diagnostic(BaseModel):
    """One verifier finding."""
    rule: DiagnosticRule = Field(..., description="Violated rule id.")
    message: str
    # e.g. "@main/3/body/1 (setup)"
    location: str

    def __str__(self):
        return f"[{self.rule}] {self.location}: {self.message}"
