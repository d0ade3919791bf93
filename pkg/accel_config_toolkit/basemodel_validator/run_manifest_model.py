"""Pydantic basemodel for a CLI run manifest."""
import os
from typing import List, Literal, Optional
from pydantic import BaseModel, Field, model_validator


# everything one CLI sub-command needs to run
class RunManifest(BaseModel):
    """Program source, descriptors, pass selection and output options."""
    # exactly one of program_path / spec
    program_path: Optional[str] = Field(None, description="Path of a textual IR program.")
    spec: Optional[str] = Field(None, description="Benchmark spec path or shipped short name.")
    size: Optional[int] = Field(None, gt=0, description="Square size override for the spec.")
    sizes: List[int] = Field(default_factory=list, description="Sweep sizes for report.")
    # resolved descriptor paths
    descriptors: List[str] = Field(default_factory=list)
    passes: List[str] = Field(default_factory=list)
    output_format: Literal["text", "json", "csv"] = "text"
    out_dir: Optional[str] = None
    timeline: Optional[str] = None
    seed: Optional[int] = None

    @model_validator(mode="after")
    def validate_sources(self):
        """Ensure one program source and that referenced files exist."""
        if (self.program_path is None) == (self.spec is None):
            raise ValueError("exactly one of --program or --spec is required")
        if self.program_path is not None and not os.path.isfile(self.program_path):
            raise ValueError(f"program file not found: {self.program_path}")
        for path in self.descriptors:
            if not os.path.isfile(path):
                raise ValueError(f"descriptor file not found: {path}")
        if any(size <= 0 for size in self.sizes):
            raise ValueError("sweep sizes must be positive")
        return self
