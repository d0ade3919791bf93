"""Pydantic basemodels for tiled matrix-multiplication benchmark specs."""
from typing import Dict, List, Literal, Optional
from pydantic import BaseModel, ConfigDict, Field, model_validator

# values a packed field may be composed of
PackSource = Literal["tile_m", "tile_n", "tile_k", "M", "N", "K", "i", "j", "k"]


# one sub-field of a bit-packed register
class PackPart(BaseModel):
    """Source value shifted into a packed register."""
    model_config = ConfigDict(extra="forbid")

    src_role: PackSource = Field(..., description="Value packed into the register.")
    shift_bits: int = Field(..., ge=0, le=63, description="Left shift applied before or-ing.")


# mapping of one descriptor field
class FieldMapEntry(BaseModel):
    """How the generator computes the value of one descriptor field."""
    model_config = ConfigDict(extra="forbid")

    field: str = Field(..., min_length=1, description="Descriptor field written.")
    role: Literal["addr", "stride", "size", "packed"]
    loop_dependent: bool = Field(False, description="Recomputed inside the loop nest.")
    # addr/stride need the matrix, size needs the dimension
    matrix: Optional[Literal["A", "B", "C", "D"]] = None
    dim: Optional[Literal["m", "n", "k"]] = None
    pack: Optional[List[PackPart]] = None

    @model_validator(mode="after")
    def validate_role_arguments(self):
        """Ensure every role carries the arguments it needs."""
        if self.role in ("addr", "stride") and self.matrix is None:
            raise ValueError(f"field '{self.field}': role '{self.role}' needs a matrix")
        if self.role == "size" and self.dim is None:
            raise ValueError(f"field '{self.field}': role 'size' needs a dim")
        if self.role == "packed" and not self.pack:
            raise ValueError(f"field '{self.field}': role 'packed' needs a non-empty pack list")
        return self


# benchmark spec file
class MatmulSpec(BaseModel):
    """Problem size, tiling and field mapping of a tiled matmul benchmark."""
    model_config = ConfigDict(extra="forbid")

    name: str = Field("matmul", description="Label used in reports.")
    M: int = Field(..., gt=0)
    N: int = Field(..., gt=0)
    K: int = Field(..., gt=0)
    tile_m: int = Field(..., gt=0)
    tile_n: int = Field(..., gt=0)
    tile_k: int = Field(..., gt=0)
    element_ops_per_mac: int = Field(2, gt=0, description="Accelerator ops per multiply-accumulate.")
    element_bytes: int = Field(1, gt=0, description="Bytes per matrix element for address math.")
    base_addresses: Dict[str, int] = Field(
        default_factory=lambda: {"A": 0x10000000, "B": 0x20000000, "C": 0x30000000, "D": 0x40000000},
        description="Base address per matrix.")
    field_map: List[FieldMapEntry] = Field(..., min_length=1)

    @model_validator(mode="after")
    def validate_tiling(self):
        """Ensure tiles divide the dimensions and fields are mapped once."""
        for dim, tile in (("M", "tile_m"), ("N", "tile_n"), ("K", "tile_k")):
            if getattr(self, dim) % getattr(self, tile) != 0:
                raise ValueError(f"{tile}={getattr(self, tile)} does not divide {dim}={getattr(self, dim)}")
        names = [entry.field for entry in self.field_map]
        if len(names) != len(set(names)):
            raise ValueError("field_map maps a field more than once")
        return self

    def launch_ops(self) -> int:
        """Workload of one tile launch."""
        return self.element_ops_per_mac * self.tile_m * self.tile_n * self.tile_k

    def total_ops(self) -> int:
        return self.element_ops_per_mac * self.M * self.N * self.K
