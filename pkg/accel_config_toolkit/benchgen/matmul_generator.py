"""Tiled matrix-multiplication program generator.

Weight-stationary loop nest over output tiles (i, j) with the reduction tile
k innermost. The generated code is deliberately unoptimized: the innermost
body recomputes every loop-dependent field, constants included, and writes
all mapped fields in one setup before each launch.
"""
import json
import os
from typing import Dict, List, Optional, Sequence, Tuple, Union
from loguru import logger
from pydantic import ValidationError
from accel_config_toolkit import settings
from accel_config_toolkit.basemodel_validator.descriptor_model import AcceleratorDescriptor
from accel_config_toolkit.basemodel_validator.matmul_spec_model import FieldMapEntry, MatmulSpec
from accel_config_toolkit.errors import MatmulSpecError
from accel_config_toolkit.ir.ir_builder import Builder
from accel_config_toolkit.ir.ir_types import Block, Function, Program, Value

# host integer width of all generated arithmetic
VALUE_WIDTH = 64

# loop variables, outermost first
LOOP_ORDER = ("i", "j", "k")

# src roles that are loop variables
LOOP_ROLES = ("i", "j", "k")

# loop variables every matrix tile address depends on
ADDRESS_DIMS = {"A": ("i", "k"), "B": ("j", "k"), "C": ("i", "j"), "D": ("i", "j")}


def load_matmul_spec(text: Union[str, bytes], descriptor: Optional[AcceleratorDescriptor] = None) -> MatmulSpec:
    """Function to parse and validate a benchmark spec.

    Args:
        text (str): JSON text of the spec.
        descriptor (AcceleratorDescriptor): optional, mapped fields must be declared by it.

    Returns:
        MatmulSpec: validated spec.
    """
    try:
        spec = MatmulSpec.model_validate(json.loads(text))
    except json.JSONDecodeError as error:
        raise MatmulSpecError(f"spec is not valid JSON: {error}") from error
    except ValidationError as error:
        raise MatmulSpecError(f"invalid matmul spec: {error}") from error
    if descriptor is not None:
        check_spec_fields(spec, descriptor)
    return spec


def check_spec_fields(spec: MatmulSpec, descriptor: AcceleratorDescriptor):
    """Every mapped field must be a register of the descriptor."""
    for entry in spec.field_map:
        if descriptor.field_width(entry.field) is None:
            raise MatmulSpecError(f"field '{entry.field}' is not declared by accelerator {descriptor.name}")


def resolve_matmul_spec(name_or_path: str, descriptor: Optional[AcceleratorDescriptor] = None) -> MatmulSpec:
    """Load a spec from a path or a shipped short name like "opengemm-like-matmul"."""
    path = name_or_path
    if not os.path.isfile(path):
        path = os.path.join(settings.BENCH_SPEC_DIR, f"{name_or_path}.json")
        if not os.path.isfile(path):
            raise MatmulSpecError(f"matmul spec not found: {name_or_path}")
    logger.info(f"Loading matmul spec from {os.path.basename(path)}")
    with open(path, encoding="utf-8") as handle:
        return load_matmul_spec(handle.read(), descriptor)


def entry_sources(entry: FieldMapEntry) -> List[str]:
    """Loop variables a field value is computed from."""
    if entry.role == "addr":
        return list(ADDRESS_DIMS[entry.matrix])
    if entry.role == "packed":
        return [part.src_role for part in entry.pack if part.src_role in LOOP_ROLES]
    return []


class TiledMatmulGenerator:
    """Builds the loop-nest program of one spec."""

    def __init__(self, spec: MatmulSpec, accel: str):
        self.spec = spec
        self.accel = accel
        self.trips = {"i": spec.M // spec.tile_m, "j": spec.N // spec.tile_n, "k": spec.K // spec.tile_k}
        # loops with a single iteration are not emitted
        self.loops = [name for name in LOOP_ORDER if self.trips[name] > 1]

    # 1. per-role value emission
    def address_coefficient(self, matrix: str, var: str) -> int:
        spec, elem = self.spec, self.spec.element_bytes
        coefficients = {
            "A": {"i": spec.tile_m * spec.K, "k": spec.tile_k},
            "B": {"k": spec.tile_k * spec.N, "j": spec.tile_n},
            "C": {"i": spec.tile_m * spec.N, "j": spec.tile_n},
            "D": {"i": spec.tile_m * spec.N, "j": spec.tile_n},
        }
        return coefficients[matrix][var] * elem

    def scalar(self, role: str) -> int:
        spec = self.spec
        return {"tile_m": spec.tile_m, "tile_n": spec.tile_n, "tile_k": spec.tile_k,
                "M": spec.M, "N": spec.N, "K": spec.K}[role]

    def emit_value(self, builder: Builder, entry: FieldMapEntry, ivs: Dict[str, Value]) -> Value:
        spec = self.spec
        if entry.role == "addr":
            # base + sum(iv * coefficient), base first so partial sums are loop-invariant
            value = builder.const(spec.base_addresses.get(entry.matrix, 0), VALUE_WIDTH)
            for var in ADDRESS_DIMS[entry.matrix]:
                if var in ivs:
                    term = builder.arith("mul", ivs[var], builder.const(self.address_coefficient(entry.matrix, var), VALUE_WIDTH))
                    value = builder.arith("add", value, term)
            return value
        if entry.role == "stride":
            row = spec.K if entry.matrix == "A" else spec.N
            return builder.const(row * spec.element_bytes, VALUE_WIDTH)
        if entry.role == "size":
            return builder.const({"m": spec.tile_m, "n": spec.tile_n, "k": spec.tile_k}[entry.dim], VALUE_WIDTH)
        # packed: or of shifted sub-fields
        value = None
        for part in entry.pack:
            if part.src_role in LOOP_ROLES:
                if part.src_role not in ivs:
                    # a loop with one iteration contributes index 0
                    continue
                source = ivs[part.src_role]
            else:
                source = builder.const(self.scalar(part.src_role), VALUE_WIDTH)
            if part.shift_bits:
                source = builder.arith("shl", source, builder.const(part.shift_bits, VALUE_WIDTH))
            value = source if value is None else builder.arith("or", value, source)
        return value if value is not None else builder.const(0, VALUE_WIDTH)

    # 2. program
    def generate(self) -> Program:
        body = Block()
        builder = Builder(body)
        globals_: Dict[str, Value] = {}
        for entry in self.spec.field_map:
            if entry.loop_dependent:
                continue
            if entry.role == "addr" or entry_sources(entry):
                raise MatmulSpecError(f"field '{entry.field}' depends on the loop nest but is marked global")
            globals_[entry.field] = self.emit_value(builder, entry, {})
        if globals_:
            builder.setup(self.accel, list(globals_.items()))
        # loop nest
        ivs: Dict[str, Value] = {}
        inner = builder
        for name in self.loops:
            loop = inner.for_(0, self.trips[name], 1, iv_width=VALUE_WIDTH)
            ivs[name] = loop.induction_var
            inner = Builder(loop.body)
        pairs: List[Tuple[str, Value]] = []
        for entry in self.spec.field_map:
            value = globals_[entry.field] if not entry.loop_dependent else self.emit_value(inner, entry, ivs)
            pairs.append((entry.field, value))
        state = inner.setup(self.accel, pairs)
        token = inner.launch(state, self.spec.launch_ops())
        inner.await_(token)
        # close every loop body
        block = inner.block
        while block is not body:
            Builder(block).yield_()
            block = block.parent_op.parent
        return Program([self.accel], [Function("main", body)])


def gen_tiled_matmul(spec: MatmulSpec, accel: str, descriptor: Optional[AcceleratorDescriptor] = None) -> Program:
    """Function to generate the tiled matmul program of a spec.

    Args:
        spec (MatmulSpec): problem size, tiling and field mapping.
        accel (str): accelerator name declared by the program.
        descriptor (AcceleratorDescriptor): optional, checks the mapped fields.

    Returns:
        Program: verified loop-nest program with total ops 2*M*N*K.
    """
    if descriptor is not None:
        check_spec_fields(spec, descriptor)
    generator = TiledMatmulGenerator(spec, accel)
    logger.info(
        f"Generating {spec.name} {spec.M}x{spec.N}x{spec.K} "
        f"(tile {spec.tile_m}x{spec.tile_n}x{spec.tile_k}, loops {','.join(generator.loops) or 'none'})")
    return generator.generate()


def rescale_spec(template: MatmulSpec, size: int) -> MatmulSpec:
    """Square M = N = K = size; tile_k follows K when the template tiles the whole K."""
    tile_k = size if template.tile_k == template.K else template.tile_k
    try:
        return MatmulSpec.model_validate({**template.model_dump(), "M": size, "N": size, "K": size, "tile_k": tile_k})
    except ValidationError as error:
        raise MatmulSpecError(f"size {size} does not fit the template tiling: {error}") from error


def sweep(
        sizes: Sequence[int],
        template: MatmulSpec,
        accel: str,
        descriptor: Optional[AcceleratorDescriptor] = None) -> List[Tuple[int, Program]]:
    """Function to generate one program per square size, in ascending size order.

    Args:
        sizes (Sequence): matrix sizes.
        template (MatmulSpec): spec whose tiling and field map are reused.
        accel (str): accelerator name.
        descriptor (AcceleratorDescriptor): optional field check.

    Returns:
        list: (size, Program) pairs.
    """
    return [(size, gen_tiled_matmul(rescale_spec(template, size), accel, descriptor)) for size in sorted(sizes)]
