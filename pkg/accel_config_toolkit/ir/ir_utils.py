"""Def-use queries, cloning and structural comparison over the IR."""
from typing import Dict, List
from accel_config_toolkit.ir.ir_types import Block, Function, Operation, Program, Value


# --- accelerator effects -----------------------------------------------------
def is_clobbering_call(op: Operation) -> bool:
    """An extern-call not annotated effects=none destroys all accelerator state."""
    return op.kind == "extern-call" and op.effects != "none"


def contains_clobbering_call(op: Operation) -> bool:
    return any(is_clobbering_call(inner) for inner in op.walk())


def writes_accel(op: Operation, accel: str) -> bool:
    """True if the op is, or nests, a setup of `accel`."""
    return any(inner.kind == "setup" and inner.accel == accel for inner in op.walk())


def touches_accel(op: Operation, accel: str) -> bool:
    """True if the op (or anything nested) configures, launches, awaits or clobbers `accel`."""
    for inner in op.walk():
        if inner.kind in ("setup", "launch") and inner.accel == accel:
            return True
        if inner.kind == "await" and inner.operands[0].type.accel == accel:
            return True
        if is_clobbering_call(inner):
            return True
    return False


def accels_written(op: Operation) -> List[str]:
    """Accelerators set up anywhere inside `op`, in first-occurrence order."""
    found = []
    for inner in op.walk():
        if inner.kind == "setup" and inner.accel not in found:
            found.append(inner.accel)
    return found


# --- def-use -----------------------------------------------------------------
def value_users(root: Block, value: Value) -> List[Operation]:
    """Operations under `root` that read `value`."""
    return [op for op in root.walk() if any(operand is value for operand in op.operands)]


def use_count(root: Block, value: Value) -> int:
    return sum(1 for op in root.walk() for operand in op.operands if operand is value)


def replace_uses(root: Block, old: Value, new: Value):
    """Rewire every use of `old` under `root` to `new`."""
    for op in root.walk():
        op.operands = [new if operand is old else operand for operand in op.operands]


def root_block(op: Operation) -> Block:
    """Top-level block (function body) enclosing `op`."""
    block = op.parent
    while block.parent_op is not None and block.parent_op.parent is not None:
        block = block.parent_op.parent
    return block


def is_defined_inside(value: Value, region_op: Operation) -> bool:
    """True if `value` is defined in a region nested in `region_op`."""
    block = value.defining_block
    while block is not None:
        if block.parent_op is region_op:
            return True
        block = block.parent_op.parent if block.parent_op is not None else None
    return False


def op_path(op: Operation) -> str:
    """Position like "3/body/1" from the function body down to `op`."""
    parts = []
    current = op
    while current.parent is not None:
        block = current.parent
        parts.append(str(block.index(current)))
        owner = block.parent_op
        if owner is None:
            break
        if owner.kind == "for":
            parts.append("body")
        else:
            parts.append("then" if owner.regions[0] is block else "else")
        current = owner
    return "/".join(reversed(parts))


# --- cloning -----------------------------------------------------------------
def _copy_attributes(attributes: Dict) -> Dict:
    return {key: list(value) if isinstance(value, list) else value for key, value in attributes.items()}


def clone_op(op: Operation, value_map: Dict[Value, Value]) -> Operation:
    """Deep-copy `op`; operands are remapped through `value_map`, new results are recorded in it."""
    new_op = Operation(
        op.kind,
        [value_map.get(operand, operand) for operand in op.operands],
        [result.type for result in op.results],
        _copy_attributes(op.attributes),
        effects=op.effects)
    for old, new in zip(op.results, new_op.results):
        value_map[old] = new
    for region in op.regions:
        new_op.add_region(clone_block(region, value_map))
    return new_op


def clone_block(block: Block, value_map: Dict[Value, Value]) -> Block:
    new_block = Block([arg.type for arg in block.arguments])
    for old, new in zip(block.arguments, new_block.arguments):
        value_map[old] = new
    for op in block.ops:
        new_block.append(clone_op(op, value_map))
    return new_block


def clone_program(program: Program) -> Program:
    """Independent deep copy of a program."""
    return Program(
        list(program.accelerators),
        [Function(function.name, clone_block(function.body, {})) for function in program.functions])


# --- structural equality -----------------------------------------------------
def _blocks_equal(a: Block, b: Block, value_map: Dict[Value, Value]) -> bool:
    if len(a.arguments) != len(b.arguments) or len(a.ops) != len(b.ops):
        return False
    for arg_a, arg_b in zip(a.arguments, b.arguments):
        if arg_a.type != arg_b.type:
            return False
        value_map[arg_a] = arg_b
    return all(_ops_equal(op_a, op_b, value_map) for op_a, op_b in zip(a.ops, b.ops))


def _ops_equal(a: Operation, b: Operation, value_map: Dict[Value, Value]) -> bool:
    if (a.kind, a.effects, a.attributes) != (b.kind, b.effects, b.attributes):
        return False
    if len(a.operands) != len(b.operands) or len(a.results) != len(b.results):
        return False
    for operand_a, operand_b in zip(a.operands, b.operands):
        if value_map.get(operand_a) is not operand_b:
            return False
    for result_a, result_b in zip(a.results, b.results):
        if result_a.type != result_b.type:
            return False
        value_map[result_a] = result_b
    if len(a.regions) != len(b.regions):
        return False
    return all(_blocks_equal(ra, rb, value_map) for ra, rb in zip(a.regions, b.regions))


def structurally_equal(a: Program, b: Program) -> bool:
    """Equality modulo SSA value renaming."""
    if list(a.accelerators) != list(b.accelerators) or len(a.functions) != len(b.functions):
        return False
    for fa, fb in zip(a.functions, b.functions):
        if fa.name != fb.name or not _blocks_equal(fa.body, fb.body, {}):
            return False
    return True

