"""Canonicalization of pure host arithmetic.

Constant uniquing, common-subexpression elimination, loop-invariant code
motion out of `for` bodies and removal of unused pure ops, repeated until
nothing changes. Makes SSA identity a good stand-in for value identity before
setup deduplication.
"""
from typing import Dict, Tuple
from loguru import logger
from accel_config_toolkit.ir.ir_types import Block, Operation, Program
from accel_config_toolkit.ir.ir_utils import clone_program, is_defined_inside, replace_uses, use_count

# operand order does not matter for these
COMMUTATIVE = ("add", "mul", "and", "or", "xor")

# upper bound of canonicalization rounds per function
MAX_ROUNDS = 16


def is_pure_value_op(op: Operation) -> bool:
    return op.kind in ("const", "arith")


# 1. constants to the function entry, one per (value, type)
def unique_constants(body: Block) -> bool:
    canonical: Dict[Tuple, Operation] = {}
    constants = [op for op in body.walk() if op.kind == "const"]
    changed = False
    for op in constants:
        key = (op.attributes["value"], op.result.type)
        if key in canonical:
            replace_uses(body, op.result, canonical[key].result)
            op.erase()
            changed = True
        else:
            canonical[key] = op
    # entry order follows first appearance
    entry = list(canonical.values())
    for index, op in enumerate(entry):
        if op.parent is not body or body.ops.index(op) != index:
            op.erase()
            body.insert(index, op)
            changed = True
    return changed


# 2. scoped CSE of arith
def eliminate_common_subexpressions(block: Block, root: Block, table: Dict) -> bool:
    table = dict(table)
    changed = False
    for op in list(block.ops):
        if op.kind == "arith":
            lhs, rhs = op.operands
            if op.attributes["op"] in COMMUTATIVE and id(rhs) < id(lhs):
                lhs, rhs = rhs, lhs
            key = (op.attributes["op"], id(lhs), id(rhs), op.result.type)
            if key in table:
                replace_uses(root, op.result, table[key])
                op.erase()
                changed = True
                continue
            table[key] = op.result
        for region in op.regions:
            changed |= eliminate_common_subexpressions(region, root, table)
    return changed


# 3. hoist loop-invariant arith out of for bodies, innermost loops first
def hoist_invariant_arith(block: Block) -> bool:
    changed = False
    for op in list(block.ops):
        for region in op.regions:
            changed |= hoist_invariant_arith(region)
        if op.kind != "for":
            continue
        for inner in list(op.body.ops):
            if inner.kind == "arith" and not any(is_defined_inside(v, op) for v in inner.operands):
                inner.erase()
                block.insert_before(op, inner)
                changed = True
    return changed


# 4. drop unused pure ops
def remove_dead_pure_ops(body: Block) -> bool:
    changed = False
    progress = True
    while progress:
        progress = False
        for op in list(body.walk()):
            if is_pure_value_op(op) and use_count(body, op.result) == 0:
                op.erase()
                progress = changed = True
    return changed


def canonicalize(program: Program) -> Program:
    """Function to canonicalize pure arithmetic on a copy of the program.

    Args:
        program (Program): verified input, left untouched.

    Returns:
        Program: canonicalized copy with an unchanged launch trace.
    """
    result = clone_program(program)
    for function in result.functions:
        logger.info(f"Running canonicalize on function @{function.name}")
        body = function.body
        for round_index in range(MAX_ROUNDS):
            changed = unique_constants(body)
            changed |= eliminate_common_subexpressions(body, body, {})
            changed |= hoist_invariant_arith(body)
            changed |= remove_dead_pure_ops(body)
            if not changed:
                logger.debug(f"canonicalize @{function.name} settled after {round_index + 1} round(s)")
                break
    return result
