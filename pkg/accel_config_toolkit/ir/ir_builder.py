"""Constructors for every operation kind plus an insertion-point Builder."""
from typing import Optional, Sequence, Tuple, Union
from accel_config_toolkit.errors import IRTypeError
from accel_config_toolkit.ir.ir_types import (
    ARITH_KINDS, Block, IntegerType, Operation, StateType, TokenType, Value)


def mask(value: int, width: int) -> int:
    """Wrap an integer to `width` bits, unsigned."""
    return value & ((1 << width) - 1)


def const_op(value: int, width: int = 32) -> Operation:
    return Operation("const", (), [IntegerType(width)], {"value": mask(value, width)})


def arith_op(op: str, lhs: Value, rhs: Value) -> Operation:
    if op not in ARITH_KINDS:
        raise IRTypeError(f"unknown arithmetic op '{op}'")
    return Operation("arith", (lhs, rhs), [lhs.type], {"op": op})


def setup_op(accel: str, pairs: Sequence[Tuple[str, Value]], input_state: Optional[Value] = None) -> Operation:
    """Setup writing `pairs` on top of `input_state`."""
    op = Operation("setup", (), [StateType(accel)], {"accel": accel, "fields": []})
    op.set_setup(pairs, input_state)
    return op


def launch_op(state: Value, ops: Union[int, Value], pairs: Sequence[Tuple[str, Value]] = ()) -> Operation:
    """Launch of `state` with optional launch-semantic field writes."""
    accel = state.type.accel
    operands = [state] + [value for _, value in pairs]
    attributes = {"accel": accel, "fields": [name for name, _ in pairs], "ops": None}
    if isinstance(ops, Value):
        operands.append(ops)
    else:
        attributes["ops"] = int(ops)
    return Operation("launch", operands, [TokenType(accel)], attributes)


def await_op(token: Value) -> Operation:
    return Operation("await", (token,))


def for_op(lower: int, upper: int, step: int, inits: Sequence[Value] = (), iv_width: int = 32) -> Operation:
    """Loop over [lower, upper) whose body block carries (iv, *iter args)."""
    body = Block([IntegerType(iv_width)] + [v.type for v in inits])
    return Operation(
        "for", inits, [v.type for v in inits],
        {"lower": lower, "upper": upper, "step": step, "iv_width": iv_width},
        regions=[body])


def if_op(condition: Value, result_types=()) -> Operation:
    return Operation("if", (condition,), result_types, regions=[Block(), Block()])


def yield_op(values: Sequence[Value] = ()) -> Operation:
    return Operation("yield", values)


def call_op(callee: str, args: Sequence[Value] = (), result_types=(), effects: Optional[str] = None, cycles: int = 0) -> Operation:
    return Operation("extern-call", args, result_types, {"callee": callee, "cycles": cycles}, effects=effects)


def host_work_op(cycles: int) -> Operation:
    return Operation("host-work", (), (), {"cycles": cycles})


# builder with an insertion point
class Builder:
    """Appends operations to a block and hands back their results."""

    def __init__(self, block: Block):
        self.block = block

    def insert(self, op: Operation) -> Operation:
        return self.block.append(op)

    def const(self, value: int, width: int = 32) -> Value:
        return self.insert(const_op(value, width)).result

    def arith(self, op: str, lhs: Value, rhs: Value) -> Value:
        return self.insert(arith_op(op, lhs, rhs)).result

    def setup(self, accel: str, pairs, input_state: Optional[Value] = None) -> Value:
        return self.insert(setup_op(accel, pairs, input_state)).result

    def launch(self, state: Value, ops, pairs=()) -> Value:
        return self.insert(launch_op(state, ops, pairs)).result

    def await_(self, token: Value) -> Operation:
        return self.insert(await_op(token))

    def for_(self, lower: int, upper: int, step: int = 1, inits=(), iv_width: int = 32) -> Operation:
        return self.insert(for_op(lower, upper, step, inits, iv_width))

    def if_(self, condition: Value, result_types=()) -> Operation:
        return self.insert(if_op(condition, result_types))

    def yield_(self, values=()) -> Operation:
        return self.insert(yield_op(values))

    def call(self, callee: str, args=(), result_types=(), effects: Optional[str] = None, cycles: int = 0) -> Operation:
        return self.insert(call_op(callee, args, result_types, effects, cycles))

    def host_work(self, cycles: int) -> Operation:
        return self.insert(host_work_op(cycles))
