"""Canonical text printer for programs."""
from typing import Dict, List
from accel_config_toolkit.ir.ir_types import Block, Operation, Program, Value

# two spaces per nesting level
INDENT = "  "


class _Namer:
    """Numbers values %0, %1, ... in definition order within one function."""

    def __init__(self):
        self.names: Dict[Value, str] = {}

    def define(self, value: Value) -> str:
        name = f"%{len(self.names)}"
        self.names[value] = name
        return name

    def use(self, value: Value) -> str:
        # unverified input may use a value before its definition
        return self.names.get(value) or self.define(value)


def _type_list(values) -> str:
    return ", ".join(str(value.type) for value in values)


def _fields(pairs, namer: _Namer) -> str:
    return ", ".join(f"{name} = {namer.use(value)}" for name, value in pairs)


def _print_block_ops(block: Block, namer: _Namer, depth: int, lines: List[str]):
    for op in block.ops:
        _print_op(op, namer, depth, lines)


def _print_op(op: Operation, namer: _Namer, depth: int, lines: List[str]):
    pad = INDENT * depth
    # results are numbered before region arguments
    result_names = ", ".join(namer.define(result) for result in op.results)
    prefix = f"{pad}{result_names} = " if op.results else pad
    kind = op.kind

    if kind == "const":
        lines.append(f"{prefix}const {op.attributes['value']} : {op.result.type}")
    elif kind == "arith":
        lhs, rhs = (namer.use(v) for v in op.operands)
        lines.append(f"{prefix}{op.attributes['op']} {lhs}, {rhs} : {op.result.type}")
    elif kind == "setup":
        text = f"{prefix}setup \"{op.accel}\" ({_fields(op.setup_fields(), namer)})"
        if op.setup_input() is not None:
            text += f" from {namer.use(op.setup_input())}"
        lines.append(f"{text} : {op.result.type}")
    elif kind == "launch":
        text = f"{prefix}launch {namer.use(op.launch_state())}"
        if op.field_names:
            text += f" ({_fields(op.launch_fields(), namer)})"
        ops = op.launch_ops()
        text += f" ops = {ops if isinstance(ops, int) else namer.use(ops)}"
        lines.append(f"{text} : {op.result.type}")
    elif kind == "await":
        lines.append(f"{prefix}await {namer.use(op.operands[0])}")
    elif kind == "yield":
        values = ", ".join(namer.use(v) for v in op.operands)
        lines.append(f"{prefix}yield {values}".rstrip())
    elif kind == "extern-call":
        args = ", ".join(namer.use(v) for v in op.operands)
        text = f"{prefix}call @{op.attributes['callee']}({args})"
        if op.effects is not None:
            text += f" effects = {op.effects}"
        if op.attributes.get("cycles"):
            text += f" cycles = {op.attributes['cycles']}"
        if op.results:
            text += f" : {_type_list(op.results)}"
        lines.append(text)
    elif kind == "host-work":
        lines.append(f"{prefix}host_work cycles = {op.attributes['cycles']}")
    elif kind == "for":
        body = op.body
        iv = namer.define(body.arguments[0])
        text = (f"{prefix}for {iv} = {op.attributes['lower']} to {op.attributes['upper']} "
                f"step {op.attributes['step']}")
        if len(body.arguments) > 1:
            bindings = ", ".join(
                f"{namer.define(arg)} = {namer.use(init)}"
                for arg, init in zip(body.arguments[1:], op.operands))
            text += f" iter({bindings})"
        lines.append(f"{text} : {body.arguments[0].type} {{")
        _print_block_ops(body, namer, depth + 1, lines)
        lines.append(f"{pad}}}")
    elif kind == "if":
        text = f"{prefix}if {namer.use(op.operands[0])}"
        if op.results:
            text += f" : {_type_list(op.results)}"
        lines.append(f"{text} {{")
        _print_block_ops(op.then_block, namer, depth + 1, lines)
        lines.append(f"{pad}}} else {{")
        _print_block_ops(op.else_block, namer, depth + 1, lines)
        lines.append(f"{pad}}}")


def print_program(program: Program) -> str:
    """Function to render a program in canonical text form.

    Args:
        program (Program): program to print.

    Returns:
        str: text ending in a newline, empty for an empty program.
    """
    lines: List[str] = [f"accel \"{name}\"" for name in program.accelerators]
    for function in program.functions:
        namer = _Namer()
        lines.append(f"func @{function.name}() {{")
        _print_block_ops(function.body, namer, 1, lines)
        lines.append("}")
    return "\n".join(lines) + "\n" if lines else ""
