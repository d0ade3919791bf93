"""Parser for the textual IR.

The lark grammar turns text into plain dicts (one per operation), then
`ProgramBuilder` resolves value names scope by scope and builds the IR graph.
"""
from typing import Dict, List, Optional
import lark
from loguru import logger
from accel_config_toolkit.errors import IRNameError, IRSyntaxError, IRTypeError
from accel_config_toolkit.ir import ir_builder
from accel_config_toolkit.ir.ir_types import (
    Block, Function, IntegerType, Operation, Program, StateType, TokenType)

GRAMMAR = r"""
start: accel_decl* func*

accel_decl: "accel" STRING
func: "func" FUNC_NAME "(" ")" "{" op* "}"

op: [results] body
results: VALUE ("," VALUE)* "="
?body: const_op | arith_op | setup_op | launch_op | await_op
     | for_op | if_op | call_op | host_work_op

const_op: "const" SIGNED_INT ":" INT_TYPE
arith_op: ARITH VALUE "," VALUE ":" INT_TYPE
setup_op: "setup" STRING "(" [field_list] ")" [_FROM VALUE] ":" type
launch_op: "launch" VALUE [_LPAR [field_list] ")"] "ops" "=" ops_value ":" type
ops_value: VALUE | INT
await_op: "await" VALUE
for_op: "for" VALUE "=" SIGNED_INT "to" SIGNED_INT "step" SIGNED_INT [_ITER "(" [binding_list] ")"] ":" INT_TYPE region
if_op: "if" VALUE [_COLON type_list] region "else" region
call_op: "call" FUNC_NAME "(" [value_list] ")" [_EFFECTS "=" EFFECT] [_CYCLES "=" INT] [_COLON type_list]
host_work_op: "host_work" "cycles" "=" INT

region: "{" op* [yield_op] "}"
yield_op: "yield" [value_list]

field_list: field_binding ("," field_binding)*
field_binding: NAME "=" VALUE
binding_list: binding ("," binding)*
binding: VALUE "=" VALUE
value_list: VALUE ("," VALUE)*
type_list: type ("," type)*
type: INT_TYPE                  -> int_type
    | "state" "<" STRING ">"    -> state_type
    | "token" "<" STRING ">"    -> token_type

_FROM: "from"
_LPAR: "("
_ITER: "iter"
_COLON: ":"
_EFFECTS: "effects"
_CYCLES: "cycles"
ARITH: "add" | "sub" | "mul" | "and" | "or" | "xor" | "shl" | "shr"
EFFECT: "all" | "none"
VALUE: "%" /[A-Za-z0-9_.$]+/
FUNC_NAME: "@" /[A-Za-z_][A-Za-z0-9_.$]*/
NAME: /[A-Za-z_][A-Za-z0-9_]*/
INT_TYPE: /i[0-9]+/
STRING: "\"" /[^"\n]*/ "\""
COMMENT: "//" /[^\n]*/

%import common.SIGNED_INT
%import common.INT
%import common.WS
%ignore WS
%ignore COMMENT
"""

# LALR keeps parsing linear in the text size
_PARSER = lark.Lark(GRAMMAR, parser="lalr", maybe_placeholders=True)


def _pos(token) -> Dict[str, int]:
    """Position dict from a lark token."""
    return {"line": getattr(token, "line", 0) or 0, "column": getattr(token, "column", 0) or 0}


def _unquote(token) -> str:
    return str(token)[1:-1]


# text -> dicts
class IRTransformer(lark.Transformer):
    """Turns the parse tree into plain dicts, one per operation."""

    def start(self, items):
        return {
            "accels": [item for item in items if item["tag"] == "accel"],
            "functions": [item for item in items if item["tag"] == "func"]}

    def accel_decl(self, items):
        return {"tag": "accel", "name": _unquote(items[0]), "pos": _pos(items[0])}

    def func(self, items):
        name = items[0]
        return {"tag": "func", "name": str(name)[1:], "ops": list(items[1:]), "pos": _pos(name)}

    def op(self, items):
        results, body = items
        body["results"] = results or []
        return body

    def results(self, items):
        return list(items)

    def const_op(self, items):
        literal, int_type = items
        return {"kind": "const", "value": int(literal), "type": ("int", int(str(int_type)[1:])), "pos": _pos(literal)}

    def arith_op(self, items):
        op_name, lhs, rhs, int_type = items
        return {"kind": "arith", "op": str(op_name), "operands": [lhs, rhs],
                "type": ("int", int(str(int_type)[1:])), "pos": _pos(op_name)}

    def setup_op(self, items):
        accel, fields, input_state, declared = items
        return {"kind": "setup", "accel": _unquote(accel), "fields": fields or [],
                "input": input_state, "type": declared, "pos": _pos(accel)}

    def launch_op(self, items):
        state, fields, ops, declared = items
        return {"kind": "launch", "state": state, "fields": fields or [], "ops": ops,
                "type": declared, "pos": _pos(state)}

    def ops_value(self, items):
        token = items[0]
        return token if token.type == "VALUE" else int(token)

    def await_op(self, items):
        return {"kind": "await", "token": items[0], "pos": _pos(items[0])}

    def for_op(self, items):
        iv, lower, upper, step, bindings, iv_type, region = items
        return {"kind": "for", "iv": iv, "lower": int(lower), "upper": int(upper), "step": int(step),
                "bindings": bindings or [], "iv_width": int(str(iv_type)[1:]), "region": region,
                "pos": _pos(iv)}

    def if_op(self, items):
        condition, types, then_region, else_region = items
        return {"kind": "if", "condition": condition, "types": types or [],
                "regions": [then_region, else_region], "pos": _pos(condition)}

    def call_op(self, items):
        callee, args, effects, cycles, types = items
        return {"kind": "extern-call", "callee": str(callee)[1:], "args": args or [],
                "effects": str(effects) if effects is not None else None,
                "cycles": int(cycles) if cycles is not None else 0,
                "types": types or [], "pos": _pos(callee)}

    def host_work_op(self, items):
        return {"kind": "host-work", "cycles": int(items[0]), "pos": _pos(items[0])}

    def region(self, items):
        *ops, terminator = items
        return {"ops": ops, "yield": terminator}

    def yield_op(self, items):
        return {"kind": "yield", "values": items[0] or []}

    def field_list(self, items):
        return list(items)

    def field_binding(self, items):
        return (str(items[0]), items[1])

    def binding_list(self, items):
        return list(items)

    def binding(self, items):
        return (items[0], items[1])

    def value_list(self, items):
        return list(items)

    def type_list(self, items):
        return list(items)

    def int_type(self, items):
        return ("int", int(str(items[0])[1:]))

    def state_type(self, items):
        return ("state", _unquote(items[0]))

    def token_type(self, items):
        return ("token", _unquote(items[0]))


# dicts -> IR graph
class ProgramBuilder:
    """Resolves names and types of a transformed parse tree into a Program."""

    def __init__(self, tree: Dict):
        self.tree = tree
        self.accelerators: List[str] = []
        self.scopes: List[Dict[str, object]] = []
        self.defined = set()

    # 1. program level
    def build(self) -> Program:
        for decl in self.tree["accels"]:
            if not decl["name"]:
                raise IRSyntaxError("empty accelerator name", **decl["pos"])
            if decl["name"] in self.accelerators:
                raise IRNameError(f"accelerator \"{decl['name']}\" declared twice at {self._where(decl['pos'])}")
            self.accelerators.append(decl["name"])
        functions = []
        seen = set()
        for function_tree in self.tree["functions"]:
            if function_tree["name"] in seen:
                raise IRNameError(f"function @{function_tree['name']} defined twice at {self._where(function_tree['pos'])}")
            seen.add(function_tree["name"])
            functions.append(self.build_function(function_tree))
        return Program(self.accelerators, functions)

    def build_function(self, function_tree: Dict) -> Function:
        # value names are scoped per function
        self.scopes = [{}]
        self.defined = set()
        body = Block()
        for op_tree in function_tree["ops"]:
            self.build_op(op_tree, body)
        return Function(function_tree["name"], body)

    # 2. name and type helpers
    @staticmethod
    def _where(pos: Dict[str, int]) -> str:
        return f"line {pos['line']}, column {pos['column']}"

    def lookup(self, token):
        name = str(token)
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        raise IRNameError(f"undefined value {name} at {self._where(_pos(token))}")

    def define(self, token, value):
        name = str(token)
        if name in self.defined:
            raise IRNameError(f"redefinition of {name} at {self._where(_pos(token))}")
        self.defined.add(name)
        self.scopes[-1][name] = value

    def make_type(self, spec, pos):
        tag, payload = spec
        if tag == "int":
            return IntegerType(payload)
        self.check_accel(payload, pos)
        return StateType(payload) if tag == "state" else TokenType(payload)

    def check_accel(self, name: str, pos):
        if name not in self.accelerators:
            raise IRNameError(f"unknown accelerator \"{name}\" at {self._where(pos)}")

    def expect(self, condition: bool, message: str, pos):
        if not condition:
            raise IRTypeError(f"{message} at {self._where(pos)}")

    def int_operand(self, token, pos, width: Optional[int] = None):
        value = self.lookup(token)
        self.expect(isinstance(value.type, IntegerType), f"{token} must be an integer", pos)
        if width is not None:
            self.expect(value.type.width == width, f"{token} must be i{width}, got {value.type}", pos)
        return value

    # 3. operations
    def build_op(self, op_tree: Dict, block: Block):
        pos = op_tree["pos"]
        handler = getattr(self, "build_" + op_tree["kind"].replace("-", "_"))
        op = handler(op_tree, pos)
        names = op_tree["results"]
        self.expect(
            len(names) == len(op.results),
            f"{op_tree['kind']} defines {len(op.results)} result(s), {len(names)} named", pos)
        # results become visible only after the op, regions saw the outer scope only
        block.append(op)
        for token, value in zip(names, op.results):
            self.define(token, value)
        return op

    def build_const(self, op_tree, pos) -> Operation:
        return ir_builder.const_op(op_tree["value"], self.make_type(op_tree["type"], pos).width)

    def build_arith(self, op_tree, pos) -> Operation:
        width = self.make_type(op_tree["type"], pos).width
        lhs, rhs = (self.int_operand(token, pos, width) for token in op_tree["operands"])
        return ir_builder.arith_op(op_tree["op"], lhs, rhs)

    def build_setup(self, op_tree, pos) -> Operation:
        accel = op_tree["accel"]
        self.check_accel(accel, pos)
        pairs = [(name, self.int_operand(token, pos)) for name, token in op_tree["fields"]]
        input_state = None
        if op_tree["input"] is not None:
            input_state = self.lookup(op_tree["input"])
            self.expect(input_state.type == StateType(accel), f"setup input must be state<\"{accel}\">", pos)
        self.expect(self.make_type(op_tree["type"], pos) == StateType(accel), "setup result type mismatch", pos)
        return ir_builder.setup_op(accel, pairs, input_state)

    def build_launch(self, op_tree, pos) -> Operation:
        state = self.lookup(op_tree["state"])
        self.expect(isinstance(state.type, StateType), "launch operand must be a state", pos)
        pairs = [(name, self.int_operand(token, pos)) for name, token in op_tree["fields"]]
        ops = op_tree["ops"]
        if not isinstance(ops, int):
            ops = self.int_operand(ops, pos)
        self.expect(
            self.make_type(op_tree["type"], pos) == TokenType(state.type.accel), "launch result type mismatch", pos)
        return ir_builder.launch_op(state, ops, pairs)

    def build_await(self, op_tree, pos) -> Operation:
        token = self.lookup(op_tree["token"])
        self.expect(isinstance(token.type, TokenType), "await operand must be a token", pos)
        return ir_builder.await_op(token)

    def build_for(self, op_tree, pos) -> Operation:
        inits = [self.lookup(init) for _, init in op_tree["bindings"]]
        op = ir_builder.for_op(op_tree["lower"], op_tree["upper"], op_tree["step"], inits, op_tree["iv_width"])
        names = [op_tree["iv"]] + [arg for arg, _ in op_tree["bindings"]]
        self.build_region(op_tree["region"], op.body, list(zip(names, op.body.arguments)),
                          implicit_yield=not inits)
        return op

    def build_if(self, op_tree, pos) -> Operation:
        condition = self.int_operand(op_tree["condition"], pos, 1)
        result_types = [self.make_type(spec, pos) for spec in op_tree["types"]]
        op = ir_builder.if_op(condition, result_types)
        for region_tree, block in zip(op_tree["regions"], op.regions):
            self.build_region(region_tree, block, [], implicit_yield=not result_types)
        return op

    def build_extern_call(self, op_tree, pos) -> Operation:
        args = [self.lookup(token) for token in op_tree["args"]]
        result_types = [self.make_type(spec, pos) for spec in op_tree["types"]]
        return ir_builder.call_op(op_tree["callee"], args, result_types, op_tree["effects"], op_tree["cycles"])

    def build_host_work(self, op_tree, pos) -> Operation:
        return ir_builder.host_work_op(op_tree["cycles"])

    def build_region(self, region_tree: Dict, block: Block, arguments, implicit_yield: bool):
        self.scopes.append({})
        for token, value in arguments:
            self.define(token, value)
        for op_tree in region_tree["ops"]:
            self.build_op(op_tree, block)
        terminator = region_tree["yield"]
        if terminator is not None:
            block.append(ir_builder.yield_op([self.lookup(token) for token in terminator["values"]]))
        elif implicit_yield:
            block.append(ir_builder.yield_op())
        self.scopes.pop()


def parse_program(text: str) -> Program:
    """Function to parse IR text into a Program.

    Args:
        text (str): IR source, may be empty.

    Returns:
        Program: names resolved and types attached.
    """
    try:
        tree = _PARSER.parse(text)
    except lark.exceptions.UnexpectedEOF as error:
        lines = text.splitlines() or [""]
        raise IRSyntaxError("unexpected end of input", len(lines), len(lines[-1]) + 1) from error
    except lark.exceptions.UnexpectedCharacters as error:
        raise IRSyntaxError(f"unexpected character {error.char!r}", error.line, error.column) from error
    except lark.exceptions.UnexpectedToken as error:
        line = error.line if error.line and error.line > 0 else 0
        column = error.column if error.column and error.column > 0 else 0
        raise IRSyntaxError(f"unexpected token {str(error.token)!r}", line, column) from error
    try:
        parsed = IRTransformer().transform(tree)
    except lark.exceptions.VisitError as error:
        raise error.orig_exc from error
    program = ProgramBuilder(parsed).build()
    logger.debug(f"Parsed program with {len(program.functions)} function(s)")
    return program
