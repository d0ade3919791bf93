"""Structural verifier for programs.

Rules (diagnostic rule ids):
    - dominance: operand not defined before its use in an enclosing scope.
    - redefinition: a value or operation appears twice.
    - type / attribute: operand, result or attribute does not fit the op kind.
    - undeclared-accel: state, token, setup or launch names an undeclared accelerator.
    - duplicate-field: a setup or launch writes one field twice.
    - live-state: an older state of an accelerator is used after a newer one was produced.
    - double-await: a token may be awaited more than once.
    - yield-mismatch: a region terminator does not match the results of its op.
"""
from typing import Dict, List, Mapping, Optional, Set
from loguru import logger
from accel_config_toolkit.basemodel_validator.ir_diagnostic_model import Diagnostic
from accel_config_toolkit.errors import VerificationError
from accel_config_toolkit.ir.ir_types import (
    ARITH_KINDS, EFFECTS_VALUES, Block, IntegerType, Operation, Program, StateType, TokenType, Value)
from accel_config_toolkit.ir.ir_utils import op_path, writes_accel

# marks an accelerator whose live state is unknown and must not be used
_POISONED = object()


class ProgramVerifier:
    """Collects diagnostics for one program, in walk order."""

    def __init__(self, program: Program, descriptors: Optional[Mapping] = None):
        self.program = program
        # optional, enables field-name checks
        self.descriptors = descriptors or {}
        self.diagnostics: List[Diagnostic] = []
        self.function_name = ""
        self.seen_ops: Set[int] = set()
        self.seen_values: Set[int] = set()

    # 1. reporting helpers
    def report(self, rule: str, op: Optional[Operation], message: str):
        location = f"@{self.function_name}"
        if op is not None and op.parent is not None:
            location += f"/{op_path(op)} ({op.kind})"
        elif op is not None:
            location += f" ({op.kind})"
        self.diagnostics.append(Diagnostic(rule=rule, message=message, location=location))

    def check_type_declared(self, value_type, op: Operation):
        if isinstance(value_type, (StateType, TokenType)) and value_type.accel not in self.program.accelerators:
            self.report("undeclared-accel", op, f"type {value_type} names an undeclared accelerator")

    # 2. entry point
    def run(self) -> List[Diagnostic]:
        if len(set(self.program.accelerators)) != len(self.program.accelerators):
            self.diagnostics.append(Diagnostic(
                rule="redefinition", message="accelerator declared twice", location="program"))
        for function in self.program.functions:
            self.function_name = function.name
            self.check_block(function.body, set(), top_level=True)
            self.check_live_state(function.body, {})
            self.check_awaits(function.body, set(), set())
        return self.diagnostics

    # 3. dominance, definitions and per-op typing
    def check_block(self, block: Block, visible: Set[int], top_level: bool = False):
        visible = set(visible)
        for arg in block.arguments:
            self.check_type_declared(arg.type, block.parent_op)
            visible.add(id(arg))
        for index, op in enumerate(block.ops):
            if id(op) in self.seen_ops:
                self.report("redefinition", op, "operation appears twice in the program")
                continue
            self.seen_ops.add(id(op))
            for operand in op.operands:
                if id(operand) not in visible:
                    self.report("dominance", op, f"operand of type {operand.type} does not dominate its use")
            if op.kind == "yield":
                if top_level or index != len(block.ops) - 1:
                    self.report("yield-mismatch", op, "yield must terminate a for/if region")
            elif op.regions and op.kind not in ("for", "if"):
                self.report("type", op, f"{op.kind} cannot hold regions")
            self.check_op(op)
            for region in op.regions:
                self.check_block(region, visible)
            for result in op.results:
                if id(result) in self.seen_values or result.owner is not op:
                    self.report("redefinition", op, "value defined more than once")
                self.seen_values.add(id(result))
                self.check_type_declared(result.type, op)
                visible.add(id(result))

    def check_op(self, op: Operation):
        checker = getattr(self, "check_" + op.kind.replace("-", "_"), None)
        if checker is not None:
            checker(op)

    def check_const(self, op: Operation):
        if op.operands or len(op.results) != 1 or not isinstance(op.results[0].type, IntegerType):
            self.report("type", op, "const takes no operands and defines one integer")
            return
        value = op.attributes.get("value")
        if not isinstance(value, int) or not 0 <= value < (1 << op.result.type.width):
            self.report("attribute", op, f"const literal {value!r} does not fit {op.result.type}")

    def check_arith(self, op: Operation):
        if op.attributes.get("op") not in ARITH_KINDS:
            self.report("attribute", op, f"unknown arithmetic op {op.attributes.get('op')!r}")
        types = [v.type for v in op.operands] + [v.type for v in op.results]
        if len(op.operands) != 2 or len(op.results) != 1 or not all(isinstance(t, IntegerType) for t in types) \
                or len(set(types)) != 1:
            self.report("type", op, "arith needs two same-width integer operands and one result of that width")

    def check_field_names(self, op: Operation, names: List[str]):
        if len(set(names)) != len(names):
            self.report("duplicate-field", op, f"field written twice in {names}")
        descriptor = self.descriptors.get(op.accel)
        if descriptor is not None:
            for name in names:
                if name not in descriptor.field_names:
                    self.report("attribute", op, f"field '{name}' is not declared by \"{op.accel}\"")

    def check_setup(self, op: Operation):
        accel = op.accel
        if not isinstance(accel, str) or not accel:
            self.report("attribute", op, "setup needs an accelerator name")
            return
        if accel not in self.program.accelerators:
            self.report("undeclared-accel", op, f"accelerator \"{accel}\" is not declared")
        names = op.field_names
        if len(op.operands) not in (len(names), len(names) + 1):
            self.report("type", op, "setup operands do not match its field list")
            return
        self.check_field_names(op, names)
        if any(not isinstance(v.type, IntegerType) for _, v in op.setup_fields()):
            self.report("type", op, "setup field values must be integers")
        input_state = op.setup_input()
        if input_state is not None and input_state.type != StateType(accel):
            self.report("type", op, f"setup input must be state<\"{accel}\">, got {input_state.type}")
        if len(op.results) != 1 or op.results[0].type != StateType(accel):
            self.report("type", op, f"setup defines exactly one state<\"{accel}\">")

    def check_launch(self, op: Operation):
        if not op.operands or not isinstance(op.operands[0].type, StateType):
            self.report("type", op, "launch needs a state as first operand")
            return
        accel = op.operands[0].type.accel
        if op.accel != accel:
            self.report("attribute", op, "launch accelerator attribute differs from its state")
        names = op.field_names
        ops = op.attributes.get("ops")
        expected = 1 + len(names) + (0 if ops is not None else 1)
        if len(op.operands) != expected:
            self.report("type", op, "launch operands do not match its field list and ops")
            return
        self.check_field_names(op, names)
        if any(not isinstance(v.type, IntegerType) for v in op.operands[1:]):
            self.report("type", op, "launch field and ops values must be integers")
        if ops is not None and (not isinstance(ops, int) or ops < 0):
            self.report("attribute", op, f"launch ops must be a non-negative integer, got {ops!r}")
        if len(op.results) != 1 or op.results[0].type != TokenType(accel):
            self.report("type", op, f"launch defines exactly one token<\"{accel}\">")

    def check_await(self, op: Operation):
        if len(op.operands) != 1 or not isinstance(op.operands[0].type, TokenType) or op.results:
            self.report("type", op, "await takes one token and defines nothing")

    def check_region_yield(self, op: Operation, block: Block, label: str):
        terminator = block.terminator
        result_types = [r.type for r in op.results]
        if terminator is None:
            self.report("yield-mismatch", op, f"{label} region does not end in a yield")
        elif [v.type for v in terminator.operands] != result_types:
            self.report(
                "yield-mismatch", op,
                f"{label} region yields ({', '.join(str(v.type) for v in terminator.operands)}), "
                f"expected ({', '.join(str(t) for t in result_types)})")

    def check_for(self, op: Operation):
        attrs = op.attributes
        if not all(isinstance(attrs.get(key), int) for key in ("lower", "upper", "step", "iv_width")):
            self.report("attribute", op, "for needs integer lower, upper, step and iv_width")
            return
        if attrs["step"] <= 0:
            self.report("attribute", op, f"for step must be positive, got {attrs['step']}")
        if len(op.regions) != 1:
            self.report("type", op, "for holds exactly one region")
            return
        arg_types = [a.type for a in op.body.arguments]
        init_types = [v.type for v in op.operands]
        if not arg_types or arg_types[0] != IntegerType(attrs["iv_width"]) or arg_types[1:] != init_types \
                or [r.type for r in op.results] != init_types:
            self.report("type", op, "for induction variable, iteration arguments, inits and results disagree")
        self.check_region_yield(op, op.body, "for")

    def check_if(self, op: Operation):
        if len(op.operands) != 1 or op.operands[0].type != IntegerType(1):
            self.report("type", op, "if condition must be an i1")
        if len(op.regions) != 2 or any(block.arguments for block in op.regions):
            self.report("type", op, "if holds a then and an else region without arguments")
            return
        self.check_region_yield(op, op.then_block, "then")
        self.check_region_yield(op, op.else_block, "else")

    def check_extern_call(self, op: Operation):
        if op.effects is not None and op.effects not in EFFECTS_VALUES:
            self.report("attribute", op, f"effects must be all or none, got {op.effects!r}")
        cycles = op.attributes.get("cycles", 0)
        if not isinstance(cycles, int) or cycles < 0:
            self.report("attribute", op, "call cycles must be a non-negative integer")

    def check_host_work(self, op: Operation):
        cycles = op.attributes.get("cycles")
        if not isinstance(cycles, int) or cycles < 0:
            self.report("attribute", op, "host_work cycles must be a non-negative integer")
        if op.operands or op.results:
            self.report("type", op, "host_work takes no operands and defines nothing")

    # 4. single live state per accelerator
    def check_live_state(self, block: Block, current: Dict[str, object]):
        current = dict(current)
        for op in block.ops:
            for operand in op.operands:
                if not isinstance(operand.type, StateType):
                    continue
                live = current.get(operand.type.accel)
                if live is not None and live is not operand:
                    self.report(
                        "live-state", op,
                        f"stale state of \"{operand.type.accel}\" used after a newer state was produced")
            if op.kind == "for" and op.regions:
                inner = dict(current)
                for accel in self.program.accelerators:
                    # a carried state is the live one inside the body
                    carried = [a for a in op.iter_args if a.type == StateType(accel)]
                    if carried:
                        inner[accel] = carried[0]
                    elif writes_accel(op, accel):
                        inner[accel] = _POISONED
                self.check_live_state(op.body, inner)
            elif op.kind == "if":
                for region in op.regions:
                    self.check_live_state(region, current)
            if op.kind == "setup" and op.results:
                current[op.accel] = op.result
            elif op.regions:
                for accel in self.program.accelerators:
                    produced = [r for r in op.results if r.type == StateType(accel)]
                    if produced:
                        current[accel] = produced[0]
                    elif writes_accel(op, accel):
                        current[accel] = _POISONED

    # 5. every token awaited at most once on any path
    def check_awaits(self, block: Block, awaited: Set[int], outer: Set[int]) -> Set[int]:
        """Returns the tokens awaited after the block; `outer` are tokens defined outside the innermost loop."""
        awaited = set(awaited)
        for op in block.ops:
            if op.kind == "await" and op.operands:
                token = op.operands[0]
                if id(token) in awaited:
                    self.report("double-await", op, "token is awaited more than once")
                elif id(token) in outer:
                    self.report("double-await", op, "token defined outside the loop is awaited in every iteration")
                awaited.add(id(token))
            elif op.kind == "if":
                branches = [self.check_awaits(region, awaited, outer) for region in op.regions]
                awaited = set().union(*branches) if branches else awaited
            elif op.kind == "for":
                defined_outside = set(outer) | self._defined_before(block, op)
                awaited |= self.check_awaits(op.body, awaited, defined_outside)
        return awaited

    @staticmethod
    def _defined_before(block: Block, loop: Operation) -> Set[int]:
        """Tokens visible at `loop`: every value defined in enclosing blocks so far."""
        visible = set()
        current_block, anchor = block, loop
        while current_block is not None:
            visible.update(id(a) for a in current_block.arguments)
            for op in current_block.ops:
                if op is anchor:
                    break
                visible.update(id(r) for inner in op.walk() for r in inner.results)
            owner = current_block.parent_op
            if owner is None:
                break
            current_block, anchor = owner.parent, owner
        return visible


def verify(program: Program, descriptors: Optional[Mapping] = None) -> List[Diagnostic]:
    """Function to verify a program.

    Args:
        program (Program): program to check.
        descriptors (Mapping): optional accelerator name -> descriptor, adds field-name checks.

    Returns:
        list: diagnostics in deterministic walk order, empty when the program is valid.
    """
    diagnostics = ProgramVerifier(program, descriptors).run()
    if diagnostics:
        logger.debug(f"Verification found {len(diagnostics)} problem(s)")
    return diagnostics


def verify_or_raise(program: Program, descriptors: Optional[Mapping] = None) -> Program:
    """Raise VerificationError unless the program verifies."""
    diagnostics = verify(program, descriptors)
    if diagnostics:
        raise VerificationError(diagnostics)
    return program
