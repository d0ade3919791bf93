"""State tracing: link every setup to the accelerator state it builds on.

Straight-line setups are chained, loops carry the state as an iteration
argument, if/else joins yield the branch states. Opaque calls without an
effects=none annotation reset the knowledge, so setups after them stay
unlinked.
"""
from typing import Dict, List, Optional
from loguru import logger
from accel_config_toolkit.ir.ir_builder import setup_op
from accel_config_toolkit.ir.ir_types import Block, Operation, Program, StateType, Value
from accel_config_toolkit.ir.ir_utils import (
    accels_written, clone_program, contains_clobbering_call, is_clobbering_call)

# accelerator -> current state (None when unknown)
StateMap = Dict[str, Optional[Value]]


class StateTracer:
    """Forward walk keeping the current state per accelerator."""

    def __init__(self, accelerators: List[str]):
        self.accelerators = list(accelerators)
        self.linked = 0
        self.roots = 0

    def unknown(self) -> StateMap:
        return {accel: None for accel in self.accelerators}

    def materialize_root(self, block: Block, anchor: Operation, accel: str) -> Value:
        """Insert an empty setup before `anchor` so a region can be threaded."""
        root = setup_op(accel, [])
        block.insert_before(anchor, root)
        self.roots += 1
        return root.result

    # 1. blocks
    def trace_block(self, block: Block, current: StateMap) -> StateMap:
        current = dict(current)
        for op in list(block.ops):
            if op.kind == "setup":
                if op.setup_input() is None and current.get(op.accel) is not None:
                    op.set_setup(op.setup_fields(), current[op.accel])
                    self.linked += 1
                current[op.accel] = op.result
            elif is_clobbering_call(op):
                # pessimistic: invisible code may reconfigure anything
                current = self.unknown()
            elif op.kind == "if":
                current = self.trace_if(block, op, current)
            elif op.kind == "for":
                current = self.trace_for(block, op, current)
        return current

    # 2. if/else joins
    def trace_if(self, block: Block, op: Operation, current: StateMap) -> StateMap:
        if not contains_clobbering_call(op):
            for accel in accels_written(op):
                if current.get(accel) is None:
                    current[accel] = self.materialize_root(block, op, accel)
        then_end = self.trace_block(op.then_block, current)
        else_end = self.trace_block(op.else_block, current)
        joined = dict(current)
        for accel in self.accelerators:
            existing = [r for r in op.results if r.type == StateType(accel)]
            if existing:
                # already threaded
                joined[accel] = existing[0]
                continue
            then_state, else_state = then_end.get(accel), else_end.get(accel)
            if then_state is current.get(accel) and else_state is current.get(accel):
                continue
            if then_state is None or else_state is None:
                joined[accel] = None
                continue
            joined[accel] = self.join_result(op, accel, then_state, else_state)
        return joined

    def join_result(self, op: Operation, accel: str, then_state: Value, else_state: Value) -> Value:
        """Result of `op` carrying (then_state, else_state), added when missing."""
        then_yield, else_yield = op.then_block.terminator, op.else_block.terminator
        for index, result in enumerate(op.results):
            if result.type == StateType(accel) and then_yield.operands[index] is then_state \
                    and else_yield.operands[index] is else_state:
                return result
        then_yield.operands.append(then_state)
        else_yield.operands.append(else_state)
        return op.add_result(StateType(accel))

    # 3. loops
    def trace_for(self, block: Block, op: Operation, current: StateMap) -> StateMap:
        if contains_clobbering_call(op):
            self.trace_block(op.body, self.unknown())
            return self.unknown()
        body_entry = dict(current)
        carried = {}
        # states the loop already carries
        for index, arg in enumerate(op.iter_args):
            if isinstance(arg.type, StateType) and arg.type.accel not in carried:
                carried[arg.type.accel] = (index, False)
        for accel in accels_written(op):
            if accel in carried:
                continue
            if current.get(accel) is None:
                current[accel] = self.materialize_root(block, op, accel)
            op.operands.append(current[accel])
            op.body.add_argument(StateType(accel))
            op.add_result(StateType(accel))
            carried[accel] = (len(op.iter_args) - 1, True)
        for accel, (index, _) in carried.items():
            body_entry[accel] = op.iter_args[index]
        body_end = self.trace_block(op.body, body_entry)
        after = dict(current)
        for accel, (index, added) in carried.items():
            if added:
                op.body.terminator.operands.append(body_end[accel])
            after[accel] = op.results[index]
        return after


def trace_states(program: Program) -> Program:
    """Function to thread accelerator states through a copy of the program.

    Args:
        program (Program): verified input, setups may lack input states.

    Returns:
        Program: traced copy with an unchanged launch trace.
    """
    result = clone_program(program)
    tracer = StateTracer(result.accelerators)
    for function in result.functions:
        logger.info(f"Running trace on function @{function.name}")
        tracer.trace_block(function.body, tracer.unknown())
    logger.debug(f"trace linked {tracer.linked} setup(s), materialized {tracer.roots} root state(s)")
    return result
