"""Setup deduplication.

A forward must-analysis computes, for every state value, the map of fields
known to hold a given SSA value (KnownFieldMap). A setup field whose value is
already known to be in the register is a redundant write and is dropped.
Joins intersect per field; loops iterate to a fixpoint.
"""
from typing import Dict, List, Set, Tuple
from loguru import logger
from accel_config_toolkit.ir.ir_types import Block, Operation, Program, StateType, Value
from accel_config_toolkit.ir.ir_utils import clone_program, is_clobbering_call

# field name -> SSA value known to be in the register
KnownFieldMap = Dict[str, Value]
# state value -> known fields of the register file it denotes
StateEnv = Dict[Value, KnownFieldMap]

# loop fixpoint guard, the lattice only shrinks so this is never hit in practice
MAX_LOOP_ITERATIONS = 16


def intersect_maps(a: KnownFieldMap, b: KnownFieldMap) -> KnownFieldMap:
    """Fields bound to the identical value on both sides."""
    return {name: value for name, value in a.items() if b.get(name) is value}


def intersect_envs(a: StateEnv, b: StateEnv) -> StateEnv:
    return {state: intersect_maps(fields, b[state]) for state, fields in a.items() if state in b}


def copy_env(env: StateEnv) -> StateEnv:
    return {state: dict(fields) for state, fields in env.items()}


class SetupDeduplicator:
    """Runs the analysis and collects removable (setup, field) pairs."""

    def __init__(self):
        self.removals: Dict[int, Set[str]] = {}
        self.setups: Dict[int, Operation] = {}

    def record(self, op: Operation, name: str):
        self.removals.setdefault(id(op), set()).add(name)
        self.setups[id(op)] = op

    # 1. blocks
    def analyze_block(self, block: Block, env: StateEnv, recording: bool) -> StateEnv:
        env = copy_env(env)
        for op in block.ops:
            if op.kind == "setup":
                input_state = op.setup_input()
                known = dict(env.get(input_state, {})) if input_state is not None else {}
                for name, value in op.setup_fields():
                    if known.get(name) is value:
                        if recording:
                            self.record(op, name)
                    known[name] = value
                env[op.result] = known
            elif op.kind == "launch":
                # launch-semantic writes land in the register file too
                state = op.launch_state()
                fields = dict(env.get(state, {}))
                fields.update(op.launch_fields())
                env[state] = fields
            elif is_clobbering_call(op):
                env = {}
            elif op.kind == "if":
                env = self.analyze_if(op, env, recording)
            elif op.kind == "for":
                env = self.analyze_for(op, env, recording)
        return env

    # 2. if/else: intersect the branch maps
    def analyze_if(self, op: Operation, env: StateEnv, recording: bool) -> StateEnv:
        then_env = self.analyze_block(op.then_block, env, recording)
        else_env = self.analyze_block(op.else_block, env, recording)
        joined = intersect_envs(then_env, else_env)
        then_yield, else_yield = op.then_block.terminator, op.else_block.terminator
        for index, result in enumerate(op.results):
            if isinstance(result.type, StateType):
                joined[result] = intersect_maps(
                    then_env.get(then_yield.operands[index], {}), else_env.get(else_yield.operands[index], {}))
        return joined

    # 3. loops: entry = pre-loop map intersected with the back edge, to a fixpoint
    def loop_entry(self, op: Operation, pre: StateEnv, back: StateEnv, back_args: List[KnownFieldMap]) -> StateEnv:
        entry = intersect_envs(pre, back) if back is not None else copy_env(pre)
        for index, (arg, init) in enumerate(zip(op.iter_args, op.operands)):
            if isinstance(arg.type, StateType):
                start = pre.get(init, {})
                entry[arg] = intersect_maps(start, back_args[index]) if back is not None else dict(start)
        return entry

    def back_edge(self, op: Operation, end: StateEnv) -> Tuple[StateEnv, List[KnownFieldMap]]:
        terminator = op.body.terminator
        args = [end.get(value, {}) for value in terminator.operands]
        return end, args

    def analyze_for(self, op: Operation, pre: StateEnv, recording: bool) -> StateEnv:
        # first pass without a back edge, then iterate to a fixpoint
        back, back_args = None, []
        entry = self.loop_entry(op, pre, back, back_args)
        for _ in range(MAX_LOOP_ITERATIONS):
            end = self.analyze_block(op.body, entry, False)
            back, back_args = self.back_edge(op, end)
            next_entry = self.loop_entry(op, pre, back, back_args)
            if self.same_env(next_entry, entry):
                break
            entry = next_entry
        else:
            # give up on knowledge inside the loop
            logger.warning("dedup loop analysis did not settle, assuming nothing at loop entry")
            entry = {}
        # final pass over the body with the settled entry map
        end = self.analyze_block(op.body, entry, recording)
        _, back_args = self.back_edge(op, end)
        # a loop that may not run keeps only what held before it
        outer = {state: fields for state, fields in end.items() if state in pre}
        after = outer if op.trip_count() >= 1 else intersect_envs(pre, outer)
        for index, (result, init) in enumerate(zip(op.results, op.operands)):
            if isinstance(result.type, StateType):
                after[result] = back_args[index] if op.trip_count() >= 1 \
                    else intersect_maps(pre.get(init, {}), back_args[index])
        return after

    @staticmethod
    def same_env(a: StateEnv, b: StateEnv) -> bool:
        if a.keys() != b.keys():
            return False
        for state, fields in a.items():
            other = b[state]
            if fields.keys() != other.keys() or any(other[name] is not value for name, value in fields.items()):
                return False
        return True

    # 4. rewrite
    def apply(self) -> int:
        # define removed counter
        removed = 0
        for key, names in self.removals.items():
            op = self.setups[key]
            # keep the fields not marked redundant
            kept = [(name, value) for name, value in op.setup_fields() if name not in names]
            removed += len(op.field_names) - len(kept)
            op.set_setup(kept, op.setup_input())
        return removed


def deduplicate_setup(program: Program) -> Program:
    """Function to drop setup field writes that re-write a known value.

    Args:
        program (Program): traced, verified input, left untouched.

    Returns:
        Program: copy with redundant field writes removed and an unchanged launch trace.
    """
    result = clone_program(program)
    for function in result.functions:
        logger.info(f"Running dedup on function @{function.name}")
        # analyse with recording switched on
        deduplicator = SetupDeduplicator()
        deduplicator.analyze_block(function.body, {}, True)
        # rewrite the recorded setups
        removed = deduplicator.apply()
        logger.debug(f"dedup removed {removed} field write(s) in @{function.name}")
    return result
