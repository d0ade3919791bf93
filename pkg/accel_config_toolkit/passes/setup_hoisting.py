"""Setup hoisting: into if/else branches and out of for loops.

Both rewrites move register writes to a place where deduplication can see
them; neither changes which values a launch observes.
"""
from typing import Dict, List, Optional, Tuple
from loguru import logger
from accel_config_toolkit.ir.ir_builder import setup_op
from accel_config_toolkit.ir.ir_types import Block, Operation, Program, StateType, Value
from accel_config_toolkit.ir.ir_utils import (
    clone_program, contains_clobbering_call, is_defined_inside, replace_uses, touches_accel, use_count)


# --- hoisting into branches ---------------------------------------------------
def find_branch_candidate(block: Block, root: Block) -> Optional[Tuple[Operation, Operation]]:
    """First (if, setup) pair where the setup can be cloned into both branches."""
    for index, op in enumerate(block.ops):
        if op.kind == "setup":
            state = op.setup_input()
            if state is None or state.defining_op is None or state.defining_op.kind != "if":
                continue
            branch = state.defining_op
            if branch.parent is not block or use_count(root, state) != 1:
                continue
            start = block.index(branch)
            between = block.ops[start + 1:index]
            if any(touches_accel(other, op.accel) for other in between):
                continue
            # field values must already exist when the branches run
            if any(value.defining_op is branch or value.defining_op in between for _, value in op.setup_fields()):
                continue
            return branch, op
        for region in op.regions:
            found = find_branch_candidate(region, root)
            if found is not None:
                return found
    return None


def hoist_setup_into_branches(root: Block, branch: Operation, setup: Operation):
    state = setup.setup_input()
    for region in branch.regions:
        terminator = region.terminator
        clone = setup_op(setup.accel, setup.setup_fields(), terminator.operands[state.index])
        region.insert_before(terminator, clone)
        terminator.operands[state.index] = clone.result
    # the if result now carries the configured state
    replace_uses(root, setup.result, state)
    setup.erase()


def hoist_into_branches(program: Program) -> Program:
    """Function to clone setups that consume an if-join state into both branches.

    Args:
        program (Program): traced, verified input, left untouched.

    Returns:
        Program: copy where every such setup lives at the tail of the branches.
    """
    result = clone_program(program)
    for function in result.functions:
        logger.info(f"Running hoist-if on function @{function.name}")
        moved = 0
        while True:
            found = find_branch_candidate(function.body, function.body)
            if found is None:
                break
            hoist_setup_into_branches(function.body, *found)
            moved += 1
        logger.debug(f"hoist-if moved {moved} setup(s) into branches of @{function.name}")
    return result


# --- hoisting out of loops ----------------------------------------------------
def written_field_counts(loop: Operation, accel: str) -> Dict[str, int]:
    """How many setups or launches inside the loop write each field of `accel`."""
    counts: Dict[str, int] = {}
    for inner in loop.body.walk():
        if inner.kind in ("setup", "launch") and inner.accel == accel:
            for name in inner.field_names:
                counts[name] = counts.get(name, 0) + 1
    return counts


def launches_accel(op: Operation, accel: str) -> bool:
    return any(inner.kind == "launch" and inner.accel == accel for inner in op.walk())


def hoist_from_loop(block: Block, loop: Operation) -> int:
    """Move invariant fields of the body setups into one setup before `loop`."""
    if loop.trip_count() < 1 or contains_clobbering_call(loop):
        return 0
    moved = 0
    done: List[str] = []
    for arg_index, arg in enumerate(loop.iter_args):
        if not isinstance(arg.type, StateType) or arg.type.accel in done:
            continue
        accel = arg.type.accel
        done.append(accel)
        counts = written_field_counts(loop, accel)
        hoisted: List[Tuple[str, Value]] = []
        for op in list(loop.body.ops):
            if launches_accel(op, accel):
                # a launch ahead of the setup would see the value too early
                break
            if op.kind != "setup" or op.accel != accel:
                continue
            kept = []
            for name, value in op.setup_fields():
                if not is_defined_inside(value, loop) and counts.get(name) == 1:
                    hoisted.append((name, value))
                else:
                    kept.append((name, value))
            op.set_setup(kept, op.setup_input())
        if not hoisted:
            continue
        pre = setup_op(accel, hoisted, loop.operands[arg_index])
        block.insert_before(loop, pre)
        loop.operands[arg_index] = pre.result
        moved += len(hoisted)
    return moved


def hoist_loops_in_block(block: Block) -> int:
    moved = 0
    for op in list(block.ops):
        # innermost loops first
        for region in op.regions:
            moved += hoist_loops_in_block(region)
        if op.kind == "for":
            moved += hoist_from_loop(block, op)
    return moved


def hoist_loop_invariant_setup(program: Program) -> Program:
    """Function to move loop-invariant setup fields in front of their loop.

    Args:
        program (Program): traced, verified input, left untouched.

    Returns:
        Program: copy where invariant fields are written once before the loop.
    """
    result = clone_program(program)
    for function in result.functions:
        logger.info(f"Running hoist-loop on function @{function.name}")
        moved = hoist_loops_in_block(function.body)
        logger.debug(f"hoist-loop moved {moved} field write(s) out of loops in @{function.name}")
    return result
