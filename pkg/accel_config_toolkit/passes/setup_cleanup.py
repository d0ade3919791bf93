"""Cleanup of setups: drop empty ones and merge adjacent ones."""
from typing import Optional, Tuple
from loguru import logger
from accel_config_toolkit.ir.ir_types import Block, Operation, Program
from accel_config_toolkit.ir.ir_utils import clone_program, replace_uses, touches_accel, use_count


# 1. zero-field setups
def remove_empty_setups(block: Block, root: Block) -> int:
    removed = 0
    for op in list(block.ops):
        for region in op.regions:
            removed += remove_empty_setups(region, root)
        if op.kind != "setup" or op.field_names:
            continue
        input_state = op.setup_input()
        if input_state is not None:
            replace_uses(root, op.result, input_state)
            op.erase()
            removed += 1
        elif use_count(root, op.result) == 0:
            op.erase()
            removed += 1
    return removed


# 2. merge two setups of one accelerator with nothing touching it in between
def find_merge(block: Block, root: Block) -> Optional[Tuple[Operation, Operation]]:
    for index, first in enumerate(block.ops):
        if first.kind == "setup":
            for second in block.ops[index + 1:]:
                if second.kind == "setup" and second.accel == first.accel:
                    chained = second.setup_input() is first.result and use_count(root, first.result) == 1
                    unchained = second.setup_input() is None and use_count(root, first.result) == 0
                    if chained or unchained:
                        return first, second
                    break
                if touches_accel(second, first.accel):
                    break
        for region in first.regions:
            found = find_merge(region, root)
            if found is not None:
                return found
    return None


def merge_setups(first: Operation, second: Operation):
    """Fold `first` into `second`; later writes win, first-occurrence order is kept."""
    # define merged field map
    merged = dict(first.setup_fields())
    for name, value in second.setup_fields():
        merged[name] = value
    second.set_setup(list(merged.items()), first.setup_input())
    first.erase()


def cleanup_setups(program: Program) -> Program:
    """Function to remove empty setups and merge adjacent setups.

    Args:
        program (Program): traced, verified input, left untouched.

    Returns:
        Program: copy with the same launch trace and no more register writes.
    """
    result = clone_program(program)
    for function in result.functions:
        logger.info(f"Running cleanup on function @{function.name}")
        body = function.body
        # define counters, repeat until nothing changes
        removed = merged = 0
        while True:
            # drop empty setups first, then merge one pair
            progress = remove_empty_setups(body, body)
            found = find_merge(body, body)
            if found is not None:
                merge_setups(*found)
                progress += 1
                merged += 1
            removed += progress - (1 if found is not None else 0)
            if not progress:
                break
        logger.debug(f"cleanup removed {removed} empty setup(s), merged {merged} pair(s) in @{function.name}")
    return result
