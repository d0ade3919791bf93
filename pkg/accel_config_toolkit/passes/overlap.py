"""Overlap of configuration with accelerator computation.

Only accelerators with the concurrent scheme are rewritten: their setups
write staged registers, so the next job's configuration can run while the
current job is still busy.

Loop pipelining computes the first setup before the loop and, inside the
loop, the setup of the next iteration between launch and await. The last
iteration is peeled into an epilogue so no setup is computed for an index
past the loop end and the written configuration bytes do not change.
"""
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence
from loguru import logger
from accel_config_toolkit.ir.ir_builder import arith_op, const_op, setup_op
from accel_config_toolkit.ir.ir_types import Block, Operation, Program, StateType, Value
from accel_config_toolkit.ir.ir_utils import clone_op, clone_program, touches_accel, use_count

# kinds that only compute a value
VALUE_KINDS = ("const", "arith")


def is_pure_op(op: Operation) -> bool:
    if op.kind in VALUE_KINDS or op.kind in ("host-work", "setup"):
        return True
    return op.kind == "extern-call" and op.effects == "none"


def is_pure_sequence(ops: Sequence[Operation]) -> bool:
    """True if every op may be moved across a running job.

    Setups count as movable, their only effect is a staged register write.
    """
    return all(is_pure_op(op) for op in ops)


def backward_slice(target: Operation, candidates: Sequence[Operation]) -> List[Operation]:
    """Ops of `candidates` the operands of `target` depend on, in block order."""
    by_result: Dict[Value, Operation] = {r: op for op in candidates for r in op.results}
    needed = set()
    pending = list(target.operands)
    while pending:
        value = pending.pop()
        op = by_result.get(value)
        if op is None or id(op) in needed:
            continue
        needed.add(id(op))
        pending.extend(op.operands)
    return [op for op in candidates if id(op) in needed]


def remove_dead_values(block: Block, root: Block, ops: Sequence[Operation]):
    """Drop unused const/arith ops of `ops`, repeating until none is left."""
    alive = list(ops)
    progress = True
    while progress:
        progress = False
        for op in list(alive):
            if op.kind in VALUE_KINDS and op.parent is block and use_count(root, op.result) == 0:
                op.erase()
                alive.remove(op)
                progress = True


# --- loop pipelining ----------------------------------------------------------
@dataclass
class KernelLoop:
    """A loop whose body is [pure prefix; setup; launch; await; yield]."""
    loop: Operation
    prefix: List[Operation]
    setup: Operation
    launch: Operation
    wait: Operation
    # prefix ops the setup fields are computed from
    setup_slice: List[Operation]


def match_kernel_loop(loop: Operation, root: Block, schemes: Mapping[str, str]) -> Optional[KernelLoop]:
    """Function to check the pipelining shape of one loop.

    Args:
        loop (Operation): a `for` operation.
        root (Block): function body for def-use queries.
        schemes (Mapping): accelerator -> scheme.

    Returns:
        KernelLoop: matched parts, or None when the loop is left alone.
    """
    if len(loop.iter_args) != 1 or not isinstance(loop.iter_args[0].type, StateType):
        return None
    state_arg = loop.iter_args[0]
    accel = state_arg.type.accel
    if schemes.get(accel) != "concurrent":
        return None
    if loop.trip_count() < 1:
        logger.debug("pipelining skipped: loop never runs")
        return None
    ops = loop.body.ops
    if len(ops) < 4:
        return None
    setup, launch, wait, terminator = ops[-4:]
    if (setup.kind, launch.kind, wait.kind, terminator.kind) != ("setup", "launch", "await", "yield"):
        return None
    if setup.accel != accel or setup.setup_input() is not state_arg or use_count(root, state_arg) != 1:
        return None
    if launch.launch_state() is not setup.result or wait.operands[0] is not launch.result:
        return None
    if terminator.operands != [setup.result] or use_count(root, setup.result) != 2 \
            or use_count(root, launch.result) != 1:
        return None
    prefix = list(ops[:-4])
    if not is_pure_sequence(prefix) or any(op.kind == "setup" for op in prefix):
        logger.warning("pipelining skipped: impure setup sequence")
        return None
    setup_slice = backward_slice(setup, prefix)
    if any(op.kind not in VALUE_KINDS for op in setup_slice):
        logger.warning("pipelining skipped: setup fields depend on a call")
        return None
    induction_var = loop.induction_var
    for op in [setup] + setup_slice:
        for operand in op.operands:
            if operand.owner is loop.body and operand is not induction_var and operand is not state_arg:
                return None
    return KernelLoop(loop, prefix, setup, launch, wait, setup_slice)


def insert_clones(block: Block, anchor: Operation, ops: Sequence[Operation], value_map: Dict) -> Operation:
    """Clone `ops` after `anchor` in order; returns the last inserted op."""
    for op in ops:
        clone = clone_op(op, value_map)
        block.insert_after(anchor, clone)
        anchor = clone
    return anchor


def pipeline_kernel_loop(kernel: KernelLoop, root: Block):
    loop = kernel.loop
    block = loop.parent
    lower, step = loop.attributes["lower"], loop.attributes["step"]
    width = loop.attributes.get("iv_width", 32)
    last = lower + (loop.trip_count() - 1) * step
    induction_var, state_arg = loop.induction_var, loop.iter_args[0]
    fields = kernel.setup.setup_fields()

    # 1. epilogue: the peeled last iteration launches the loop result
    c_last = block.insert_after(loop, const_op(last, width))
    epilogue_map = {induction_var: c_last.result, kernel.setup.result: loop.results[0]}
    anchor = insert_clones(block, c_last, kernel.prefix, epilogue_map)
    anchor = insert_clones(block, anchor, [kernel.launch, kernel.wait], epilogue_map)
    epilogue = block.ops[block.index(c_last):block.index(anchor) + 1]

    # 2. prologue: setup of the first iteration
    c_lower = block.insert_before(loop, const_op(lower, width))
    prologue_map = {induction_var: c_lower.result}
    for op in kernel.setup_slice:
        block.insert_before(loop, clone_op(op, prologue_map))
    first = setup_op(kernel.setup.accel, [(n, prologue_map.get(v, v)) for n, v in fields], loop.operands[0])
    block.insert_before(loop, first)
    loop.operands[0] = first.result
    c_step = block.insert_before(loop, const_op(step, width))

    # 3. body: launch the carried state, then set up the next iteration
    body = loop.body
    kernel.launch.operands[0] = state_arg
    following = body.insert_after(kernel.launch, arith_op("add", induction_var, c_step.result))
    next_map = {induction_var: following.result}
    anchor = insert_clones(body, following, kernel.setup_slice, next_map)
    staged = setup_op(kernel.setup.accel, [(n, next_map.get(v, v)) for n, v in fields], state_arg)
    body.insert_after(anchor, staged)
    body.terminator.operands[0] = staged.result
    kernel.setup.erase()
    loop.attributes["upper"] = last

    remove_dead_values(body, root, list(body.ops))
    remove_dead_values(block, root, epilogue + [c_lower])


def pipeline_loops(program: Program, schemes: Optional[Mapping[str, str]] = None) -> Program:
    """Function to software-pipeline setup/launch/await loops of concurrent accelerators.

    Args:
        program (Program): traced, deduplicated, verified input, left untouched.
        schemes (Mapping): accelerator -> scheme, missing ones count as sequential.

    Returns:
        Program: copy where each matching loop overlaps the next setup with the running job.
    """
    schemes = dict(schemes or {})
    result = clone_program(program)
    for function in result.functions:
        logger.info(f"Running pipeline on function @{function.name}")
        # inner loops first, the rewrite leaves enclosing loops untouched
        loops = [op for op in function.body.walk() if op.kind == "for"]
        rewritten = 0
        for loop in reversed(loops):
            kernel = match_kernel_loop(loop, function.body, schemes)
            if kernel is not None:
                pipeline_kernel_loop(kernel, function.body)
                rewritten += 1
        logger.debug(f"pipeline rewrote {rewritten} loop(s) in @{function.name}")
    return result


# --- block-level overlap -----------------------------------------------------
def find_overlap(block: Block, schemes: Mapping[str, str]) -> Optional[tuple]:
    """First (await, setup, slice) where the setup can move in front of the await."""
    for index, op in enumerate(block.ops):
        if op.kind == "setup" and schemes.get(op.accel) == "concurrent" and op.setup_input() is not None:
            state = op.setup_input()
            launch = next((o for o in block.ops[:index] if o.kind == "launch" and o.launch_state() is state), None)
            if launch is None:
                continue
            wait = next((o for o in block.ops[block.index(launch) + 1:index]
                         if o.kind == "await" and o.operands[0] is launch.result), None)
            if wait is None:
                continue
            between = block.ops[block.index(wait) + 1:index]
            moved = backward_slice(op, between)
            if not is_pure_sequence(moved) or any(o.kind in ("setup", "host-work") for o in moved):
                logger.debug("overlap skipped: impure producer of a setup")
                continue
            if any(touches_accel(o, op.accel) for o in between if o not in moved):
                continue
            return wait, op, moved
    return None


def overlap_in_block(block: Block, schemes: Mapping[str, str]) -> int:
    moved = 0
    for op in list(block.ops):
        for region in op.regions:
            moved += overlap_in_block(region, schemes)
    while True:
        found = find_overlap(block, schemes)
        if found is None:
            return moved
        wait, setup, producers = found
        for op in producers + [setup]:
            op.erase()
            block.insert_before(wait, op)
        moved += 1


def overlap_block(program: Program, schemes: Optional[Mapping[str, str]] = None) -> Program:
    """Function to move setups of concurrent accelerators in front of the previous await.

    Args:
        program (Program): traced, verified input, left untouched.
        schemes (Mapping): accelerator -> scheme, missing ones count as sequential.

    Returns:
        Program: copy where configuration overlaps the running job.
    """
    schemes = dict(schemes or {})
    result = clone_program(program)
    for function in result.functions:
        logger.info(f"Running overlap on function @{function.name}")
        moved = overlap_in_block(function.body, schemes)
        logger.debug(f"overlap moved {moved} setup(s) in @{function.name}")
    return result
