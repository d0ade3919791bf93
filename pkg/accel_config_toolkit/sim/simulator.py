"""Cycle-level interpreter of programs against accelerator descriptors.

One host clock drives execution. Every accelerator owns a live register file,
a staged copy (concurrent scheme only) and the cycle at which its current job
finishes. Launch snapshots form the launch trace, the correctness oracle of
all passes.
"""
from typing import Dict, List, Mapping, Optional, Set
from loguru import logger
from accel_config_toolkit import settings
from accel_config_toolkit.accel_model.descriptor_loader import job_duration, write_cycles
from accel_config_toolkit.basemodel_validator.descriptor_model import AcceleratorDescriptor
from accel_config_toolkit.basemodel_validator.sim_result_model import LaunchEvent, SimResult, TimelineSegment
from accel_config_toolkit.errors import SimulationError, SimulationResourceError
from accel_config_toolkit.ir.ir_builder import mask
from accel_config_toolkit.ir.ir_types import Block, IntegerType, Operation, Program, Value


def calc_operations(program: Program) -> Set[int]:
    """Function to find the pure ops whose results reach a setup or launch field.

    Reachability follows yields, iteration arguments and if results.

    Args:
        program (Program): program to analyse.

    Returns:
        set: ids of the const/arith operations counted as parameter calculation.
    """
    # region-carried values: block argument / op result -> values flowing into it
    sources: Dict[Value, List[Value]] = {}
    pending: List[Value] = []
    for op in program.walk():
        if op.kind == "setup":
            pending.extend(value for _, value in op.setup_fields())
        elif op.kind == "launch":
            pending.extend(value for _, value in op.launch_fields())
        elif op.kind == "for":
            yielded = op.body.terminator.operands if op.body.terminator else []
            for index, (arg, init) in enumerate(zip(op.iter_args, op.operands)):
                carried = [init] + ([yielded[index]] if index < len(yielded) else [])
                sources[arg] = carried
                sources[op.results[index]] = carried
        elif op.kind == "if":
            for index, result in enumerate(op.results):
                sources[result] = [
                    region.terminator.operands[index] for region in op.regions
                    if region.terminator is not None and index < len(region.terminator.operands)]
    # walk back from the field values to the pure ops computing them
    calc: Set[int] = set()
    seen: Set[int] = set()
    while pending:
        value = pending.pop()
        if id(value) in seen:
            continue
        seen.add(id(value))
        op = value.defining_op
        if op is not None and op.kind in ("const", "arith"):
            calc.add(id(op))
            pending.extend(op.operands)
        pending.extend(sources.get(value, []))
    return calc


def evaluate_arith(kind: str, lhs: int, rhs: int, width: int) -> int:
    """Two's-complement wrap-around arithmetic on unsigned `width`-bit values."""
    if kind == "add":
        result = lhs + rhs
    elif kind == "sub":
        result = lhs - rhs
    elif kind == "mul":
        result = lhs * rhs
    elif kind == "and":
        result = lhs & rhs
    elif kind == "or":
        result = lhs | rhs
    elif kind == "xor":
        result = lhs ^ rhs
    elif kind == "shl":
        result = lhs << rhs if rhs < width else 0
    else:
        result = lhs >> rhs if rhs < width else 0
    return mask(result, width)


class HostSimulator:
    """Interprets one program; `run` returns the SimResult."""

    def __init__(self, program: Program, descriptors: Mapping[str, AcceleratorDescriptor]):
        self.program = program
        self.descriptors = dict(descriptors)
        for accel in program.accelerators:
            if accel not in self.descriptors:
                raise SimulationError(f"no descriptor for accelerator \"{accel}\"")
        # host costs come from the first declared accelerator
        first = self.descriptors[program.accelerators[0]] if program.accelerators else None
        self.arith_cost = first.cost.arith_cost if first is not None else 0
        self.calc_ops = calc_operations(program)
        self.clock = 0
        self.busy_until: Dict[str, int] = {accel: 0 for accel in program.accelerators}
        self.live: Dict[str, Dict[str, int]] = {accel: {} for accel in program.accelerators}
        self.staged: Dict[str, Dict[str, int]] = {accel: {} for accel in program.accelerators}
        # token -> cycle at which its job finishes
        self.jobs: Dict[int, int] = {}
        self.values: Dict[Value, Optional[int]] = {}
        self.result = SimResult(schemes={accel: self.descriptors[accel].scheme for accel in program.accelerators})
        self.busy_segments: List[TimelineSegment] = []

    # 1. time accounting
    def advance(self, cycles: int, lane: str, counter: str):
        if cycles <= 0:
            return
        self.record_host(self.clock, self.clock + cycles, lane)
        self.clock += cycles
        setattr(self.result, counter, getattr(self.result, counter) + cycles)

    def idle_until(self, cycle: int):
        self.advance(cycle - self.clock, "host-idle", "host_idle_cycles")

    def record_host(self, start: int, end: int, lane: str):
        segments = self.result.segments
        if segments and segments[-1].lane == lane and segments[-1].end_cycle == start:
            segments[-1].end_cycle = end
        else:
            segments.append(TimelineSegment(start_cycle=start, end_cycle=end, lane=lane))

    def descriptor(self, accel: str) -> AcceleratorDescriptor:
        descriptor = self.descriptors.get(accel)
        if descriptor is None:
            raise SimulationError(f"no descriptor for accelerator \"{accel}\"")
        return descriptor

    # 2. register writes
    def write_fields(self, accel: str, pairs):
        # concurrent writes go to the staged copy
        descriptor = self.descriptor(accel)
        target = self.staged[accel] if descriptor.scheme == "concurrent" else self.live[accel]
        # write each field masked to its width
        for name, value in pairs:
            width = descriptor.field_width(name)
            if width is None:
                raise SimulationError(f"accelerator \"{accel}\" has no field '{name}'")
            target[name] = mask(self.values.get(value) or 0, 8 * width)
            self.result.config_bytes_written += width
        # charge the grouped write cost
        self.advance(write_cycles(descriptor, len(pairs)), "host-setup", "setup_cycles")

    # 3. operations
    def execute_block(self, block: Block) -> List[Optional[int]]:
        """Run a block; returns the yielded values."""
        for op in block.ops:
            if op.kind == "yield":
                return [self.values.get(value) for value in op.operands]
            self.execute(op)
        return []

    def execute(self, op: Operation):
        if op.kind in ("const", "arith"):
            if op.kind == "const":
                self.values[op.result] = op.attributes["value"]
            else:
                lhs, rhs = (self.values.get(v) or 0 for v in op.operands)
                self.values[op.result] = evaluate_arith(op.attributes["op"], lhs, rhs, op.result.type.width)
            if id(op) in self.calc_ops:
                self.advance(self.arith_cost, "host-calc", "calc_cycles")
            else:
                self.advance(self.arith_cost, "host-other", "other_host_cycles")
        elif op.kind == "setup":
            self.write_fields(op.accel, op.setup_fields())
        elif op.kind == "launch":
            self.execute_launch(op)
        elif op.kind == "await":
            self.execute_await(op)
        elif op.kind == "extern-call":
            for result in op.results:
                self.values[result] = 0
            self.advance(op.attributes.get("cycles", 0), "host-other", "other_host_cycles")
        elif op.kind == "host-work":
            self.advance(op.attributes.get("cycles", 0), "host-other", "other_host_cycles")
        elif op.kind == "for":
            self.execute_for(op)
        elif op.kind == "if":
            taken = op.then_block if self.values.get(op.operands[0]) else op.else_block
            for result, value in zip(op.results, self.execute_block(taken)):
                self.values[result] = value

    def execute_launch(self, op: Operation):
        accel = op.accel
        descriptor = self.descriptor(accel)
        self.write_fields(accel, op.launch_fields())
        concurrent = descriptor.scheme == "concurrent"
        # single outstanding job
        if concurrent and self.busy_until[accel] > self.clock:
            self.idle_until(self.busy_until[accel])
        # issue the launch, staged fields become live
        issue = self.clock
        self.advance(descriptor.cost.launch_cost, "host-setup", "launch_cycles")
        self.live[accel].update(self.staged[accel])
        self.staged[accel] = {}
        # record the launch snapshot
        ops = op.launch_ops()
        ops = ops if isinstance(ops, int) else (self.values.get(ops) or 0)
        snapshot = {name: self.live[accel].get(name, 0) for name in descriptor.field_names}
        self.result.trace.append(LaunchEvent(accel=accel, snapshot=snapshot, ops=ops, launch_cycle=issue))
        self.result.total_ops += ops
        # schedule the job on the accelerator
        duration = job_duration(descriptor, ops)
        start = max(self.clock, self.busy_until[accel])
        end = start + duration
        if duration:
            self.busy_segments.append(TimelineSegment(
                start_cycle=start, end_cycle=end, lane="accel-busy", accelerator=accel))
        self.result.accel_busy_cycles += duration
        self.busy_until[accel] = end
        self.jobs[id(op.result)] = end
        if not concurrent:
            # sequential: the host is stalled until the job completes
            self.idle_until(end)

    def execute_await(self, op: Operation):
        token = op.operands[0]
        descriptor = self.descriptor(token.type.accel)
        if descriptor.scheme == "sequential":
            return
        # job already done -> one poll, else wait for it
        end = self.jobs.get(id(token), 0)
        if end <= self.clock:
            self.advance(descriptor.cost.await_poll_cost, "host-other", "await_poll_cycles")
        else:
            self.idle_until(end)

    def execute_for(self, op: Operation):
        trips = op.trip_count()
        if trips > settings.SIM_TRIP_LIMIT:
            raise SimulationResourceError(
                f"loop of {trips} iterations exceeds the trip-count guard {settings.SIM_TRIP_LIMIT}")
        lower, step = op.attributes["lower"], op.attributes["step"]
        width = op.attributes.get("iv_width", 32)
        # go over each iteration, threading the carried values
        carried = [self.values.get(value) for value in op.operands]
        for trip in range(trips):
            self.values[op.induction_var] = mask(lower + trip * step, width)
            for arg, value in zip(op.iter_args, carried):
                self.values[arg] = value
            carried = self.execute_block(op.body)
        for result, value in zip(op.results, carried):
            self.values[result] = value

    # 4. whole program
    def accel_idle_segments(self, total: int) -> List[TimelineSegment]:
        idle = []
        for accel in self.program.accelerators:
            cursor = 0
            for segment in [s for s in self.busy_segments if s.accelerator == accel] + [None]:
                start = segment.start_cycle if segment is not None else total
                if start > cursor:
                    idle.append(TimelineSegment(start_cycle=cursor, end_cycle=start, lane="accel-idle", accelerator=accel))
                if segment is not None:
                    cursor = segment.end_cycle
        return idle

    def run(self) -> SimResult:
        # functions run in declaration order on one host clock
        for function in self.program.functions:
            logger.debug(f"Simulating function @{function.name}")
            self.execute_block(function.body)
        # close the accounting and merge the lanes
        self.result.host_cycles = self.clock
        self.result.total_cycles = max([self.clock] + list(self.busy_until.values()))
        self.result.segments = sorted(
            self.result.segments + self.busy_segments + self.accel_idle_segments(self.result.total_cycles),
            key=lambda s: (s.start_cycle, s.lane, s.accelerator))
        return self.result


def simulate(program: Program, descriptors: Mapping[str, AcceleratorDescriptor]) -> SimResult:
    """Function to simulate a program on one host timeline.

    Args:
        program (Program): verified program.
        descriptors (Mapping): accelerator name -> descriptor, one per declared accelerator.

    Returns:
        SimResult: cycle accounting, launch trace and timeline segments.
    """
    result = HostSimulator(program, descriptors).run()
    logger.info(
        f"Simulated {len(result.trace)} launch(es): {result.total_cycles} cycles, "
        f"{result.config_bytes_written} config bytes, {result.total_ops} ops")
    return result
