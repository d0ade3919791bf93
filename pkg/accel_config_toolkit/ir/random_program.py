"""Seeded generator of random verified programs for property tests."""
import random
from typing import Dict, List, Mapping, Optional
from accel_config_toolkit.ir.ir_builder import Builder
from accel_config_toolkit.ir.ir_types import Block, Function, IntegerType, Program, Value
from accel_config_toolkit.ir.ir_utils import writes_accel

# maximum nesting of for/if regions
MAX_DEPTH = 2


class RandomProgramGenerator:
    """Builds one random program from a seed.

    Blocks keep a "current state" per accelerator; a launch always uses the
    current state, so generated programs respect the single-live-state rule
    without state tracing.
    """

    def __init__(self, seed: int, fields: Mapping[str, List[str]], max_ops: int = 14):
        self.rng = random.Random(seed)
        # accelerator name -> declared field names
        self.fields = {name: list(names) for name, names in fields.items()}
        self.accels = list(self.fields)
        self.max_ops = max_ops

    # 1. small helpers
    def pick_int(self, pool: List[Value], width: int = 32) -> Optional[Value]:
        candidates = [v for v in pool if v.type == IntegerType(width)]
        return self.rng.choice(candidates) if candidates else None

    def new_const(self, builder: Builder, pool: List[Value], width: int = 32) -> Value:
        value = builder.const(self.rng.choice([0, 1, 2, 3, 4, 8, 16, 64, 255, self.rng.randrange(1 << 16)]), width)
        pool.append(value)
        return value

    def int_operand(self, builder: Builder, pool: List[Value], width: int = 32) -> Value:
        value = self.pick_int(pool, width)
        if value is None or self.rng.random() < 0.2:
            value = self.new_const(builder, pool, width)
        return value

    def emit_setup(self, builder: Builder, pool: List[Value], current: Dict, accel: str) -> Value:
        names = self.fields[accel]
        count = self.rng.randint(0 if self.rng.random() < 0.1 else 1, min(4, len(names)))
        chosen = self.rng.sample(names, count)
        pairs = [(name, self.int_operand(builder, pool)) for name in chosen]
        # sometimes thread explicitly, otherwise leave it to state tracing
        input_state = current.get(accel) if self.rng.random() < 0.4 else None
        state = builder.setup(accel, pairs, input_state)
        current[accel] = state
        return state

    def emit_launch(self, builder: Builder, pool: List[Value], current: Dict, tokens: List[Value], accel: str):
        state = current.get(accel) or self.emit_setup(builder, pool, current, accel)
        ops = self.rng.choice([0, 64, 512, 1024, 4096, self.rng.randrange(20000)])
        pairs = []
        # launch-semantic write
        if self.rng.random() < 0.15:
            pairs = [(self.rng.choice(self.fields[accel]), self.int_operand(builder, pool))]
        if self.rng.random() < 0.1:
            ops = builder.arith("and", self.int_operand(builder, pool), builder.const(0x3FFF))
        tokens.append(builder.launch(state, ops, pairs))

    # 2. blocks
    def fill_block(self, block: Block, pool: List[Value], current: Dict, depth: int, budget: int):
        builder = Builder(block)
        pool = list(pool)
        tokens: List[Value] = []
        for _ in range(budget):
            choice = self.rng.random()
            accel = self.rng.choice(self.accels)
            if choice < 0.12:
                self.new_const(builder, pool)
            elif choice < 0.24:
                kind = self.rng.choice(["add", "sub", "mul", "and", "or", "xor", "shl", "shr"])
                pool.append(builder.arith(kind, self.int_operand(builder, pool), self.int_operand(builder, pool)))
            elif choice < 0.40:
                self.emit_setup(builder, pool, current, accel)
            elif choice < 0.55:
                self.emit_launch(builder, pool, current, tokens, accel)
            elif choice < 0.65 and tokens:
                builder.await_(tokens.pop(self.rng.randrange(len(tokens))))
            elif choice < 0.72:
                self.emit_call(builder, pool, current)
            elif choice < 0.76:
                builder.host_work(self.rng.randint(0, 20))
            elif choice < 0.86 and depth < MAX_DEPTH:
                self.emit_if(builder, pool, current, depth)
            elif depth < MAX_DEPTH:
                if self.rng.random() < 0.5:
                    self.emit_kernel_loop(builder, pool, current, accel)
                else:
                    self.emit_for(builder, pool, current, depth)
        # leave some tokens unawaited on purpose
        for token in tokens:
            if self.rng.random() < 0.7:
                builder.await_(token)
        return pool

    def emit_call(self, builder: Builder, pool: List[Value], current: Dict):
        effects = self.rng.choice([None, "all", "none", "none"])
        result_types = [IntegerType(32)] if self.rng.random() < 0.3 else []
        args = [self.int_operand(builder, pool)] if self.rng.random() < 0.5 else []
        op = builder.call(self.rng.choice(["printf", "rand", "log"]), args, result_types, effects,
                          self.rng.choice([0, 0, 5, 12]))
        pool.extend(op.results)
        if effects != "none":
            current.clear()

    def emit_if(self, builder: Builder, pool: List[Value], current: Dict, depth: int):
        condition = builder.const(self.rng.randint(0, 1), 1)
        with_result = self.rng.random() < 0.3
        op = builder.if_(condition, [IntegerType(32)] if with_result else [])
        for region in op.regions:
            branch_pool = self.fill_block(region, pool, dict(current), depth + 1, self.rng.randint(0, 4))
            branch_builder = Builder(region)
            branch_builder.yield_([self.int_operand(branch_builder, branch_pool)] if with_result else [])
        self.forget_written(op, current)
        pool.extend(op.results)

    def emit_for(self, builder: Builder, pool: List[Value], current: Dict, depth: int):
        lower = self.rng.randint(0, 2)
        upper = lower + self.rng.randint(0, 3)
        inits = [self.int_operand(builder, pool)] if self.rng.random() < 0.4 else []
        op = builder.for_(lower, upper, self.rng.randint(1, 2), inits)
        body_pool = list(pool) + list(op.body.arguments)
        # outer states may not be used inside a body that writes them
        body_pool = self.fill_block(op.body, body_pool, {}, depth + 1, self.rng.randint(1, 5))
        body_builder = Builder(op.body)
        yielded = []
        for arg in op.iter_args:
            yielded.append(body_builder.arith("add", arg, self.int_operand(body_builder, body_pool)))
        body_builder.yield_(yielded)
        self.forget_written(op, current)
        pool.extend(op.results)

    def emit_kernel_loop(self, builder: Builder, pool: List[Value], current: Dict, accel: str):
        """Loop of the pipelining shape: pure ops, setup, launch, await."""
        # loop-invariant operands are defined before the loop
        stride, base, scalar = (self.int_operand(builder, pool) for _ in range(3))
        lower = self.rng.randint(0, 1)
        op = builder.for_(lower, lower + self.rng.randint(1, 4), self.rng.randint(1, 2))
        body = Builder(op.body)
        iv = op.induction_var
        address = body.arith("add", body.arith("mul", iv, stride), base)
        names = self.rng.sample(self.fields[accel], min(len(self.fields[accel]), self.rng.randint(1, 3)))
        pairs = [(name, self.rng.choice([iv, address, scalar])) for name in names]
        state = body.setup(accel, pairs)
        token = body.launch(state, self.rng.choice([256, 1024, 4096]))
        body.await_(token)
        body.yield_()
        self.forget_written(op, current)

    def forget_written(self, op, current: Dict):
        for accel in list(current):
            if writes_accel(op, accel):
                current[accel] = None
        if any(inner.kind == "extern-call" and inner.effects != "none" for inner in op.walk()):
            current.clear()

    # 3. program
    def generate(self) -> Program:
        functions = []
        for index in range(self.rng.choice([1, 1, 1, 2])):
            body = Block()
            self.fill_block(body, [], {}, 0, self.rng.randint(1, self.max_ops))
            functions.append(Function("main" if index == 0 else f"f{index}", body))
        return Program(list(self.accels), functions)


def random_program(seed: int, fields: Mapping[str, List[str]], max_ops: int = 14) -> Program:
    """Function to build a random verified program.

    Args:
        seed (int): generator seed, equal seeds give equal programs.
        fields (Mapping): accelerator name -> declared field names.
        max_ops (int): upper bound of top-level generation steps.

    Returns:
        Program: program that passes verify.
    """
    return RandomProgramGenerator(seed, fields, max_ops).generate()
