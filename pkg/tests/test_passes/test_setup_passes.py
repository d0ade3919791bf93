""" Unittest TestSuite -> state tracing, hoisting, dedup and cleanup passes """
import unittest
import logging
from accel_config_toolkit.ir.ir_parser import parse_program
from accel_config_toolkit.ir.ir_printer import print_program
from accel_config_toolkit.ir.ir_utils import structurally_equal
from accel_config_toolkit.ir.ir_verifier import verify
from accel_config_toolkit.ir.random_program import random_program
from accel_config_toolkit.passes.setup_cleanup import cleanup_setups
from accel_config_toolkit.passes.setup_dedup import deduplicate_setup
from accel_config_toolkit.passes.setup_hoisting import hoist_into_branches, hoist_loop_invariant_setup
from accel_config_toolkit.passes.state_tracing import trace_states
from accel_config_toolkit.sim.simulator import simulate
from accel_config_toolkit.sim.trace_compare import trace_equivalent
from tests.fixtures import KERNEL_LOOP, RANDOM_FIELDS, RANDOM_SEEDS, STRAIGHT_LINE, acc_descriptors, body_kinds
# set up logging for this test file
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s")
# logger - setup passes
logger = logging.getLogger("TestSetupPasses")

# a setup after an if/else whose branches both configure the accelerator
BRANCH_JOIN = """
accel "acc"
func @main() {
  %c = const 1 : i1
  %a = const 8 : i32
  %b = const 16 : i32
  %k = const 3 : i32
  %s0 = setup "acc" (k = %k) : state<"acc">
  %t0 = launch %s0 ops = 64 : token<"acc">
  await %t0
  if %c {
    %s1 = setup "acc" (n = %a, k = %k) : state<"acc">
    %t1 = launch %s1 ops = 64 : token<"acc">
    await %t1
  } else {
    %s2 = setup "acc" (n = %b) : state<"acc">
    %t2 = launch %s2 ops = 64 : token<"acc">
    await %t2
  }
  %s3 = setup "acc" (n = %a, k = %k) : state<"acc">
  %t3 = launch %s3 ops = 64 : token<"acc">
  await %t3
}
"""


def setups_of(program):
    return [op for op in program.walk() if op.kind == "setup"]


def apply(program, *passes):
    for run_pass in passes:
        program = run_pass(program)
        assert verify(program) == [], run_pass.__name__
    return program


class TestStateTracing(unittest.TestCase):
    """Tests for trace_states"""

    def test_straight_line_setups_are_chained(self):
        """the second setup builds on the first"""
        logger.info("Running test_straight_line_setups_are_chained")
        # define
        program = parse_program(STRAIGHT_LINE)
        # call function
        traced = apply(program, trace_states)
        # assert expected
        first, second = setups_of(traced)
        self.assertIsNone(first.setup_input())
        self.assertIs(second.setup_input(), first.result)
        # input left untouched
        self.assertIsNone(setups_of(program)[1].setup_input())

    def test_loop_carries_state(self):
        """a loop that sets up gets the state as iteration argument"""
        logger.info("Running test_loop_carries_state")
        traced = apply(parse_program(KERNEL_LOOP), trace_states)
        loop = next(op for op in traced.walk() if op.kind == "for")
        outer, inner = setups_of(traced)
        self.assertEqual(len(loop.iter_args), 1)
        self.assertIs(loop.operands[0], outer.result)
        self.assertIs(inner.setup_input(), loop.iter_args[0])
        self.assertEqual(loop.body.terminator.operands, [inner.result])

    def test_clobbering_call_resets_knowledge(self):
        """a setup after an opaque call stays unlinked"""
        logger.info("Running test_clobbering_call_resets_knowledge")
        text = """
accel "acc"
func @main() {
  %c = const 1 : i32
  %s1 = setup "acc" (k = %c) : state<"acc">
  call @opaque()
  %s2 = setup "acc" (n = %c) : state<"acc">
  call @pure() effects = none
  %s3 = setup "acc" (m = %c) : state<"acc">
}
"""
        _, second, third = setups_of(apply(parse_program(text), trace_states))
        self.assertIsNone(second.setup_input())
        self.assertIs(third.setup_input(), second.result)


class TestSetupDedup(unittest.TestCase):
    """Tests for deduplicate_setup"""

    def test_known_field_is_dropped(self):
        """setup(k=5); launch; setup(k=5, n=x) -> the second writes only n"""
        logger.info("Running test_known_field_is_dropped")
        descriptors = acc_descriptors("sequential")
        program = parse_program(STRAIGHT_LINE)
        # call function
        optimized = apply(program, trace_states, deduplicate_setup)
        # assert expected
        self.assertEqual([op.field_names for op in setups_of(optimized)], [["k"], ["n"]])
        before, after = simulate(program, descriptors), simulate(optimized, descriptors)
        self.assertTrue(trace_equivalent(before, after))
        self.assertEqual(after.config_bytes_written, before.config_bytes_written - 4)

    def test_distinct_values_are_kept(self):
        """two const ops with one literal are different SSA values"""
        logger.info("Running test_distinct_values_are_kept")
        text = """
accel "acc"
func @main() {
  %a = const 5 : i32
  %b = const 5 : i32
  %s1 = setup "acc" (k = %a) : state<"acc">
  %t1 = launch %s1 ops = 64 : token<"acc">
  await %t1
  %s2 = setup "acc" (k = %b) : state<"acc">
  %t2 = launch %s2 ops = 64 : token<"acc">
  await %t2
}
"""
        optimized = apply(parse_program(text), trace_states, deduplicate_setup)
        self.assertEqual([op.field_names for op in setups_of(optimized)], [["k"], ["k"]])

    def test_loop_invariant_field_needs_hoisting(self):
        """without hoisting the loop setup keeps both fields"""
        logger.info("Running test_loop_invariant_field_needs_hoisting")
        optimized = apply(parse_program(KERNEL_LOOP), trace_states, deduplicate_setup)
        self.assertEqual(setups_of(optimized)[1].field_names, ["k", "n"])


class TestSetupHoisting(unittest.TestCase):
    """Tests for hoist_into_branches and hoist_loop_invariant_setup"""

    def test_hoist_into_branches_then_dedup(self):
        """the joined setup moves into both branches where dedup sees it"""
        logger.info("Running test_hoist_into_branches_then_dedup")
        descriptors = acc_descriptors("sequential")
        program = parse_program(BRANCH_JOIN)
        # call function
        optimized = apply(program, trace_states, hoist_into_branches, deduplicate_setup, cleanup_setups)
        # assert expected
        body = optimized.functions[0].body
        branch = next(op for op in body.ops if op.kind == "if")
        after_branch = body.ops[body.index(branch) + 1:]
        self.assertNotIn("setup", [op.kind for op in after_branch])
        self.assertEqual([op.field_names for op in branch.then_block.ops if op.kind == "setup"], [["n"]])
        self.assertEqual([op.field_names for op in branch.else_block.ops if op.kind == "setup"], [["n"], ["n"]])
        self.assertTrue(trace_equivalent(simulate(program, descriptors), simulate(optimized, descriptors)))

    def test_hoist_loop_invariant_field(self):
        """n = base leaves the loop, k = i stays"""
        logger.info("Running test_hoist_loop_invariant_field")
        program = parse_program(KERNEL_LOOP)
        hoisted = apply(program, trace_states, hoist_loop_invariant_setup)
        body = hoisted.functions[0].body
        loop = next(op for op in body.ops if op.kind == "for")
        pre = body.ops[body.index(loop) - 1]
        self.assertEqual(pre.kind, "setup")
        self.assertEqual(pre.field_names, ["n"])
        self.assertIs(loop.operands[0], pre.result)
        self.assertEqual([op.field_names for op in loop.body.ops if op.kind == "setup"], [["k"]])
        # cleanup folds the two setups in front of the loop
        merged = apply(hoisted, cleanup_setups)
        outside = [op for op in merged.functions[0].body.ops if op.kind == "setup"]
        self.assertEqual([op.field_names for op in outside], [["m", "n"]])
        descriptors = acc_descriptors("sequential")
        self.assertTrue(trace_equivalent(simulate(program, descriptors), simulate(merged, descriptors)))

    def test_field_written_twice_is_not_hoisted(self):
        """two writes of n in the body keep n inside"""
        logger.info("Running test_field_written_twice_is_not_hoisted")
        text = """
accel "acc"
func @main() {
  %base = const 4096 : i32
  %one = const 1 : i32
  for %i = 0 to 4 step 1 : i32 {
    %s = setup "acc" (n = %base) : state<"acc">
    %t = launch %s ops = 64 : token<"acc">
    await %t
    %s2 = setup "acc" (n = %one) : state<"acc">
    %t2 = launch %s2 ops = 64 : token<"acc">
    await %t2
  }
}
"""
        hoisted = apply(parse_program(text), trace_states, hoist_loop_invariant_setup)
        body = hoisted.functions[0].body
        loop = next(op for op in body.ops if op.kind == "for")
        self.assertEqual([op.field_names for op in body.ops if op.kind == "setup"], [[]])
        self.assertEqual([op.field_names for op in loop.body.ops if op.kind == "setup"], [["n"], ["n"]])


class TestSetupCleanup(unittest.TestCase):
    """Tests for cleanup_setups"""

    def test_empty_setup_is_removed(self):
        """a zero-field setup is replaced by its input state"""
        logger.info("Running test_empty_setup_is_removed")
        text = """
accel "acc"
func @main() {
  %c = const 1 : i32
  %s1 = setup "acc" (k = %c) : state<"acc">
  %t1 = launch %s1 ops = 64 : token<"acc">
  await %t1
  %s2 = setup "acc" () from %s1 : state<"acc">
  %t2 = launch %s2 ops = 64 : token<"acc">
  await %t2
}
"""
        cleaned = apply(parse_program(text), cleanup_setups)
        setups = setups_of(cleaned)
        self.assertEqual(len(setups), 1)
        launches = [op for op in cleaned.walk() if op.kind == "launch"]
        self.assertTrue(all(op.launch_state() is setups[0].result for op in launches))

    def test_adjacent_setups_merge_later_wins(self):
        """k of the later setup wins, field order follows first occurrence"""
        logger.info("Running test_adjacent_setups_merge_later_wins")
        text = """
accel "acc"
func @main() {
  %a = const 1 : i32
  %b = const 2 : i32
  %s1 = setup "acc" (k = %a, n = %a) : state<"acc">
  %s2 = setup "acc" (k = %b) from %s1 : state<"acc">
  %t = launch %s2 ops = 64 : token<"acc">
  await %t
}
"""
        cleaned = apply(parse_program(text), cleanup_setups)
        self.assertEqual(body_kinds(cleaned.functions[0].body), ["const", "const", "setup", "launch", "await"])
        self.assertIn('%2 = setup "acc" (k = %1, n = %0) : state<"acc">', print_program(cleaned))


class TestPassIdempotence(unittest.TestCase):
    """Running dedup or cleanup a second time changes nothing"""

    # property
    def test_dedup_is_idempotent(self):
        """dedup(dedup(p)) equals dedup(p) on random programs"""
        logger.info("Running test_dedup_is_idempotent")
        for seed in RANDOM_SEEDS:
            # define
            once = deduplicate_setup(trace_states(random_program(seed, RANDOM_FIELDS)))
            # call function
            twice = deduplicate_setup(once)
            # assert expected
            self.assertTrue(structurally_equal(twice, once), msg=f"seed {seed}")

    def test_cleanup_is_idempotent(self):
        """cleanup(cleanup(p)) equals cleanup(p) on random programs"""
        logger.info("Running test_cleanup_is_idempotent")
        for seed in RANDOM_SEEDS:
            once = cleanup_setups(trace_states(random_program(seed, RANDOM_FIELDS)))
            self.assertTrue(structurally_equal(cleanup_setups(once), once), msg=f"seed {seed}")


# add the standard unittest entry point
if __name__ == "__main__":
    unittest.main(verbosity=2)

    # cli cmd
    # python -m unittest tests/test_passes/test_setup_passes.py
