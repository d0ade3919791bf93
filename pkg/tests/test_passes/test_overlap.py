""" Unittest TestSuite -> loop pipelining and block overlap """
import unittest
import logging
from accel_config_toolkit.ir.ir_builder import call_op, const_op, host_work_op, launch_op, setup_op
from accel_config_toolkit.ir.ir_parser import parse_program
from accel_config_toolkit.ir.ir_utils import structurally_equal
from accel_config_toolkit.ir.ir_verifier import verify
from accel_config_toolkit.passes.overlap import is_pure_sequence, overlap_block, pipeline_loops
from accel_config_toolkit.passes.setup_cleanup import cleanup_setups
from accel_config_toolkit.passes.setup_dedup import deduplicate_setup
from accel_config_toolkit.passes.setup_hoisting import hoist_loop_invariant_setup
from accel_config_toolkit.passes.state_tracing import trace_states
from accel_config_toolkit.sim.simulator import simulate
from accel_config_toolkit.sim.trace_compare import trace_equivalent
from tests.fixtures import KERNEL_LOOP, STRAIGHT_LINE, acc_descriptors, body_kinds
# set up logging for this test file
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s")
# logger - overlap passes
logger = logging.getLogger("TestOverlap")

CONCURRENT = {"acc": "concurrent"}
SEQUENTIAL = {"acc": "sequential"}

# kernel loop whose setup depends on an external call
CALL_FED_LOOP = """
accel "acc"
func @main() {
  %s0 = setup "acc" () : state<"acc">
  %r = for %i = 0 to 4 step 1 iter(%s = %s0) : i32 {
    %v = call @next(%i) effects = none cycles = 2 : i32
    %s1 = setup "acc" (k = %v) from %s : state<"acc">
    %t = launch %s1 ops = 1024 : token<"acc">
    await %t
    yield %s1
  }
}
"""


def prepared_kernel_loop():
    """KERNEL_LOOP after trace, hoist-loop, dedup and cleanup."""
    program = parse_program(KERNEL_LOOP)
    for run_pass in (trace_states, hoist_loop_invariant_setup, deduplicate_setup, cleanup_setups):
        program = run_pass(program)
    return program


def short_loop(upper: int) -> str:
    return KERNEL_LOOP.replace("0 to 4", f"0 to {upper}")


class TestPipelineLoops(unittest.TestCase):
    """Tests for pipeline_loops"""

    def test_kernel_loop_is_pipelined(self):
        """first setup before the loop, next setup between launch and await, last iteration peeled"""
        logger.info("Running test_kernel_loop_is_pipelined")
        # define
        program = prepared_kernel_loop()
        # call function
        pipelined = pipeline_loops(program, CONCURRENT)
        # assert expected
        self.assertEqual(verify(pipelined), [])
        body = pipelined.functions[0].body
        loop = next(op for op in body.ops if op.kind == "for")
        outside = [op for op in body.ops if op.kind == "setup"]
        self.assertEqual([op.field_names for op in outside], [["m", "n"], ["k"]])
        self.assertEqual(outside[1].setup_fields()[0][1].defining_op.attributes["value"], 0)
        self.assertEqual(loop.attributes["upper"], 3)
        self.assertEqual(body_kinds(loop.body), ["launch", "arith", "setup", "await", "yield"])
        self.assertEqual(body_kinds(body)[body.index(loop) + 1:], ["launch", "await"])

    def test_pipelining_keeps_trace_and_saves_cycles(self):
        """same launches, configuration hidden behind the running job"""
        logger.info("Running test_pipelining_keeps_trace_and_saves_cycles")
        descriptors = acc_descriptors("concurrent")
        original = parse_program(KERNEL_LOOP)
        prepared = prepared_kernel_loop()
        pipelined = pipeline_loops(prepared, CONCURRENT)
        before, after = simulate(prepared, descriptors), simulate(pipelined, descriptors)
        self.assertTrue(trace_equivalent(simulate(original, descriptors), after))
        self.assertEqual([event.snapshot["k"] for event in after.trace], [0, 1, 2, 3])
        self.assertEqual(after.config_bytes_written, before.config_bytes_written)
        self.assertLess(after.total_cycles, before.total_cycles)

    def test_sequential_loop_is_unchanged(self):
        """no staged registers, nothing to overlap"""
        logger.info("Running test_sequential_loop_is_unchanged")
        program = prepared_kernel_loop()
        self.assertTrue(structurally_equal(pipeline_loops(program, SEQUENTIAL), program))
        self.assertTrue(structurally_equal(pipeline_loops(program), program))

    def test_empty_loop_is_skipped(self):
        """a loop that never runs is left alone"""
        logger.info("Running test_empty_loop_is_skipped")
        program = trace_states(parse_program(short_loop(0)))
        self.assertTrue(structurally_equal(pipeline_loops(program, CONCURRENT), program))

    def test_single_trip_loop_becomes_prologue_and_epilogue(self):
        """one iteration: setup before the loop, empty-range loop, launch after it"""
        logger.info("Running test_single_trip_loop_becomes_prologue_and_epilogue")
        # define
        descriptors = acc_descriptors("concurrent")
        original = parse_program(short_loop(1))
        program = trace_states(original)
        # call function
        pipelined = pipeline_loops(program, CONCURRENT)
        # assert expected
        self.assertEqual(verify(pipelined), [])
        body = pipelined.functions[0].body
        loop = next(op for op in body.ops if op.kind == "for")
        self.assertEqual(loop.attributes["upper"], 0)
        self.assertEqual(loop.trip_count(), 0)
        self.assertEqual(body_kinds(body)[body.index(loop) + 1:], ["launch", "await"])
        self.assertEqual([op.field_names for op in body.ops if op.kind == "setup"][-1], ["k", "n"])
        result = simulate(pipelined, descriptors)
        self.assertTrue(trace_equivalent(simulate(original, descriptors), result))
        self.assertEqual(len(result.trace), 1)

    def test_setup_fed_by_call_is_skipped(self):
        """field values computed by a call keep the loop as is"""
        logger.info("Running test_setup_fed_by_call_is_skipped")
        program = parse_program(CALL_FED_LOOP)
        self.assertEqual(verify(program), [])
        self.assertTrue(structurally_equal(pipeline_loops(program, CONCURRENT), program))


class TestOverlapBlock(unittest.TestCase):
    """Tests for overlap_block and is_pure_sequence"""

    def test_setup_moves_in_front_of_await(self):
        """launch; await; setup -> launch; setup; await"""
        logger.info("Running test_setup_moves_in_front_of_await")
        descriptors = acc_descriptors("concurrent")
        program = parse_program(STRAIGHT_LINE)
        traced = trace_states(program)
        # call function
        overlapped = overlap_block(traced, CONCURRENT)
        # assert expected
        self.assertEqual(verify(overlapped), [])
        self.assertEqual(
            body_kinds(overlapped.functions[0].body),
            ["const", "const", "setup", "launch", "setup", "await", "launch", "await"])
        self.assertTrue(trace_equivalent(simulate(program, descriptors), simulate(overlapped, descriptors)))

    def test_sequential_block_is_unchanged(self):
        """sequential accelerators keep their order"""
        logger.info("Running test_sequential_block_is_unchanged")
        traced = trace_states(parse_program(STRAIGHT_LINE))
        self.assertTrue(structurally_equal(overlap_block(traced, SEQUENTIAL), traced))

    def test_is_pure_sequence(self):
        """movable ops across a running job"""
        logger.info("Running test_is_pure_sequence")
        value = const_op(1)
        state = setup_op("acc", [("k", value.result)])
        self.assertTrue(is_pure_sequence([]))
        self.assertTrue(is_pure_sequence([value, state, host_work_op(3), call_op("f", effects="none")]))
        self.assertFalse(is_pure_sequence([call_op("f")]))
        self.assertFalse(is_pure_sequence([call_op("f", effects="all")]))
        self.assertFalse(is_pure_sequence([launch_op(state.result, 64)]))


# add the standard unittest entry point
if __name__ == "__main__":
    unittest.main(verbosity=2)

    # cli cmd
    # python -m unittest tests/test_passes/test_overlap.py
