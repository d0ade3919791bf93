""" Unittest TestSuite -> tiled matmul generator """
import json
import unittest
import logging
from accel_config_toolkit.accel_model.descriptor_loader import descriptor_map, resolve_descriptor
from accel_config_toolkit.basemodel_validator.pass_pipeline_model import PassPipeline
from accel_config_toolkit.benchgen.matmul_generator import (
    gen_tiled_matmul, load_matmul_spec, rescale_spec, resolve_matmul_spec, sweep)
from accel_config_toolkit.errors import MatmulSpecError
from accel_config_toolkit.ir.ir_verifier import verify
from accel_config_toolkit.passes.pass_pipeline_main import run_pipeline
from accel_config_toolkit.sim.simulator import simulate
# set up logging for this test file
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s")
# logger - matmul generator
logger = logging.getLogger("TestMatmulGenerator")


def shipped(descriptor_name: str, spec_name: str):
    """(descriptor, spec, descriptor map) of a shipped pair."""
    descriptor = resolve_descriptor(descriptor_name)
    return descriptor, resolve_matmul_spec(spec_name, descriptor), descriptor_map([descriptor])


class TestMatmulGenerator(unittest.TestCase):
    """Tests for gen_tiled_matmul, rescale_spec and sweep"""

    def test_total_ops_of_64_cube(self):
        """64x64x64 -> 524,288 ops over 64 tile launches"""
        logger.info("Running test_total_ops_of_64_cube")
        # define
        descriptor, spec, descriptors = shipped("gemmini-like", "gemmini-like-matmul")
        # call function
        program = gen_tiled_matmul(spec, descriptor.name, descriptor)
        result = simulate(program, descriptors)
        # assert expected
        self.assertEqual(verify(program, descriptors), [])
        self.assertEqual(result.total_ops, 524288)
        self.assertEqual(result.total_ops, spec.total_ops())
        self.assertEqual(len(result.trace), 64)
        self.assertEqual([op.kind for op in program.walk()].count("for"), 3)

    def test_single_tile_has_no_loops(self):
        """8x8x8 with 8x8x8 tiles -> one launch, no loop"""
        logger.info("Running test_single_tile_has_no_loops")
        descriptor, template, descriptors = shipped("opengemm-like", "opengemm-like-matmul")
        spec = rescale_spec(template, 8)
        self.assertEqual(spec.tile_k, 8)
        program = gen_tiled_matmul(spec, descriptor.name, descriptor)
        kinds = [op.kind for op in program.walk()]
        self.assertNotIn("for", kinds)
        self.assertEqual(kinds.count("launch"), 1)
        self.assertEqual(simulate(program, descriptors).total_ops, 2 * 8 ** 3)

    def test_innermost_body_recomputes_loop_fields(self):
        """the unoptimized innermost setup writes every mapped field"""
        logger.info("Running test_innermost_body_recomputes_loop_fields")
        descriptor, spec, _ = shipped("opengemm-like", "opengemm-like-matmul")
        program = gen_tiled_matmul(spec, descriptor.name, descriptor)
        setups = [op for op in program.walk() if op.kind == "setup"]
        global_fields = [entry.field for entry in spec.field_map if not entry.loop_dependent]
        self.assertEqual(setups[0].field_names, global_fields)
        self.assertEqual(setups[-1].field_names, [entry.field for entry in spec.field_map])

    def test_full_pipeline_leaves_loop_fields_inside(self):
        """after all passes, setups in the innermost loop write only loop-dependent fields"""
        logger.info("Running test_full_pipeline_leaves_loop_fields_inside")
        descriptor, spec, descriptors = shipped("opengemm-like", "opengemm-like-matmul")
        program = gen_tiled_matmul(spec, descriptor.name, descriptor)
        optimized = run_pipeline(program, PassPipeline.full(), descriptors)
        loop_fields = {entry.field for entry in spec.field_map if entry.loop_dependent}
        innermost = [op for op in optimized.walk()
                     if op.kind == "for" and not any(inner.kind == "for" for inner in op.body.walk())]
        self.assertTrue(innermost)
        for loop in innermost:
            for op in loop.body.walk():
                if op.kind == "setup":
                    self.assertTrue(set(op.field_names) <= loop_fields, msg=str(op.field_names))
        self.assertEqual(simulate(optimized, descriptors).total_ops, spec.total_ops())

    def test_sweep_orders_sizes(self):
        """one program per size, ascending"""
        logger.info("Running test_sweep_orders_sizes")
        descriptor, template, _ = shipped("opengemm-like", "opengemm-like-matmul")
        programs = sweep([128, 32, 64, 256], template, descriptor.name, descriptor)
        self.assertEqual([size for size, _ in programs], [32, 64, 128, 256])
        self.assertEqual(sweep([], template, descriptor.name), [])

    # error cases
    def test_loop_dependent_field_marked_global(self):
        """an address field outside the loop nest is rejected"""
        logger.info("Running test_loop_dependent_field_marked_global")
        _, template, _ = shipped("opengemm-like", "opengemm-like-matmul")
        raw = template.model_dump()
        raw["field_map"] = [dict(entry, loop_dependent=False) if entry["role"] == "addr" else entry
                            for entry in raw["field_map"]]
        spec = load_matmul_spec(json.dumps(raw))
        with self.assertRaises(MatmulSpecError):
            gen_tiled_matmul(spec, "opengemm")

    def test_undeclared_field(self):
        """mapped fields must exist in the descriptor"""
        logger.info("Running test_undeclared_field")
        gemmini = resolve_descriptor("gemmini-like")
        _, template, _ = shipped("opengemm-like", "opengemm-like-matmul")
        with self.assertRaises(MatmulSpecError):
            gen_tiled_matmul(template, gemmini.name, gemmini)
        with self.assertRaises(MatmulSpecError):
            resolve_matmul_spec("opengemm-like-matmul", gemmini)

    def test_invalid_specs(self):
        """bad tiling, bad JSON, unknown names and sizes that break the tiling"""
        logger.info("Running test_invalid_specs")
        _, template, _ = shipped("gemmini-like", "gemmini-like-matmul")
        raw = dict(template.model_dump(), tile_m=24)
        with self.assertRaises(MatmulSpecError):
            load_matmul_spec(json.dumps(raw))
        with self.assertRaises(MatmulSpecError):
            load_matmul_spec("{")
        with self.assertRaises(MatmulSpecError):
            resolve_matmul_spec("no-such-spec")
        with self.assertRaises(MatmulSpecError):
            rescale_spec(template, 24)


# add the standard unittest entry point
if __name__ == "__main__":
    unittest.main(verbosity=2)

    # cli cmd
    # python -m unittest tests/test_benchgen/test_matmul_generator.py
