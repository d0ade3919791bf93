""" Unittest TestSuite -> roofline equations and measured points """
import math
import unittest
import logging
import numpy as np
from hypothesis import given, settings, strategies as st
from accel_config_toolkit.accel_model.descriptor_loader import descriptor_map, resolve_descriptor
from accel_config_toolkit.basemodel_validator.roofline_model import RooflineInputs, RooflinePoint
from accel_config_toolkit.basemodel_validator.sim_result_model import SimResult
from accel_config_toolkit.benchgen.matmul_generator import gen_tiled_matmul, rescale_spec, resolve_matmul_spec
from accel_config_toolkit.cli.experiment_main import ExperimentRunner
from accel_config_toolkit.errors import RooflineError
from accel_config_toolkit.roofline.roofline_equations import (
    attainable_combined, attainable_concurrent, attainable_processor, attainable_sequential,
    concurrent_sequential_gap, effective_config_bandwidth, knee, percent_of_peak)
from accel_config_toolkit.roofline.roofline_measure import (
    EXPORT_COLUMNS, classify, measure_point, predicted_speedup, roofline_curves, roofline_export, roofsurface_grid)
from tests.fixtures import make_descriptor
# set up logging for this test file
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s")
# logger - roofline
logger = logging.getLogger("TestRoofline")

# 64x64x64 matmul on the sequential 512 ops/cycle accelerator
WORKLOAD_OPS = 524288
WORKLOAD_BYTES = 2560


class TestRooflineEquations(unittest.TestCase):
    """Tests for the closed-form rooflines"""

    def test_worked_example_utilization(self):
        """peak bandwidth 16/9 -> about 41.5% of peak"""
        logger.info("Running test_worked_example_utilization")
        # define
        i_oc = WORKLOAD_OPS / WORKLOAD_BYTES
        # call function
        perf = attainable_sequential(512, 16 / 9, i_oc)
        # assert expected
        self.assertAlmostEqual(i_oc, 204.8)
        self.assertTrue(41.0 <= 100 * perf / 512 <= 42.0)
        # the rounded inputs land in the same band
        self.assertTrue(41.0 <= 100 * attainable_sequential(512, 1.77, 205.19) / 512 <= 42.0)

    def test_worked_example_effective_bandwidth(self):
        """2560 bytes over 2325 calc + 480 write cycles"""
        logger.info("Running test_worked_example_effective_bandwidth")
        bandwidth = effective_config_bandwidth(WORKLOAD_BYTES, 2325, 480)
        self.assertTrue(0.910 <= bandwidth <= 0.916)
        utilization = 100 * attainable_sequential(512, bandwidth, WORKLOAD_OPS / WORKLOAD_BYTES) / 512
        self.assertTrue(26.3 <= utilization <= 27.3)
        self.assertEqual(percent_of_peak(256, 512), 50.0)

    def test_effective_bandwidth_edge_cases(self):
        """zero time and negative inputs"""
        logger.info("Running test_effective_bandwidth_edge_cases")
        self.assertEqual(effective_config_bandwidth(0, 0, 0, peak_bandwidth=2.0), 2.0)
        with self.assertRaises(RooflineError):
            effective_config_bandwidth(8, 0, 0)
        with self.assertRaises(RooflineError):
            effective_config_bandwidth(8, -1, 4)

    def test_processor_and_combined(self):
        """memory knee gives exactly P, the roofsurface takes the lowest term"""
        logger.info("Running test_processor_and_combined")
        self.assertEqual(attainable_processor(512, 16, 512 / 16), 512)
        self.assertEqual(attainable_processor(512, 16, 8), 128)
        inputs = RooflineInputs(peak_perf=512, bw_config=2, bw_memory=16, i_oc=100, i_operational=64)
        self.assertEqual(attainable_combined(inputs), 200)
        self.assertEqual(attainable_combined(RooflineInputs(peak_perf=512, bw_config=2, i_oc=1000)), 512)

    def test_invalid_inputs(self):
        """non-positive inputs raise RooflineError"""
        logger.info("Running test_invalid_inputs")
        with self.assertRaises(RooflineError):
            attainable_concurrent(512, 0, 10)
        with self.assertRaises(RooflineError):
            attainable_sequential(-1, 2, 10)
        with self.assertRaises(RooflineError):
            knee(512, 0)

    def test_sequential_infinite_intensity(self):
        """no configuration traffic reaches the peak"""
        logger.info("Running test_sequential_infinite_intensity")
        self.assertEqual(attainable_sequential(512, 2, math.inf), 512)

    # property
    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(min_value=1.0, max_value=1e6, allow_nan=False, allow_infinity=False),
        st.floats(min_value=1e-2, max_value=1e3, allow_nan=False, allow_infinity=False))
    def test_knee_identity(self, peak, bandwidth):
        """half of peak at the knee, concurrent/sequential gap of 2 peaks there"""
        i_knee = knee(peak, bandwidth)
        self.assertTrue(math.isclose(attainable_sequential(peak, bandwidth, i_knee), peak / 2, rel_tol=1e-9))
        self.assertTrue(math.isclose(concurrent_sequential_gap(peak, bandwidth, i_knee), 2.0, rel_tol=1e-9))
        sweep = i_knee * 2.0 ** np.linspace(-5, 5, 101)
        curves = roofline_curves(peak, bandwidth, sweep)
        self.assertEqual(int(np.argmax(curves["gap"].to_numpy())), 50)


class TestRooflineMeasure(unittest.TestCase):
    """Tests for classify, measure_point and the tables"""

    def test_classify(self):
        """left of, on and right of the knee"""
        logger.info("Running test_classify")
        self.assertEqual(classify(205.19, 512, 1.77), "configuration-bound")
        self.assertEqual(classify(256.0, 512, 2.0), "knee")
        self.assertEqual(classify(1000.0, 512, 2.0), "compute-bound")
        self.assertEqual(classify(math.inf, 512, 2.0), "compute-bound")
        point = RooflinePoint(i_oc=100.0, perf=1.0, bound="knee")
        self.assertEqual(classify(point, 512, 2.0), "configuration-bound")

    def test_measure_point(self):
        """intensity, bound and measured bandwidth of a run"""
        logger.info("Running test_measure_point")
        descriptor = make_descriptor("acc", "concurrent", ["k"], peak=64)
        result = SimResult(
            total_cycles=100, calc_cycles=4, setup_cycles=10, launch_cycles=6,
            config_bytes_written=40, total_ops=6400)
        point = measure_point(result, descriptor, label="run")
        self.assertEqual(point.i_oc, 160.0)
        self.assertEqual(point.perf, 64.0)
        self.assertEqual(point.bw_effective, 2.0)
        self.assertEqual(point.bound, "compute-bound")
        self.assertEqual(point.label, "run")

    def test_measure_point_without_configuration(self):
        """ops without bytes -> infinite intensity, nothing at all -> zero"""
        logger.info("Running test_measure_point_without_configuration")
        descriptor = make_descriptor("acc", "sequential", ["k"])
        point = measure_point(SimResult(total_cycles=10, total_ops=640), descriptor)
        self.assertTrue(math.isinf(point.i_oc))
        self.assertEqual(point.bound, "compute-bound")
        self.assertIsNone(point.bw_effective)
        empty = measure_point(SimResult(), descriptor)
        self.assertEqual((empty.i_oc, empty.perf), (0.0, 0.0))

    def test_predicted_speedup(self):
        """sequential pre point against the post point of its scheme"""
        logger.info("Running test_predicted_speedup")
        pre = RooflinePoint(i_oc=64.0, perf=1.0, bound="configuration-bound", bw_effective=2.0)
        post = RooflinePoint(i_oc=256.0, perf=1.0, bound="knee", bw_effective=2.0)
        # sequential 1/(1/512 + 1/128) = 102.4, concurrent min(512, 512) = 512
        self.assertAlmostEqual(predicted_speedup(pre, post, 512, "concurrent"), 5.0)
        self.assertAlmostEqual(predicted_speedup(pre, post, 512, "sequential"), 2.5)
        with self.assertRaises(RooflineError):
            predicted_speedup(pre.model_copy(update={"bw_effective": None}), post, 512)

    def test_roofline_curves_default_sweep(self):
        """121 samples centred on the knee"""
        logger.info("Running test_roofline_curves_default_sweep")
        curves = roofline_curves(512, 2.0)
        self.assertEqual(list(curves.columns), ["i_oc", "concurrent", "sequential", "gap"])
        self.assertEqual(len(curves), 121)
        self.assertTrue(math.isclose(curves["i_oc"].iloc[60], 256.0, rel_tol=1e-9))
        self.assertTrue((curves["sequential"] <= curves["concurrent"]).all())
        with self.assertRaises(RooflineError):
            roofline_curves(512, 2.0, [0.0, 1.0])

    def test_roofsurface_grid(self):
        """long-format grid of the combined model"""
        logger.info("Running test_roofsurface_grid")
        grid = roofsurface_grid(512, 16, 2, [8, 64], [100, 1000])
        self.assertEqual(list(grid.columns), ["i_operational", "i_oc", "attainable"])
        self.assertEqual(list(grid["attainable"]), [128, 128, 200, 512])

    def test_export_header(self):
        """stable CSV header, rooflines evaluated at each point"""
        logger.info("Running test_export_header")
        self.assertEqual(roofline_export([], 512, 2.0).to_csv(index=False).strip(), ",".join(EXPORT_COLUMNS))
        points = [
            RooflinePoint(label="a", i_oc=256.0, perf=100.0, bound="knee"),
            RooflinePoint(label="b", i_oc=0.0, perf=0.0, bound="configuration-bound")]
        frame = roofline_export(points, 512, 2.0)
        self.assertAlmostEqual(frame["roofline_seq_at_ioc"].iloc[0], 256.0)
        self.assertAlmostEqual(frame["roofline_conc_at_ioc"].iloc[0], 512.0)
        self.assertEqual(frame["roofline_seq_at_ioc"].iloc[1], 0.0)

def operational_intensity(spec) -> float:
    """Ops per byte of A, B and C moved once."""
    moved = spec.element_bytes * (spec.M * spec.K + spec.K * spec.N + spec.M * spec.N)
    return spec.total_ops() / moved


class TestCombinedRoofline(unittest.TestCase):
    """Simulated benchmarks stay under the roofsurface when memory bandwidth is declared"""

    def test_benchmarks_stay_under_the_roofsurface(self):
        """every variant and size sits at or below the combined model"""
        logger.info("Running test_benchmarks_stay_under_the_roofsurface")
        gemmini = resolve_descriptor("gemmini-like")
        # the shipped concurrent descriptor declares no memory bandwidth
        opengemm = resolve_descriptor("opengemm-like").model_copy(update={"mem_bandwidth": 64.0})
        for descriptor, spec_name in ((gemmini, "gemmini-like-matmul"), (opengemm, "opengemm-like-matmul")):
            runner = ExperimentRunner(descriptor_map([descriptor]), descriptor.name)
            template = resolve_matmul_spec(spec_name, descriptor)
            for size in (32, 64, 128, 256):
                # define
                spec = rescale_spec(template, size)
                program = gen_tiled_matmul(spec, descriptor.name, descriptor)
                # call function
                points = runner.measure_variants(program, f"{descriptor.name}/{size}")
                # assert expected
                for variant, point in points.items():
                    inputs = RooflineInputs(
                        peak_perf=descriptor.peak_perf,
                        bw_config=point.bw_effective,
                        bw_memory=descriptor.mem_bandwidth,
                        i_oc=point.i_oc,
                        i_operational=operational_intensity(spec))
                    bound = attainable_combined(inputs)
                    self.assertLessEqual(
                        bound, descriptor.mem_bandwidth * inputs.i_operational * (1 + 1e-12))
                    self.assertLessEqual(
                        point.perf, bound * (1 + 1e-9), msg=f"{descriptor.name} size {size} {variant}")


# add the standard unittest entry point
if __name__ == "__main__":
    unittest.main(verbosity=2)

    # cli cmd
    # python -m unittest tests/test_roofline/test_roofline.py
