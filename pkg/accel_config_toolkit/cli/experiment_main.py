"""Script to run pipeline variants of a program, simulate them and compare.

Variants:
- baseline: state tracing only, the unoptimized reference.
- dedup: canonicalize, trace, hoist-if, hoist-loop, dedup, cleanup.
- full: the canonical --all order, overlap included.
"""
from typing import Dict, List, Mapping, Sequence, Tuple
import numpy as np
import pandas as pd
from loguru import logger
from accel_config_toolkit.basemodel_validator.descriptor_model import AcceleratorDescriptor
from accel_config_toolkit.basemodel_validator.matmul_spec_model import MatmulSpec
from accel_config_toolkit.basemodel_validator.pass_pipeline_model import CANONICAL_ORDER, PassPipeline
from accel_config_toolkit.basemodel_validator.roofline_model import ReportRow, RooflinePoint
from accel_config_toolkit.basemodel_validator.sim_result_model import SimResult
from accel_config_toolkit.benchgen.matmul_generator import sweep
from accel_config_toolkit.ir.ir_types import Program
from accel_config_toolkit.passes.pass_pipeline_main import run_pipeline
from accel_config_toolkit.roofline.roofline_measure import measure_point, predicted_speedup
from accel_config_toolkit.sim.simulator import simulate

# pass selections of the three report variants
VARIANT_PASSES: Dict[str, Tuple[str, ...]] = {
    "baseline": ("trace",),
    "dedup": ("canonicalize", "trace", "hoist-if", "hoist-loop", "dedup", "cleanup"),
    "full": CANONICAL_ORDER,
}

# column order of the report table
REPORT_COLUMNS = [
    "size", "baseline_perf", "dedup_perf", "full_perf", "dedup_speedup",
    "full_speedup", "predicted_speedup", "baseline_bound", "full_bound"]


def geomean(values: Sequence[float]) -> float:
    values = np.asarray(values, dtype=float)
    return float(np.exp(np.mean(np.log(values)))) if len(values) else 0.0


# experiment - runner class
class ExperimentRunner:
    """Runs the variants of one program against one target accelerator."""

    def __init__(self, descriptors: Mapping[str, AcceleratorDescriptor], target: str):
        """Initialise with the run's descriptors and the accelerator measured.

        Args:
            descriptors (Mapping): accelerator name -> descriptor.
            target (str): accelerator whose peak and bandwidth define the roofline.
        """
        self.descriptors = dict(descriptors)
        self.target = self.descriptors[target]

    # 1. one variant
    def run_variant(self, program: Program, variant: str) -> Tuple[Program, SimResult]:
        """Function to optimize with a variant's passes and simulate the result.

        Args:
            program (Program): verified input program.
            variant (str): key of VARIANT_PASSES.

        Returns:
            tuple: (optimized program, simulation result).
        """
        pipeline = PassPipeline(passes=list(VARIANT_PASSES[variant]))
        optimized = run_pipeline(program, pipeline, self.descriptors)
        result = simulate(optimized, self.descriptors)
        logger.info(f"Variant {variant}: {result.total_cycles} cycles, perf {result.perf:.2f} ops/cycle")
        return optimized, result

    def measure_variants(self, program: Program, label: str) -> Dict[str, RooflinePoint]:
        """Roofline point of every variant, labelled "<label>/<variant>"."""
        points = {}
        for variant in VARIANT_PASSES:
            _, result = self.run_variant(program, variant)
            points[variant] = measure_point(result, self.target, label=f"{label}/{variant}")
        return points

    # 2. report rows
    def report_row(self, size: int, program: Program) -> ReportRow:
        points = self.measure_variants(program, f"{size}")
        baseline, dedup, full = points["baseline"], points["dedup"], points["full"]
        return ReportRow(
            size=size,
            baseline_perf=baseline.perf,
            dedup_perf=dedup.perf,
            full_perf=full.perf,
            dedup_speedup=dedup.perf / baseline.perf,
            full_speedup=full.perf / baseline.perf,
            predicted_speedup=predicted_speedup(baseline, full, self.target.peak_perf, self.target.scheme),
            baseline_bound=baseline.bound,
            full_bound=full.bound)

    def run_report(self, sizes: Sequence[int], template: MatmulSpec) -> Dict:
        """Function to sweep sizes and collect one report row per size.

        Args:
            sizes (Sequence): square matrix sizes, processed in ascending order.
            template (MatmulSpec): benchmark spec rescaled per size.

        Returns:
            Dict: {"success", "message", "rows", "geomean_speedup"}.
        """
        rows: List[ReportRow] = []
        for size, program in sweep(sizes, template, self.target.name, self.target):
            logger.info(f"Running report size {size}")
            rows.append(self.report_row(size, program))
        speedup = geomean([row.full_speedup for row in rows])
        logger.info(f"Report finished: {len(rows)} size(s), geomean full speedup {speedup:.3f}")
        return {
            "success": True,
            "message": f"{len(rows)} size(s) simulated",
            "rows": rows,
            "geomean_speedup": speedup}


def report_frame(rows: Sequence[ReportRow]) -> pd.DataFrame:
    """Function to tabulate report rows with a trailing geomean row.

    Args:
        rows (Sequence): one ReportRow per size.

    Returns:
        pd.DataFrame: REPORT_COLUMNS, speedups averaged geometrically in the last row.
    """
    frame = pd.DataFrame([row.model_dump() for row in rows], columns=REPORT_COLUMNS)
    if rows:
        summary = {column: "" for column in REPORT_COLUMNS}
        summary["size"] = "geomean"
        for column in ("baseline_perf", "dedup_perf", "full_perf", "dedup_speedup", "full_speedup", "predicted_speedup"):
            summary[column] = geomean(frame[column].tolist())
        frame = pd.concat([frame, pd.DataFrame([summary], columns=REPORT_COLUMNS)], ignore_index=True)
    return frame
