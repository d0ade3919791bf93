"""Measured roofline points, bound classification and CSV-ready tables."""
import math
from typing import Iterable, Optional, Sequence, Union
import numpy as np
import pandas as pd
from loguru import logger
from accel_config_toolkit.accel_model.descriptor_loader import config_bandwidth
from accel_config_toolkit.basemodel_validator.descriptor_model import AcceleratorDescriptor
from accel_config_toolkit.basemodel_validator.roofline_model import RooflinePoint
from accel_config_toolkit.basemodel_validator.sim_result_model import SimResult
from accel_config_toolkit.errors import RooflineError
from accel_config_toolkit.roofline.roofline_equations import (
    KNEE_TOL, attainable_concurrent, attainable_sequential, require_positive)

# columns of the roofline export
EXPORT_COLUMNS = ["label", "i_oc", "perf_ops_per_cycle", "bound", "roofline_seq_at_ioc", "roofline_conc_at_ioc"]


def classify(point: Union[RooflinePoint, float], peak: float, bw_config: float) -> str:
    """Function to place an intensity left of, on, or right of the knee.

    Args:
        point (RooflinePoint | float): measured point or its I_oc.
        peak (float): P in ops/cycle.
        bw_config (float): configuration bandwidth in bytes/cycle.

    Returns:
        str: "configuration-bound", "knee" or "compute-bound".
    """
    require_positive(peak=peak, bw_config=bw_config)
    i_oc = point.i_oc if isinstance(point, RooflinePoint) else float(point)
    if math.isinf(i_oc):
        return "compute-bound"
    product = bw_config * i_oc
    if math.isclose(product, peak, rel_tol=KNEE_TOL):
        return "knee"
    return "configuration-bound" if product < peak else "compute-bound"


def measured_bandwidth(result: SimResult) -> Optional[float]:
    """Config bytes over configuration time (calc + register writes + launch issue)."""
    cycles = result.calc_cycles + result.setup_cycles + result.launch_cycles
    return result.config_bytes_written / cycles if cycles else None


def measure_point(result: SimResult, descriptor: AcceleratorDescriptor, label: str = "") -> RooflinePoint:
    """Function to turn a simulation into a roofline point.

    Args:
        result (SimResult): simulator output.
        descriptor (AcceleratorDescriptor): accelerator the run targeted.
        label (str): free text carried to the export.

    Returns:
        RooflinePoint: intensity, performance, bound and measured bandwidth.
    """
    if result.config_bytes_written:
        i_oc = result.total_ops / result.config_bytes_written
    else:
        # ops without any configuration byte sit infinitely far right
        i_oc = math.inf if result.total_ops else 0.0
    point = RooflinePoint(
        label=label,
        i_oc=i_oc,
        perf=result.perf,
        bound=classify(i_oc, descriptor.peak_perf, config_bandwidth(descriptor)),
        bw_effective=measured_bandwidth(result),
        total_ops=result.total_ops,
        config_bytes=result.config_bytes_written,
        total_cycles=result.total_cycles)
    logger.debug(f"Point {label or '(unlabeled)'}: i_oc={point.i_oc:.3f}, perf={point.perf:.3f}, {point.bound}")
    return point


def attainable_for_scheme(scheme: str, peak: float, bandwidth: float, i_oc: float) -> float:
    if scheme == "concurrent":
        return attainable_concurrent(peak, bandwidth, i_oc)
    return attainable_sequential(peak, bandwidth, i_oc)


def predicted_speedup(pre: RooflinePoint, post: RooflinePoint, peak: float, post_scheme: str = "concurrent") -> float:
    """Function to predict the speedup of an optimization from two measured points.

    The pre point always runs configuration and computation in turn; the post
    point uses the roofline of `post_scheme`. Both use their measured bandwidth.

    Args:
        pre (RooflinePoint): point before optimization.
        post (RooflinePoint): point after optimization.
        peak (float): P in ops/cycle.
        post_scheme (str): configuration scheme of the optimized run.

    Returns:
        float: attainable(post) / attainable(pre).
    """
    if not pre.bw_effective or not post.bw_effective or not pre.i_oc or not post.i_oc:
        raise RooflineError("both points need configuration traffic to predict a speedup")
    before = attainable_sequential(peak, pre.bw_effective, pre.i_oc)
    after = attainable_for_scheme(post_scheme, peak, post.bw_effective, post.i_oc)
    return after / before


def roofline_curves(peak: float, bw_config: float, i_oc_values: Optional[Sequence[float]] = None) -> pd.DataFrame:
    """Function to sample both configuration rooflines.

    Args:
        peak (float): P in ops/cycle.
        bw_config (float): configuration bandwidth in bytes/cycle.
        i_oc_values (Sequence): intensities, a log-space around the knee by default.

    Returns:
        pd.DataFrame: columns i_oc, concurrent, sequential, gap.
    """
    require_positive(peak=peak, bw_config=bw_config)
    if i_oc_values is None:
        center = np.log10(peak / bw_config)
        i_oc_values = np.logspace(center - 3, center + 3, 121)
    i_oc = np.asarray(i_oc_values, dtype=float)
    if np.any(i_oc <= 0):
        raise RooflineError("intensities must be > 0")
    product = bw_config * i_oc
    concurrent = np.minimum(peak, product)
    sequential = 1.0 / (1.0 / peak + 1.0 / product)
    return pd.DataFrame({"i_oc": i_oc, "concurrent": concurrent, "sequential": sequential, "gap": concurrent / sequential})


def roofsurface_grid(
        peak: float,
        bw_memory: float,
        bw_config: float,
        i_op_values: Sequence[float],
        i_oc_values: Sequence[float]) -> pd.DataFrame:
    """Function to sample the combined roofsurface on a grid.

    Returns:
        pd.DataFrame: long format with columns i_operational, i_oc, attainable.
    """
    require_positive(peak=peak, bw_memory=bw_memory, bw_config=bw_config)
    i_op, i_oc = np.meshgrid(np.asarray(i_op_values, dtype=float), np.asarray(i_oc_values, dtype=float), indexing="ij")
    attainable = np.minimum(np.minimum(peak, bw_memory * i_op), bw_config * i_oc)
    return pd.DataFrame({
        "i_operational": i_op.ravel(),
        "i_oc": i_oc.ravel(),
        "attainable": attainable.ravel()})


def roofline_export(points: Iterable[RooflinePoint], peak: float, bw_config: float) -> pd.DataFrame:
    """Measured points next to both rooflines evaluated at their intensity."""
    rows = []
    for point in points:
        positive = point.i_oc > 0
        rows.append({
            "label": point.label,
            "i_oc": point.i_oc,
            "perf_ops_per_cycle": point.perf,
            "bound": point.bound,
            "roofline_seq_at_ioc": attainable_sequential(peak, bw_config, point.i_oc) if positive else 0.0,
            "roofline_conc_at_ioc": attainable_concurrent(peak, bw_config, point.i_oc) if positive else 0.0})
    return pd.DataFrame(rows, columns=EXPORT_COLUMNS)
