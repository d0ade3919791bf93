"""Configuration roofline equations.

Symbols: P peak performance (ops/cycle), BW_cfg configuration bandwidth and
BW_mem memory bandwidth (bytes/cycle), I_oc operation-to-configuration
intensity and I_op operational intensity (ops/byte).
"""
import math
from typing import Optional
from accel_config_toolkit.basemodel_validator.roofline_model import RooflineInputs
from accel_config_toolkit.errors import RooflineError

# relative tolerance of float comparisons
REL_TOL = 1e-9

# relative tolerance of the knee classification
KNEE_TOL = 1e-6


def require_positive(**values: float):
    for name, value in values.items():
        if value is None or not value > 0:
            raise RooflineError(f"{name} must be > 0, got {value}")


def attainable_processor(peak: float, bw_memory: float, i_operational: float) -> float:
    """Classic roofline: min(P, BW_mem * I_op)."""
    require_positive(peak=peak, bw_memory=bw_memory, i_operational=i_operational)
    return min(peak, bw_memory * i_operational)


def attainable_concurrent(peak: float, bw_config: float, i_oc: float) -> float:
    """Configuration overlaps computation: min(P, BW_cfg * I_oc)."""
    require_positive(peak=peak, bw_config=bw_config, i_oc=i_oc)
    return min(peak, bw_config * i_oc)


def attainable_sequential(peak: float, bw_config: float, i_oc: float) -> float:
    """Configuration and computation take turns: 1 / (1/P + 1/(BW_cfg * I_oc))."""
    require_positive(peak=peak, bw_config=bw_config, i_oc=i_oc)
    if math.isinf(i_oc):
        return peak
    return 1.0 / (1.0 / peak + 1.0 / (bw_config * i_oc))


def effective_config_bandwidth(
        n_bytes: float,
        t_calc: float,
        t_set: float,
        peak_bandwidth: Optional[float] = None) -> float:
    """Function to compute the configuration bandwidth a run really achieved.

    Args:
        n_bytes (float): configuration bytes written.
        t_calc (float): cycles spent computing configuration values.
        t_set (float): cycles spent writing configuration registers.
        peak_bandwidth (float): returned when nothing was written in zero time.

    Returns:
        float: n_bytes / (t_calc + t_set) in bytes/cycle.
    """
    if t_calc < 0 or t_set < 0 or n_bytes < 0:
        raise RooflineError("bytes and cycle counts must be non-negative")
    if t_calc + t_set == 0:
        if n_bytes == 0 and peak_bandwidth is not None:
            return peak_bandwidth
        raise RooflineError("configuration time is zero")
    return n_bytes / (t_calc + t_set)


def attainable_combined(inputs: RooflineInputs) -> float:
    """Roofsurface: minimum of the peak, memory and configuration terms present."""
    terms = [inputs.peak_perf, inputs.bw_config * inputs.i_oc]
    if inputs.bw_memory is not None and inputs.i_operational is not None:
        terms.append(inputs.bw_memory * inputs.i_operational)
    return min(terms)


def knee(peak: float, bandwidth: float) -> float:
    """Intensity at which the bandwidth term reaches the peak."""
    require_positive(peak=peak, bandwidth=bandwidth)
    return peak / bandwidth


def concurrent_sequential_gap(peak: float, bw_config: float, i_oc: float) -> float:
    """Ratio of the two configuration rooflines, 2 at the knee."""
    return attainable_concurrent(peak, bw_config, i_oc) / attainable_sequential(peak, bw_config, i_oc)


def percent_of_peak(value: float, peak: float) -> float:
    require_positive(peak=peak)
    return round(100.0 * value / peak, 2)
