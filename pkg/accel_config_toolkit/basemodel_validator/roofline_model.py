"""Pydantic basemodels for roofline inputs, measured points and report rows."""
from typing import Literal, Optional
from pydantic import BaseModel, Field

BoundLabel = Literal["configuration-bound", "compute-bound", "knee"]


# inputs of the combined roofsurface
class RooflineInputs(BaseModel):
    """Machine balance numbers and the intensities of one workload."""
    peak_perf: float = Field(..., gt=0, description="P_Peak in ops/cycle.")
    bw_config: float = Field(..., gt=0, description="Configuration bandwidth in bytes/cycle.")
    bw_memory: Optional[float] = Field(None, gt=0, description="Memory bandwidth in bytes/cycle.")
    i_oc: float = Field(..., gt=0, description="Operation-to-configuration intensity, ops/byte.")
    i_operational: Optional[float] = Field(None, gt=0, description="Operational intensity, ops/byte.")


# one measurement
class RooflinePoint(BaseModel):
    """Measured intensity and performance of one run."""
    label: str = ""
    # infinity when ops ran without any configuration byte
    i_oc: float = Field(..., ge=0)
    perf: float = Field(..., ge=0)
    bound: BoundLabel
    # configuration bytes over configuration time of the run
    bw_effective: Optional[float] = None
    total_ops: int = 0
    config_bytes: int = 0
    total_cycles: int = 0


# one line of the sweep report
class ReportRow(BaseModel):
    """Per-size performance of the three pipeline variants."""
    size: int
    baseline_perf: float
    dedup_perf: float
    full_perf: float
    dedup_speedup: float
    full_speedup: float
    predicted_speedup: float
    baseline_bound: BoundLabel
    full_bound: BoundLabel
