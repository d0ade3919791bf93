"""Pydantic basemodels for simulator results."""
from typing import Dict, List, Literal, Optional
from pydantic import BaseModel, Field

# timeline lanes, host lanes first
TimelineLane = Literal["host-setup", "host-calc", "host-other", "host-idle", "accel-busy", "accel-idle"]


# one launch as seen by the accelerator
class LaunchEvent(BaseModel):
    """Register snapshot and workload of one launch."""
    accel: str
    # every declared field, values committed at launch
    snapshot: Dict[str, int] = Field(default_factory=dict)
    ops: int = Field(..., ge=0)
    # host cycle at which the launch issue started
    launch_cycle: int = Field(..., ge=0)


class TimelineSegment(BaseModel):
    start_cycle: int
    end_cycle: int
    lane: TimelineLane
    # empty for host lanes
    accelerator: str = ""


# cycle accounting of one run
class SimResult(BaseModel):
    """Cycle-accounted outcome of one simulation.

    Host closure: setup + calc + other + launch + await_poll + idle == host_cycles.
    """
    total_cycles: int = 0
    host_cycles: int = 0
    setup_cycles: int = 0
    calc_cycles: int = 0
    other_host_cycles: int = 0
    launch_cycles: int = 0
    await_poll_cycles: int = 0
    host_idle_cycles: int = 0
    accel_busy_cycles: int = 0
    config_bytes_written: int = 0
    total_ops: int = 0
    trace: List[LaunchEvent] = Field(default_factory=list)
    segments: List[TimelineSegment] = Field(default_factory=list)
    # scheme per simulated accelerator, used by roofline measurement
    schemes: Dict[str, str] = Field(default_factory=dict)

    @property
    def perf(self) -> float:
        """Achieved ops/cycle."""
        return self.total_ops / self.total_cycles if self.total_cycles else 0.0

    def summary_dict(self) -> Dict[str, Optional[float]]:
        """Scalar counters only, in a stable key order."""
        return {
            "total_cycles": self.total_cycles,
            "host_cycles": self.host_cycles,
            "setup_cycles": self.setup_cycles,
            "calc_cycles": self.calc_cycles,
            "other_host_cycles": self.other_host_cycles,
            "launch_cycles": self.launch_cycles,
            "await_poll_cycles": self.await_poll_cycles,
            "host_idle_cycles": self.host_idle_cycles,
            "accel_busy_cycles": self.accel_busy_cycles,
            "config_bytes_written": self.config_bytes_written,
            "total_ops": self.total_ops,
            "launches": len(self.trace),
            "perf_ops_per_cycle": round(self.perf, 6),
        }
