"""Launch-trace comparison, the correctness oracle of every pass."""
from typing import List, Optional
from loguru import logger
from accel_config_toolkit.basemodel_validator.sim_result_model import LaunchEvent, SimResult


def event_key(event: LaunchEvent):
    """What a launch observes; the issue cycle is timing, not behaviour."""
    return event.accel, tuple(sorted(event.snapshot.items())), event.ops


def first_difference(a: List[LaunchEvent], b: List[LaunchEvent]) -> Optional[int]:
    """Index of the first differing launch, None when the traces agree."""
    for index, (left, right) in enumerate(zip(a, b)):
        if event_key(left) != event_key(right):
            return index
    if len(a) != len(b):
        return min(len(a), len(b))
    return None


def trace_equivalent(a: SimResult, b: SimResult) -> bool:
    """Function to compare the launch traces of two runs.

    Args:
        a (SimResult): first run.
        b (SimResult): second run.

    Returns:
        bool: True iff both traces have the same (accelerator, snapshot, ops) sequence.
    """
    index = first_difference(a.trace, b.trace)
    if index is not None:
        logger.debug(f"Launch traces differ at launch #{index} ({len(a.trace)} vs {len(b.trace)} launches)")
    return index is None
