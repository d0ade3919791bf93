"""Timeline and summary rendering of simulator results."""
import pandas as pd
from accel_config_toolkit.basemodel_validator.sim_result_model import SimResult

# column order of the timeline CSV
TIMELINE_COLUMNS = ["start_cycle", "end_cycle", "lane", "accelerator"]


def emit_timeline(result: SimResult) -> pd.DataFrame:
    """Function to turn the timeline segments into a table.

    Args:
        result (SimResult): simulator output.

    Returns:
        pd.DataFrame: one row per segment, ordered by start cycle.
    """
    rows = [segment.model_dump() for segment in result.segments if segment.end_cycle > segment.start_cycle]
    return pd.DataFrame(rows, columns=TIMELINE_COLUMNS)


def timeline_csv(result: SimResult) -> str:
    """CSV text of the timeline, header only for an empty run."""
    return emit_timeline(result).to_csv(index=False)


def format_summary(result: SimResult) -> str:
    """Stable key=value lines."""
    return "\n".join(f"{key}={value}" for key, value in result.summary_dict().items()) + "\n"
