"""Single place that installs the loguru sink."""
import sys
from loguru import logger
from accel_config_toolkit import settings

# same record layout for every module
LOG_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} [{level}] {name}: {message}"

_configured = False


def configure_logging(level: str = None):
    """Function to (re)install the stderr sink once per process.

    Args:
        level (str): Optional level override, defaults to ACCEL_LOG_LEVEL.
    """
    global _configured
    # drop the default loguru handler and any sink we added earlier
    logger.remove()
    logger.add(sys.stderr, level=level or settings.LOG_LEVEL, format=LOG_FORMAT)
    _configured = True
    return logger


def ensure_logging():
    """Install the sink on first use only."""
    if not _configured:
        configure_logging()
    return logger
