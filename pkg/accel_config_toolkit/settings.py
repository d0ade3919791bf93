"""Runtime settings read from the environment (and an optional .env file)."""
import os
from dotenv import load_dotenv

# initiate load_dotenv - values already in the environment win
load_dotenv()

# package folder, used to locate the shipped descriptor and spec files
PACKAGE_DIR = os.path.dirname(os.path.abspath(__file__))

# log level for the loguru sink
LOG_LEVEL = os.getenv("ACCEL_LOG_LEVEL", "INFO")

# where short descriptor names like "gemmini-like" are resolved
DESCRIPTOR_DIR = os.getenv(
    "ACCEL_DESCRIPTOR_DIR",
    os.path.join(PACKAGE_DIR, "accel_model", "descriptors"))

# where short benchmark spec names like "opengemm-like-matmul" are resolved
BENCH_SPEC_DIR = os.getenv(
    "ACCEL_BENCH_SPEC_DIR",
    os.path.join(PACKAGE_DIR, "benchgen", "specs"))

# per-loop trip-count guard of the simulator
SIM_TRIP_LIMIT = int(os.getenv("ACCEL_SIM_TRIP_LIMIT", str(2 ** 24)))

# default matrix sizes of the report sweep
REPORT_SIZES = [
    int(size) for size in os.getenv("ACCEL_REPORT_SIZES", "32,64,128,256").split(",")
    if size.strip()]
