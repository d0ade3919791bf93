"""Load accelerator descriptors and derive cost-model quantities."""
import json
import math
import os
from typing import Dict, Iterable, Union
from loguru import logger
from pydantic import ValidationError
from accel_config_toolkit import settings
from accel_config_toolkit.basemodel_validator.descriptor_model import AcceleratorDescriptor
from accel_config_toolkit.errors import DescriptorError


def load_descriptor(text: Union[str, bytes]) -> AcceleratorDescriptor:
    """Function to parse and validate one descriptor file.

    Args:
        text (str): JSON text of the descriptor.

    Returns:
        AcceleratorDescriptor: validated, immutable descriptor.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as error:
        raise DescriptorError(f"descriptor is not valid JSON: {error}") from error
    if not isinstance(raw, dict):
        raise DescriptorError("descriptor must be a JSON object")
    try:
        descriptor = AcceleratorDescriptor.model_validate(raw)
    except ValidationError as error:
        raise DescriptorError(f"invalid descriptor: {error}") from error
    logger.debug(f"Loaded descriptor {descriptor.name} ({descriptor.scheme}, {len(descriptor.fields)} fields)")
    return descriptor


def resolve_descriptor_path(name_or_path: str) -> str:
    """Map a shipped short name (e.g. "gemmini-like") or a path to a file path."""
    if os.path.isfile(name_or_path):
        return name_or_path
    candidate = os.path.join(settings.DESCRIPTOR_DIR, f"{name_or_path}.json")
    if os.path.isfile(candidate):
        return candidate
    raise DescriptorError(f"descriptor not found: {name_or_path}")


def resolve_descriptor(name_or_path: str) -> AcceleratorDescriptor:
    """Load a descriptor from a path or a shipped short name."""
    path = resolve_descriptor_path(name_or_path)
    logger.info(f"Loading descriptor from {os.path.basename(path)}")
    with open(path, encoding="utf-8") as handle:
        return load_descriptor(handle.read())


def descriptor_map(descriptors: Iterable[AcceleratorDescriptor]) -> Dict[str, AcceleratorDescriptor]:
    """Index descriptors by accelerator name, rejecting duplicates."""
    mapping: Dict[str, AcceleratorDescriptor] = {}
    for descriptor in descriptors:
        if descriptor.name in mapping:
            raise DescriptorError(f"two descriptors named {descriptor.name}")
        mapping[descriptor.name] = descriptor
    return mapping


def config_bandwidth(descriptor: AcceleratorDescriptor) -> float:
    """Peak configuration bandwidth in bytes/cycle.

    write_group * mean field width / write_cost; 16/9 for two 8-byte fields per 9-cycle write.
    """
    mean_width = sum(f.width for f in descriptor.fields) / len(descriptor.fields)
    return descriptor.cost.write_group * mean_width / descriptor.cost.write_cost


def write_cycles(descriptor: AcceleratorDescriptor, n_writes: int) -> int:
    """Host cycles of `n_writes` consecutive field writes."""
    if n_writes <= 0:
        return 0
    return math.ceil(n_writes / descriptor.cost.write_group) * descriptor.cost.write_cost


def job_duration(descriptor: AcceleratorDescriptor, ops: int) -> int:
    """Accelerator cycles of a job: ceil(ops / peak_perf), 0 for no work."""
    if ops < 0:
        raise ValueError(f"ops must be non-negative, got {ops}")
    if ops == 0:
        return 0
    peak = descriptor.peak_perf
    # exact integer ceiling when the peak is integral
    if float(peak).is_integer():
        return -(-ops // int(peak))
    return math.ceil(ops / peak)
