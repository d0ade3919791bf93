""" Shared test data - descriptors and small programs """
from typing import Dict, List
from accel_config_toolkit.basemodel_validator.descriptor_model import AcceleratorDescriptor

# accelerators and fields of the randomized programs
RANDOM_FIELDS: Dict[str, List[str]] = {"conc": ["k", "n", "m", "go"], "seq": ["a", "b", "c"]}

# seeds of the randomized suites
RANDOM_SEEDS = range(1000)


def make_descriptor(
        name: str,
        scheme: str,
        fields: List[str],
        width: int = 4,
        peak: float = 64,
        write_cost: int = 2,
        arith_cost: int = 1,
        launch_cost: int = 1,
        write_group: int = 1) -> AcceleratorDescriptor:
    """Function to build a descriptor with equal-width fields."""
    return AcceleratorDescriptor.model_validate({
        "name": name,
        "scheme": scheme,
        "peak_perf": peak,
        "fields": [{"name": field, "bytes": width} for field in fields],
        "cost": {
            "write_cost": write_cost,
            "arith_cost": arith_cost,
            "launch_cost": launch_cost,
            "write_group": write_group}})


def random_descriptors() -> Dict[str, AcceleratorDescriptor]:
    """One concurrent and one sequential accelerator for RANDOM_FIELDS."""
    return {
        "conc": make_descriptor("conc", "concurrent", RANDOM_FIELDS["conc"], peak=64),
        "seq": make_descriptor("seq", "sequential", RANDOM_FIELDS["seq"], width=8, peak=128, write_cost=3)}


def schemes_of(descriptors: Dict[str, AcceleratorDescriptor]) -> Dict[str, str]:
    return {name: descriptor.scheme for name, descriptor in descriptors.items()}


# setup; launch; setup; launch on one accelerator
STRAIGHT_LINE = """
accel "acc"
func @main() {
  %c5 = const 5 : i32
  %x = const 7 : i32
  %s1 = setup "acc" (k = %c5) : state<"acc">
  %t1 = launch %s1 ops = 1024 : token<"acc">
  await %t1
  %s2 = setup "acc" (k = %c5, n = %x) : state<"acc">
  %t2 = launch %s2 ops = 1024 : token<"acc">
  await %t2
}
"""

# a kernel loop with a loop-invariant base and an index field
KERNEL_LOOP = """
accel "acc"
func @main() {
  %base = const 4096 : i32
  %s0 = setup "acc" (m = %base) : state<"acc">
  for %i = 0 to 4 step 1 : i32 {
    %s = setup "acc" (k = %i, n = %base) : state<"acc">
    %t = launch %s ops = 1024 : token<"acc">
    await %t
  }
}
"""


def acc_descriptors(scheme: str, peak: float = 64) -> Dict[str, AcceleratorDescriptor]:
    """Descriptor map for the single "acc" accelerator of the text fixtures."""
    return {"acc": make_descriptor("acc", scheme, ["k", "n", "m", "go"], peak=peak)}


def body_kinds(block) -> List[str]:
    return [op.kind for op in block.ops]
