"""Script to run an ordered selection of passes over a program.

Every pass works on a copy; the input is verified first and the output of
every pass is verified again, a failure there is a bug in the pass.
"""
from typing import Callable, Dict, List, Mapping, Optional, Tuple
from loguru import logger
from accel_config_toolkit.basemodel_validator.descriptor_model import AcceleratorDescriptor
from accel_config_toolkit.basemodel_validator.pass_log_model import PassLogEntry
from accel_config_toolkit.basemodel_validator.pass_pipeline_model import PassPipeline
from accel_config_toolkit.errors import InternalPassError, VerificationError
from accel_config_toolkit.ir.ir_types import Program
from accel_config_toolkit.ir.ir_verifier import verify
from accel_config_toolkit.passes.canonicalize import canonicalize
from accel_config_toolkit.passes.overlap import overlap_block, pipeline_loops
from accel_config_toolkit.passes.setup_cleanup import cleanup_setups
from accel_config_toolkit.passes.setup_dedup import deduplicate_setup
from accel_config_toolkit.passes.setup_hoisting import hoist_into_branches, hoist_loop_invariant_setup
from accel_config_toolkit.passes.state_tracing import trace_states

# pass name -> function(program, schemes)
PASS_REGISTRY: Dict[str, Callable[[Program, Mapping[str, str]], Program]] = {
    "canonicalize": lambda program, schemes: canonicalize(program),
    "trace": lambda program, schemes: trace_states(program),
    "hoist-if": lambda program, schemes: hoist_into_branches(program),
    "hoist-loop": lambda program, schemes: hoist_loop_invariant_setup(program),
    "dedup": lambda program, schemes: deduplicate_setup(program),
    "cleanup": lambda program, schemes: cleanup_setups(program),
    "pipeline": pipeline_loops,
    "overlap": overlap_block,
}

# passes that only touch concurrent accelerators
SCHEME_PASSES = ("pipeline", "overlap")


def static_setup_counts(
        program: Program,
        descriptors: Optional[Mapping[str, AcceleratorDescriptor]] = None) -> Tuple[int, int, Optional[int]]:
    """Function to count setups, field writes and written bytes in the program text.

    Args:
        program (Program): program to inspect.
        descriptors (Mapping): optional accelerator name -> descriptor for field widths.

    Returns:
        tuple: (setups, field writes, bytes or None without descriptors).
    """
    setups = fields = total_bytes = 0
    for op in program.walk():
        if op.kind != "setup":
            continue
        setups += 1
        fields += len(op.field_names)
        descriptor = (descriptors or {}).get(op.accel)
        if descriptor is not None:
            total_bytes += sum(descriptor.field_width(name) or 0 for name in op.field_names)
    return setups, fields, (total_bytes if descriptors else None)


# pass pipeline - runner class
class PassPipelineRunner:
    """Runs the passes of a PassPipeline in order and logs their effect."""

    def __init__(
            self,
            program: Program,
            pipeline: PassPipeline,
            descriptors: Optional[Mapping[str, AcceleratorDescriptor]] = None):
        """Initialise with the program, the pass selection and optional descriptors.

        Args:
            program (Program): verified input program.
            pipeline (PassPipeline): ordered pass names.
            descriptors (Mapping): accelerator name -> descriptor, provides schemes and field widths.
        """
        self.program = program
        self.pipeline = pipeline
        self.descriptors = dict(descriptors or {})
        # missing accelerators count as sequential
        self.schemes = {name: descriptor.scheme for name, descriptor in self.descriptors.items()}
        self.log: List[PassLogEntry] = []

    def overlap_applies(self) -> bool:
        return self.pipeline.enable_overlap and "concurrent" in self.schemes.values()

    # 1. a single pass with verification of its output
    def run_single_pass(self, name: str, program: Program) -> Program:
        """Function to run one pass and record a log entry.

        Args:
            name (str): registered pass name.
            program (Program): verified input.

        Returns:
            Program: verified output of the pass.
        """
        setups, fields, total_bytes = static_setup_counts(program, self.descriptors)
        if name in SCHEME_PASSES and not self.overlap_applies():
            logger.info(f"Skipping {name}: no concurrent accelerator or overlap disabled")
            self.log.append(PassLogEntry(
                pass_name=name, setups_before=setups, setups_after=setups, fields_before=fields,
                fields_after=fields, bytes_before=total_bytes, bytes_after=total_bytes, skipped=True))
            return program
        output = PASS_REGISTRY[name](program, self.schemes)
        diagnostics = verify(output, self.descriptors)
        if diagnostics:
            logger.error(f"Pass {name} produced {len(diagnostics)} verifier diagnostic(s)")
            raise InternalPassError(name, diagnostics)
        setups_after, fields_after, bytes_after = static_setup_counts(output, self.descriptors)
        entry = PassLogEntry(
            pass_name=name, setups_before=setups, setups_after=setups_after, fields_before=fields,
            fields_after=fields_after, bytes_before=total_bytes, bytes_after=bytes_after,
            changed=(setups, fields) != (setups_after, fields_after))
        logger.info(entry.describe())
        self.log.append(entry)
        return output

    # 2. the whole selection
    def run(self) -> Dict:
        """Function to run every selected pass in order.

        Returns:
            Dict: {"success", "message", "program", "log"} with the final program and pass log.
        """
        logger.info(f"Running pass pipeline: {','.join(self.pipeline.passes) or '(empty)'}")
        diagnostics = verify(self.program, self.descriptors)
        if diagnostics:
            raise VerificationError(diagnostics)
        program = self.program
        for name in self.pipeline.passes:
            program = self.run_single_pass(name, program)
        applied = sum(1 for entry in self.log if not entry.skipped)
        logger.info(f"Pass pipeline finished: {applied} applied, {len(self.log) - applied} skipped")
        return {
            "success": True,
            "message": f"{applied} pass(es) applied",
            "program": program,
            "log": list(self.log)}


def run_pipeline(
        program: Program,
        pipeline: PassPipeline,
        descriptors: Optional[Mapping[str, AcceleratorDescriptor]] = None) -> Program:
    """Function to apply a pass pipeline and return the optimized program.

    Args:
        program (Program): verified input, left untouched.
        pipeline (PassPipeline): ordered pass names.
        descriptors (Mapping): optional descriptors; without them every accelerator counts as sequential.

    Returns:
        Program: output of the last pass, verified.
    """
    return PassPipelineRunner(program, pipeline, descriptors).run()["program"]
