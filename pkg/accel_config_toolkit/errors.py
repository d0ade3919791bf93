"""Exception hierarchy shared by all sub-packages."""


class AccelConfigError(Exception):
    """Base class for every error raised by the toolkit."""


# input errors -> CLI exit code 2
class InputError(AccelConfigError):
    """Malformed user input (IR text, descriptor, spec, manifest)."""


class IRSyntaxError(InputError):
    """IR text does not match the grammar."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        # keep position so the CLI can point at it
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class IRNameError(InputError):
    """Reference to an undefined value or undeclared accelerator."""


class IRTypeError(InputError):
    """Operand or attribute type does not fit the operation."""


class DescriptorError(InputError):
    """Accelerator descriptor file is invalid."""


class MatmulSpecError(InputError):
    """Benchmark spec is invalid or does not fit the descriptor."""


class ManifestError(InputError):
    """Run manifest is incomplete or references missing files."""


class PipelineConfigError(InputError):
    """Pass selection is unknown or violates the pass ordering rules."""


# analysis errors -> CLI exit code 1
class VerificationError(AccelConfigError):
    """Program failed verification."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        lines = "; ".join(f"[{d.rule}] {d.location}: {d.message}" for d in self.diagnostics)
        super().__init__(f"verification failed: {lines}")


class InternalPassError(AccelConfigError):
    """A pass produced IR that does not verify."""

    def __init__(self, pass_name: str, diagnostics):
        self.pass_name = pass_name
        self.diagnostics = list(diagnostics)
        lines = "; ".join(f"[{d.rule}] {d.location}: {d.message}" for d in self.diagnostics)
        super().__init__(f"pass '{pass_name}' produced invalid IR: {lines}")


class SimulationError(AccelConfigError):
    """Program cannot be simulated against the given descriptors."""


class SimulationResourceError(SimulationError):
    """A loop exceeds the trip-count guard."""


class RooflineError(AccelConfigError):
    """Roofline inputs are out of range."""
