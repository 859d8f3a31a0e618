"""Exception classes shared across the pipeline."""


class IrpulseError(Exception):
    """Base class for all library errors."""


class ValidationError(IrpulseError):
    """Input data violates a documented invariant or precondition."""


class FormatError(IrpulseError):
    """A file does not conform to one of the declared text formats."""


class PipelineError(IrpulseError):
    """A pipeline stage failed; carries the stage name for diagnostics."""

    def __init__(self, stage, message):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
