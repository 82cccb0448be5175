from typing import Optional


class PerceptronError(Exception):
    """Base class for failures raised by the perceptron toolkit."""


class ConfigError(PerceptronError):
    pass


class SynthesisFailure(PerceptronError):
    """A pulse could not be synthesized; `time` marks where integration broke down."""

    def __init__(self, reason: str, time: Optional[float] = None):
        self.reason = reason
        self.time = time
        where = f" at t={time:.6g}" if time is not None else ""
        super().__init__(f"{reason}{where}")


class PropagationError(PerceptronError):
    pass


class QuadratureError(PerceptronError):
    pass


class UnattainableTolerance(PerceptronError):
    """No sampled final time reaches the requested distance."""


class TableFormatError(PerceptronError):
    """A CSV/JSON artifact is missing fields or columns this toolkit writes."""
