"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Solver or experiment options are inconsistent with the problem."""


class StepSizeError(RuntimeError):
    """Line search could not find an acceptable step."""


class ParseError(ValueError):
    """Malformed dataset input; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class LabelError(ParseError):
    """Dataset label outside the supported set."""
