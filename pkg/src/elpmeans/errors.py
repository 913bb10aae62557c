"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class ELPMeansError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ConfigError(ELPMeansError, ValueError):
    """Invalid parameters or a bad run configuration."""

    exit_code = 2


class ParseError(ELPMeansError, ValueError):
    """Malformed edge-list, labels, or embedding input."""

    exit_code = 3

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DataError(ELPMeansError, ValueError):
    """Input data is well-formed but inconsistent (e.g. labels vs. graph)."""

    exit_code = 3


class DegenerateInputError(ELPMeansError, ValueError):
    """Numerically degenerate input, such as coincident embedding points."""

    exit_code = 4

    def __init__(self, message, stage=None):
        self.stage = stage
        if stage is not None:
            message = f"[{stage}] {message}"
        super().__init__(message)
