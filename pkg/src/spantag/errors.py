"""Exception hierarchy shared across the toolkit."""


class SpantagError(Exception):
    """Base class for all toolkit errors."""


class ParseError(SpantagError):
    """Malformed input file (column files, templates, profiles, models)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class RepresentabilityError(SpantagError):
    """A span set cannot be expressed in the requested tagging scheme."""


class SchemeValidityError(SpantagError):
    """A label sequence violates the tagging-scheme grammar."""

    def __init__(self, position: int, rule: str):
        self.position = position
        self.rule = rule
        super().__init__(f"position {position}: {rule}")


class ConfigError(SpantagError):
    """Invalid configuration or flag combination."""


class TrainingError(SpantagError):
    """Optimization failed; carries the last iterate as a diagnostic."""

    def __init__(self, message: str, weights=None, log=None):
        self.weights = weights
        self.log = log
        super().__init__(message)


class NumericError(SpantagError):
    """A numeric routine hit a non-finite value or failed to converge."""
