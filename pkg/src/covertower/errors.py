"""Exception types shared across the package."""


class ExplicitLimitExceeded(RuntimeError):
    """An explicit materialization would exceed the configured size limit."""

    def __init__(self, size, limit):
        super().__init__(f"explicit object of size {size} exceeds limit {limit}")
        self.size = size
        self.limit = limit


class HorizonExhausted(ValueError):
    """A request reaches past the steps determined by a finite anchor.

    ``max_steps`` is the largest usable step count for the anchor.
    """

    def __init__(self, requested, max_steps):
        super().__init__(
            f"{requested} steps requested but the anchor only determines {max_steps}; "
            "re-anchor deeper"
        )
        self.requested = requested
        self.max_steps = max_steps


class NoDivergenceWithinHorizon(RuntimeError):
    """No separation was found inside the horizon; the depths are too shallow."""


class ConfigError(ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
