"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """A precondition on an input argument was violated."""


class NumericalFailure(RuntimeError):
    """A numerical routine did not converge or produced an untrustworthy result."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class StaleCacheError(RuntimeError):
    """A matrix-element cache was queried with a context it was not built for."""


class CacheIOError(OSError):
    """Reading or writing the persistent element cache failed."""


class SamplerStuckError(RuntimeError):
    """A Metropolis chain accepted no moves over a whole batch."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConfigError(ValueError):
    """An experiment configuration failed validation."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
