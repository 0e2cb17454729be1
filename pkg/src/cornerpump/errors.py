"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid argument passed to a builder or numerical routine."""


class SingularRatioError(InputError):
    """A decay ratio with modulus one makes the geometric sums diverge."""


class NumericalError(RuntimeError):
    """Propagation produced non-finite amplitudes or excessive norm drift."""


class ConfigError(ValueError):
    """Malformed or incomplete experiment configuration.

    ``line`` is the 1-based line number of the offending entry, when known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
