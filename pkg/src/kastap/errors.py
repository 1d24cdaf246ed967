"""Exception types raised by the library."""


class InvalidArgumentError(ValueError):
    pass


class EmptyBasisError(ValueError):
    """Orthogonalization produced no basis vectors."""


class DegenerateTargetError(ValueError):
    """The target steering vector lies (numerically) inside the clutter subspace."""


class IllConditionedError(ValueError):
    """A least-squares system is rank deficient beyond the allowed condition number."""


class ConfigError(ValueError):
    """Invalid experiment or scenario configuration.

    ``line`` is the 1-based line number in the source file when known.
    """

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        super().__init__(message)

    def __str__(self):
        msg = super().__str__()
        where = self.source or "<config>"
        if self.line is not None:
            return f"{where}:{self.line}: {msg}"
        return f"{where}: {msg}"
