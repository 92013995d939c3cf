"""Exception hierarchy shared by all modules; the CLI maps these to exit codes."""


class AqecError(Exception):
    """Base class for library errors."""

    exit_code = 1


class ContractViolation(AqecError, ValueError):
    """A caller broke an operation's precondition (bad shapes, indices, sizes)."""

    exit_code = 3


class ParameterError(AqecError, ValueError):
    """Physically or mathematically invalid parameters."""

    exit_code = 3


class UnsupportedError(ParameterError):
    """The requested combination has no implementation by design."""


class InvariantViolation(AqecError, RuntimeError):
    """An internal consistency check failed (e.g. a corrupted tableau)."""

    exit_code = 4
