"""Exception hierarchy.

Two families matter to callers: :class:`InputError` for malformed inputs
(files, arguments) and :class:`DomainError` for well-formed inputs that
violate an operation's precondition.  The CLI maps them to exit codes 2
and 1 respectively.
"""


class HQueryError(Exception):
    pass


class InputError(HQueryError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class ArityError(InputError, ValueError):
    pass


class DomainError(HQueryError):
    pass


class NotMonotoneError(DomainError):
    pass


class DegeneracyError(DomainError):
    pass


class InvalidStepError(DomainError):
    def __init__(self, message, valuation=None):
        self.valuation = valuation
        super().__init__(message)


class InvalidChainError(DomainError):
    pass


class NothingToFetchError(DomainError):
    pass


class EulerError(DomainError):
    """Raised when an operation needs a particular Euler characteristic."""

    def __init__(self, message, euler):
        self.euler = euler
        super().__init__(message)


class NotReducibleError(EulerError):
    pass


class WrongSignError(EulerError):
    pass


class NoWitnessError(DomainError):
    pass


class NotFragmentableError(EulerError):
    pass


class NotCompilableError(EulerError):
    def __init__(self, message, euler, verdict=None):
        self.verdict = verdict
        super().__init__(message, euler)


class UnreachableError(DomainError):
    pass


class GuardError(DomainError):
    """An enumeration guard (facts, variables, lattice size) was exceeded."""


class OrderError(DomainError):
    pass


class UncheckedCircuitError(DomainError):
    pass
