"""Exception types shared across the package."""


class DescatError(Exception):
    """Base class for all errors raised by descat."""


class InputError(DescatError):
    """A caller supplied an argument that violates an operation's contract."""


class PreconditionError(DescatError):
    """A stated precondition failed; the message names a concrete witness."""


class UnsupportedSupervisorError(DescatError):
    """An operation requires an estimate-based supervisor and got something else."""


class ParseError(DescatError):
    """A model document could not be parsed.

    Carries the 1-based line and column of the offending token plus,
    when known, what was expected there.
    """

    def __init__(self, message: str, line: int, column: int = 1, expected: str | None = None):
        self.line = line
        self.column = column
        self.expected = expected
        detail = f"line {line}, column {column}: {message}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)
