"""Exception hierarchy shared by every module."""


class FoldkitError(Exception):
    """Base class for all errors raised by foldkit."""


class AlphabetError(FoldkitError, ValueError):
    """A letter or name does not belong to the alphabet in use."""


class DegenerateInputError(FoldkitError, ValueError):
    """Input is well formed but degenerate (empty cyclic word, empty relator, ...)."""


class NoAlternation(FoldkitError, ValueError):
    """A word does not alternate between the two sides of a generator split."""


class PreconditionError(FoldkitError, ValueError):
    """An operation was called on an input that does not satisfy its precondition."""


class ConfigError(FoldkitError, ValueError):
    """Invalid cap, budget or other run configuration."""


class BudgetExceeded(FoldkitError, RuntimeError):
    """A bounded search ran out of budget before reaching a decision."""

    def __init__(self, message: str, count: int | None = None):
        super().__init__(message)
        self.count = count


class ParseError(FoldkitError, ValueError):
    """Malformed text input. Carries a 1-based line and column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.message = message


class NotApplicable(FoldkitError, ValueError):
    """An operation does not apply to this input (e.g. a hierarchy step on a terminal relator)."""
