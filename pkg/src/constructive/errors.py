"""Exception types shared across the package."""


class ConstructiveError(Exception):
    """Base class for every error raised by this package."""


class DivisionByZero(ConstructiveError, ZeroDivisionError):
    pass


class BadStraddle(ConstructiveError, ValueError):
    """locate() was asked to straddle an empty or inverted gap."""


class NestingViolation(ConstructiveError):
    """An interval stream produced an interval escaping its predecessor."""


class DomainEscape(ConstructiveError):
    pass


class ParseError(ConstructiveError):
    def __init__(self, message, line=1, column=1, offset=None):
        self.line = line
        self.column = column
        self.offset = column - 1 if offset is None else offset
        self.message = message
        super().__init__(f"{line}:{column}: {message}")

    def at(self, line: int, delta: int) -> "ParseError":
        """The same error placed on ``line``, shifted right by ``delta`` columns."""
        return ParseError(self.message, line, self.offset + delta + 1, self.offset + delta)


class WitnessInvalid(ConstructiveError):
    pass


class GapCollapse(ConstructiveError):
    pass


class BadBounds(ConstructiveError, ValueError):
    pass


class SourceViolation(ConstructiveError):
    """A halting source broke monotonicity or boundedness."""


class PrecheckFailed(ConstructiveError):
    pass


class FuelExhausted(ConstructiveError):
    """Raised from inside a lazy computation that ran out of its budget."""

    def __init__(self, spent, where=None):
        self.spent = spent
        self.where = where
        super().__init__(f"fuel exhausted after {spent} steps" + (f" at {where}" if where is not None else ""))
