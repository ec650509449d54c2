"""Exception hierarchy shared by every module."""

from __future__ import annotations


class HrsError(Exception):
    """Base class for all library errors."""


class InputError(HrsError):
    """Errors caused by user input (mapped to exit code 2 by the CLI)."""


class ParseError(InputError):
    pass


class UnboundVariable(InputError):
    pass


class UnknownConstant(InputError):
    pass


class UnknownRuleSymbol(InputError):
    pass


class TypeMismatch(InputError):
    pass


class NotTypable(TypeMismatch):
    pass


IllTyped = TypeMismatch


class NotBetaNormal(InputError):
    pass


class IllTypedRule(InputError):
    pass


class NotAPattern(InputError):
    pass


class NotLeftLinear(InputError):
    pass


class VariableEscape(InputError):
    pass


class NotBaseType(InputError):
    pass


class NonComposable(InputError):
    pass


NotComposable = NonComposable


class NotCoinitial(InputError):
    pass


class StaleOccurrence(InputError):
    pass


class OverlappingOccurrences(InputError):
    pass


class BadChoices(InputError):
    pass


class NotCompatible(HrsError):
    pass


class MatchFailure(HrsError):
    """Compatibilization could not line up a rule with its source."""


class BudgetExceeded(HrsError):
    """A budgeted search ran out of fuel.

    ``report`` carries diagnostic data such as the offending pair index or
    the current measure.
    """

    def __init__(self, message: str, **report: object) -> None:
        super().__init__(message)
        self.report = report


class InternalBudgetExceeded(BudgetExceeded):
    pass
