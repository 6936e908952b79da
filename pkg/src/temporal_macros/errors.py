"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class MacroError(Exception):
    """Base class for every error raised by this package."""


class ShapeViolation(MacroError):
    """A plan has coinciding event times ("no moving targets")."""

    def __init__(self, clashes):
        self.clashes = list(clashes)
        lines = "; ".join(str(c) for c in self.clashes)
        super().__init__(f"plan violates distinct event times: {lines}")


class UnknownAction(MacroError):
    pass


class IllFormedAction(MacroError):
    def __init__(self, action, violations):
        self.action = action
        self.violations = list(violations)
        super().__init__(
            f"action {action.label()} is ill-formed: " + "; ".join(self.violations)
        )


class IllFormedTask(MacroError):
    pass


class CompositionError(MacroError):
    """Composition was requested on operands it is never defined for."""


class NameClash(MacroError):
    pass


class NotAMacro(MacroError):
    pass


class NotInPlan(MacroError):
    pass


class CertificationFailure(MacroError):
    """A plan produced by refinement failed re-validation.

    This indicates a bug: refinement of a solution must yield a solution.
    """

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class PddlError(MacroError):
    pass


class ParseError(PddlError):
    def __init__(self, message, line=None, col=None, expected=None):
        self.line = line
        self.col = col
        self.expected = expected
        where = f"{line}:{col}: " if line is not None else ""
        tail = f" (expected {expected})" if expected else ""
        super().__init__(f"{where}{message}{tail}")


class UnsupportedFeature(PddlError):
    def __init__(self, feature, line=None, col=None):
        self.feature = feature
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(f"{where}unsupported PDDL feature: {feature}")


class TypingError(PddlError):
    """Ill-typed atom, object or parameter."""


class GroundingError(PddlError):
    pass


class UnknownSchema(PddlError):
    pass


class RecipeError(PddlError):
    pass


class UndefinedForAllGroundings(PddlError):
    def __init__(self, macro_name, reason):
        self.macro_name = macro_name
        self.reason = reason
        super().__init__(f"macro {macro_name} is undefined for every grounding: {reason}")


class DurationMismatch(PddlError):
    pass


class NotAMoveSchema(PddlError):
    pass


class ConfigError(PddlError):
    pass


IllFormedInput = IllFormedAction


class TooShort(CompositionError):
    pass


class NotASolution(MacroError):
    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)
