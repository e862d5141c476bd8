"""Shared exception taxonomy.

The CLI maps these onto exit codes: usage problems exit 2, PreconditionError
(bad inputs, violated operation preconditions) exits 3, NumericError
(failed brackets, unresolved suprema, internal inconsistencies) exits 4.
"""


class GrowthLabError(Exception):
    """Base class for every package-specific error."""


class PreconditionError(GrowthLabError, ValueError):
    """An input violates a documented precondition of an operation."""


class DomainError(PreconditionError):
    """A numeric argument lies outside the operation's domain."""


class ModeError(PreconditionError):
    """A digit sequence was supplied in the wrong representation mode."""


class InputError(PreconditionError):
    """Structurally invalid input (e.g. digits not a prefix of x)."""


class HorizonError(PreconditionError):
    """An index was requested beyond a finite evaluation horizon."""


class AssumptionViolation(PreconditionError):
    """A derived quantity breaks an assumption the formulas rely on."""


class DivergenceError(PreconditionError):
    """A series parameter was given in its divergence region."""


class NumericError(GrowthLabError):
    """A numeric procedure could not produce a certified result."""


class UnresolvedSupError(NumericError):
    """A certified supremum scan exhausted its budget before resolving."""


class ConstructionInconsistencyError(NumericError):
    """A constructed sequence violates one of its validated bounds."""


class BracketError(NumericError):
    """A root search found no sign change inside its bracket."""


class PrecisionExhausted(GrowthLabError):
    """Certified digits ran out before the requested depth; retry with more bits."""
