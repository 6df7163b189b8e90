"""Exception hierarchy shared by the solvers, parsers and the CLI.

The CLI maps these onto exit codes: infeasibility -> 2, numeric
breakdown -> 3, bad input -> 4.
"""


class PdlaError(Exception):
    """Base class for all package errors."""


# --- bad input (parsing / validation) ---------------------------------------

class MalformedDocument(PdlaError):
    pass


class NonPositiveCost(MalformedDocument):
    pass


class NegativeEntry(MalformedDocument):
    pass


class EmptyRow(PdlaError):
    """A covering row with no positive entry can never be satisfied."""


class AsymmetricMatrix(MalformedDocument):
    pass


class NotPsd(MalformedDocument):
    pass


class NonMonotoneB(MalformedDocument):
    pass


class LengthMismatch(MalformedDocument):
    pass


class NegativeAdvice(MalformedDocument):
    pass


class LambdaOutOfRange(MalformedDocument):
    pass


class AdviceAboveCap(MalformedDocument):
    pass


class DimensionMismatch(MalformedDocument):
    pass


class MalformedLine(MalformedDocument):
    pass


# --- infeasibility -----------------------------------------------------------

class NoFeasibleSolution(PdlaError):
    """Raised with a certifying row: even x = 1 cannot satisfy it."""


class Infeasible(PdlaError):
    """Offline solver found the instance infeasible."""


class UncoverableElement(PdlaError):
    pass


class UnscalableRow(PdlaError):
    """Advice-scaling baseline hit a violated row with zero advice mass."""


# --- numeric breakdown --------------------------------------------------------

class ExponentOverflow(PdlaError):
    """Growth exponent exceeded the guard; signals numerical breakdown."""


class NoProgress(PdlaError):
    """All growth rates vanished on a violated row (should be impossible)."""


class NotConverged(PdlaError):
    pass


class PhaseRestartLimit(PdlaError):
    pass
