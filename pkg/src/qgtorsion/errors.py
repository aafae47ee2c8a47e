"""Exception types shared across the package.

The CLI maps these onto exit codes, so every failure a user can trigger
derives from :class:`QGTorsionError`.
"""


class QGTorsionError(Exception):
    pass


# graph model

class ValidationError(QGTorsionError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        msg = "; ".join(str(v) for v in self.violations) or "invalid graph"
        super().__init__(msg)


class NotConnected(QGTorsionError, ValueError):
    pass


class NotDoublyConnected(QGTorsionError, ValueError):
    pass


# numerics

class SingularMatrix(QGTorsionError, ArithmeticError):
    pass


class NoConvergence(QGTorsionError, ArithmeticError):
    pass


class MassNotPositiveDefinite(QGTorsionError, ValueError):
    pass


class NoSignChange(QGTorsionError, ValueError):
    pass


# torsion / spectral

class NoTorsion(QGTorsionError, ArithmeticError):
    """Zero lies in the spectrum of the discrete system; no torsion function."""


class DegenerateForm(QGTorsionError, ArithmeticError):
    pass


class NegativeGroundState(QGTorsionError, ValueError):
    pass


class BudgetExceeded(QGTorsionError, RuntimeError):
    pass


class InconclusiveAccuracy(QGTorsionError, RuntimeError):
    pass


class HypothesisViolated(QGTorsionError, ValueError):
    pass


class PointDependenceError(QGTorsionError, AssertionError):
    pass


# surgery

class SurgeryError(QGTorsionError, ValueError):
    pass


class NotLonger(SurgeryError):
    pass


class NonPositiveScale(SurgeryError):
    pass


class SameVertex(SurgeryError):
    pass


class DirichletUnsupported(SurgeryError):
    pass


class Disconnects(SurgeryError):
    pass


class StrengthMismatch(SurgeryError):
    pass


class BadAttachment(SurgeryError):
    pass


class NotPendant(SurgeryError):
    pass


class UnknownFixture(QGTorsionError, KeyError):
    pass
