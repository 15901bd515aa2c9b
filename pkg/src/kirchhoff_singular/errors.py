"""Exception hierarchy.

Every error carries a machine-readable ``reason`` code and the process exit
status the command-line front end maps it to (2 for misuse of the
mathematics, 3 for numerical failure).
"""


class KirchhoffError(Exception):
    reason = "error"
    exit_code = 2

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        return {"reason": self.reason, "message": str(self), **self.details}


class ParameterDomainError(KirchhoffError, ValueError):
    reason = "parameter_domain"


class SupercriticalError(ParameterDomainError):
    reason = "supercritical"


class RegimeMismatchError(ParameterDomainError):
    reason = "regime_mismatch"


class UnclassifiableError(ParameterDomainError):
    reason = "unclassifiable"


class DivisionDomainError(ParameterDomainError):
    reason = "division_domain"


class DivergenceError(ParameterDomainError):
    reason = "divergence"


class MonotonicityError(ParameterDomainError):
    reason = "monotonicity"


class ConvergenceError(KirchhoffError, RuntimeError):
    reason = "convergence"
    exit_code = 3


class IterationError(ConvergenceError):
    reason = "iteration_failure"


class BarrierEscapeError(ConvergenceError):
    reason = "barrier_escape"


class BracketError(ConvergenceError):
    reason = "bracket_failure"


class ShootingError(ConvergenceError):
    reason = "shooting_failure"
