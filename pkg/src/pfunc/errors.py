"""Exception hierarchy.

Every error carries enough context (a location, a value, or the name of the
violated hypothesis) to be written into a JSON report verbatim.
"""


class PFuncError(Exception):
    """Base class for all errors raised by the package."""

    code = "PFuncError"

    def __init__(self, message="", **context):
        super().__init__(message)
        self.context = context

    def to_dict(self):
        out = {"error": self.code, "message": str(self)}
        out.update({k: v for k, v in self.context.items()})
        return out


class DomainError(PFuncError):
    code = "DomainError"


class NoBracket(PFuncError):
    code = "NoBracket"


class NotMonotone(PFuncError):
    code = "NotMonotone"


class NonFinite(PFuncError):
    code = "NonFinite"


class BadParams(PFuncError):
    code = "BadParams"


class PtNonPositive(PFuncError):
    code = "PtNonPositive"


class GridTooSmall(PFuncError):
    code = "GridTooSmall"


class DegenerateHessian(PFuncError):
    code = "DegenerateHessian"


class BallOutOfBounds(PFuncError):
    code = "BallOutOfBounds"


class NoConvergence(PFuncError):
    code = "NoConvergence"


class LinearSolveFailure(PFuncError):
    code = "LinearSolveFailure"


class EllipticityLost(PFuncError):
    code = "EllipticityLost"


class BlowUp(PFuncError):
    code = "BlowUp"


class DegenerateEllipticity(PFuncError):
    code = "DegenerateEllipticity"


class NotASolution(PFuncError):
    code = "NotASolution"


class HypothesisFail(PFuncError):
    code = "HypothesisFail"

    def __init__(self, message="", hypothesis="", **context):
        super().__init__(message, hypothesis=hypothesis, **context)
        self.hypothesis = hypothesis


class PNotConstant(PFuncError):
    code = "PNotConstant"


class ModeMismatch(PFuncError):
    code = "ModeMismatch"


class NotSubharmonic(PFuncError):
    code = "NotSubharmonic"


class MarginTooSmall(PFuncError):
    code = "MarginTooSmall"


class NotConvex(PFuncError):
    code = "NotConvex"


class NotSubsolution(PFuncError):
    code = "NotSubsolution"


class ConfigError(PFuncError):
    code = "ConfigError"
