"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`PwqhError`,
which carries a stable ``code`` used in the CLI's machine-readable error JSON.
"""

from __future__ import annotations


class PwqhError(Exception):
    code = "Error"

    def to_json(self) -> dict:
        return {"error": self.code, "message": str(self)}


class ZeroField(PwqhError, ValueError):
    code = "ZeroField"


class NotQuasiHomogeneous(PwqhError, ValueError):
    code = "NotQuasiHomogeneous"


class NotQuadraticNonHomogeneous(PwqhError, ValueError):
    code = "NotQuadraticNonHomogeneous"


class UnsupportedShape(NotQuadraticNonHomogeneous):
    """Quadratic quasi-homogeneous zones whose monomials fit none of the raw shapes."""

    code = "UnsupportedShape"


class ZeroParameter(PwqhError, ValueError):
    code = "ZeroParameter"


class DomainError(PwqhError, ValueError):
    code = "DomainError"


class NotACenter(PwqhError, ValueError):
    code = "NotACenter"


class QuadratureFailure(PwqhError, ArithmeticError):
    code = "QuadratureFailure"


class DegreeMismatch(PwqhError, ValueError):
    code = "DegreeMismatch"


class EmptyPoly(PwqhError, ValueError):
    code = "EmptyPoly"


class TooManyRoots(PwqhError, ValueError):
    code = "TooManyRoots"


class DuplicateRoots(PwqhError, ValueError):
    code = "DuplicateRoots"


class DegenerateParameter(PwqhError, ValueError):
    code = "DegenerateParameter"


class StartOnSliding(PwqhError, ValueError):
    code = "StartOnSliding"


class IntegrationFailure(PwqhError, ArithmeticError):
    code = "IntegrationFailure"


class StepBudgetExceeded(IntegrationFailure):
    code = "StepBudgetExceeded"

    def __init__(self, message: str, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class NoReturn(IntegrationFailure):
    code = "NoReturn"


class RenderBudgetExceeded(PwqhError, RuntimeError):
    code = "RenderBudgetExceeded"
