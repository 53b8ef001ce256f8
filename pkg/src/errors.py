"""
Exception hierarchy shared by the extension toolkit
"""
from dataclasses import dataclass
from typing import List, Optional


class KreinError(Exception):
    """Base class for all toolkit errors"""


class InvalidShiftError(KreinError):
    """Spectral shift below the admissible bound (λ ≤ ω or λ ≤ λ°)"""


class RejectedInputError(KreinError):
    """Input data violates a structural requirement"""


class UnsupportedRelationError(KreinError):
    """Relation has no analytic branch for the requested operation"""


class UnsupportedConfigurationError(KreinError):
    """Preconditions of an optional construction are not met"""


class StepSizeError(KreinError):
    """Time step too large for the type of the generator"""


class SingularPointError(KreinError):
    """Evaluation requested at a singular point of a Green function"""


class UnsupportedStepError(KreinError):
    """Resolvent step cannot be represented symbolically"""


class InternalInconsistencyError(KreinError):
    """A computed quantity contradicts its defining property"""


class ToleranceError(KreinError):
    """Iterative solve failed to reach its tolerance"""

    def __init__(self, message: str, iterations: int, residual: float):
        super().__init__(f"{message} (iterations={iterations}, residual={residual:.3e})")
        self.iterations = iterations
        self.residual = residual


@dataclass(frozen=True)
class Diagnostic:
    """Field-level scenario problem located by a JSON pointer"""

    pointer: str
    message: str

    def to_dict(self) -> dict:
        return {'pointer': self.pointer, 'message': self.message}


class ScenarioError(KreinError):
    """Scenario document failed validation"""

    def __init__(self, diagnostics: List[Diagnostic], message: Optional[str] = None):
        self.diagnostics = list(diagnostics)
        text = message or "; ".join(f"{d.pointer or '/'}: {d.message}" for d in self.diagnostics)
        super().__init__(text)
