"""Typed errors raised by the library.

Each error carries a ``stage`` string and optional structured ``witness``
data so the CLI can report why a computation stopped.  Errors split into
determinate negatives (:class:`NegativeResult`) and failed hypotheses
(:class:`HypothesisFailed`).
"""

from .jet import JetError


class MorseJetsError(Exception):
    stage = "library"

    def __init__(self, message, witness=None, stage=None):
        super().__init__(message)
        self.witness = witness if witness is not None else {}
        if stage is not None:
            self.stage = stage

    def to_dict(self):
        return {"error": type(self).__name__, "stage": self.stage,
                "message": str(self), "witness": _plain(self.witness)}


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (int, float, str, bool)) or obj is None:
        return obj
    return str(obj)


class NegativeResult(MorseJetsError):
    """A decided 'no' (exit status 1)."""


class HypothesisFailed(MorseJetsError):
    """The input does not satisfy the hypotheses of the requested operation."""


class NotEquivalent(NegativeResult):
    stage = "equivalence"


class NotDiagonalizable(HypothesisFailed):
    stage = "pencil"


class NotGeneric(HypothesisFailed):
    stage = "genericity"


class NotQGeneric(NotGeneric):
    stage = "q-genericity"


class NotMorse(HypothesisFailed):
    stage = "morse"


class DegenerateForm(HypothesisFailed):
    stage = "pencil"


class FieldExtensionRequired(HypothesisFailed):
    """An exact computation needs a number outside the Gaussian rationals."""
    stage = "coefficient-field"


class NotInIdeal(HypothesisFailed):
    stage = "ideal-membership"

    def __init__(self, message, degree=None, residual=None, witness=None):
        w = dict(witness or {})
        w.setdefault("degree", degree)
        if residual is not None:
            w.setdefault("residual", residual)
        super().__init__(message, w)
        self.degree = degree
        self.residual = residual


class LiftFailure(HypothesisFailed):
    stage = "curve-lift"


class NotAFold(HypothesisFailed):
    stage = "fold"


class NotExceptional(HypothesisFailed):
    stage = "cusp"


__all__ = [
    "JetError", "MorseJetsError", "NegativeResult", "HypothesisFailed", "NotEquivalent",
    "NotDiagonalizable", "NotGeneric", "NotQGeneric", "NotMorse", "DegenerateForm",
    "FieldExtensionRequired", "NotInIdeal", "LiftFailure", "NotAFold", "NotExceptional",
]
