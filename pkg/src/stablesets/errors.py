"""Exception hierarchy.

Every error carries an optional ``witness`` so the CLI can serialise the
offending data into its error JSON.
"""


class WorkbenchError(Exception):
    """Base class for all errors raised by this package."""

    kind = "error"

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness

    def to_json(self):
        out = {"error": self.kind, "message": str(self)}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


class NotALattice(WorkbenchError):
    kind = "NotALattice"


class NotAPartialOrder(WorkbenchError):
    kind = "NotAPartialOrder"


class SizeCapExceeded(WorkbenchError):
    kind = "SizeCapExceeded"


class PreconditionViolated(WorkbenchError):
    kind = "PreconditionViolated"


class NotIsotone(WorkbenchError):
    kind = "NotIsotone"


class NotMonotone(WorkbenchError):
    kind = "NotMonotone"


class NotClosed(WorkbenchError):
    kind = "NotClosed"


class HypothesisFailed(WorkbenchError):
    kind = "HypothesisFailed"


class EmptyIndex(WorkbenchError):
    kind = "EmptyIndex"


class SignatureMismatch(WorkbenchError):
    kind = "SignatureMismatch"


class FormulaSyntaxError(WorkbenchError):
    kind = "SyntaxError"

    def __init__(self, message, position=None):
        super().__init__(f"{message} at position {position}" if position is not None else message,
                         witness={"position": position})
        self.position = position


class UnknownSymbol(WorkbenchError):
    kind = "UnknownSymbol"


class ArityMismatch(WorkbenchError):
    kind = "ArityMismatch"


class UnboundVariable(WorkbenchError):
    kind = "UnboundVariable"


class FreeVariableCountMismatch(WorkbenchError):
    kind = "FreeVariableCountMismatch"


class InputError(WorkbenchError):
    """Malformed JSON input or CLI arguments."""

    kind = "InputError"
