"""Exception hierarchy. Every error carries a machine-readable ``code``
(the class name) and an optional ``details`` mapping for diagnostics."""

from __future__ import annotations

from typing import Any


class ForcingLabError(Exception):
    def __init__(self, message: str = "", **details: Any):
        super().__init__(message)
        self.details = details

    @property
    def code(self) -> str:
        return type(self).__name__

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"error": self.code, "message": str(self)}
        if self.details:
            out["details"] = {k: str(v) for k, v in self.details.items()}
        return out


class CycleError(ForcingLabError):
    pass


class TopError(ForcingLabError):
    pass


class SizeCapExceeded(ForcingLabError):
    pass


class ParseError(ForcingLabError):
    pass


class DanglingName(ForcingLabError):
    pass


class UnknownCondition(ForcingLabError):
    pass


class NonTransitiveX(ForcingLabError):
    pass


class NonTransitiveT(ForcingLabError):
    pass


class IncompatibleAssignments(ForcingLabError):
    pass


class XMismatch(ForcingLabError):
    pass


class NotGeneric(ForcingLabError):
    pass


class StartNotInSigma(ForcingLabError):
    pass


class ParamError(ForcingLabError):
    pass


class NoMutationFound(ForcingLabError):
    pass
