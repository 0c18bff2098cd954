"""Exception and warning types shared across the library.

Two disjoint families matter to the CLI:

* ``InputError`` — the input file/arguments could not even be parsed
  (CLI exit code 1).
* ``DomainError`` and subclasses — the input parsed fine but the requested
  operation is not defined for it, or a search cap was hit (CLI exit code 2).

Every ``DomainError`` carries a short machine-readable ``code`` so the CLI
can emit structured JSON instead of a stack trace.
"""

from __future__ import annotations


class InputError(Exception):
    """Malformed input: bad JSON, missing fields, dangling arrow endpoints."""


class DomainError(Exception):
    """Base for all domain-level failures; ``code`` names the condition."""

    code = "domain-error"

    def __init__(self, message: str = "", **payload):
        super().__init__(message or self.code)
        self.payload = payload

    def to_json(self) -> dict:
        out = {"error": self.code, "message": str(self)}
        if self.payload:
            out["detail"] = {k: v for k, v in sorted(self.payload.items())}
        return out


class UnboundedPolyhedron(DomainError):
    code = "unbounded-polyhedron"


class EmptyPolyhedron(DomainError):
    code = "empty-polyhedron"


class LoopArrow(DomainError):
    code = "loop-arrow"


class WrongValencyPattern(DomainError):
    code = "wrong-valency-pattern"


class NotTight(DomainError):
    code = "not-tight"


class NotPrime(DomainError):
    code = "not-prime"


class ValencyTooLow(DomainError):
    code = "valency-too-low"


class NotAVertex(DomainError):
    code = "not-a-vertex"


class NotInSemigroup(DomainError):
    code = "not-in-semigroup"


class NotParallel(DomainError):
    code = "not-parallel"


class NotBipartite(DomainError):
    code = "not-bipartite"


class NotInRd(DomainError):
    code = "not-in-rd"


class WrongDimension(DomainError):
    code = "wrong-dimension"


class UnsupportedCase(DomainError):
    code = "unsupported-case"


class SearchCapExceeded(DomainError):
    code = "search-cap-exceeded"


class EmptyWeight(UserWarning):
    """Weight does not sum to zero, so the polyhedron is empty.

    Emitted as a warning (with an empty result) rather than an exception:
    the condition is legitimate input, it just forces a trivial answer.
    """
