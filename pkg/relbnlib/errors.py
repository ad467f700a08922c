# errors.py
"""
Exception hierarchy for relbn.
Library code raises these; relbn.py maps them to exit statuses.
"""
from __future__ import annotations

from typing import List, Optional


class RelbnError(Exception):
    """Base exception for relbn errors."""
    exit_code = 1


class SpecSyntaxError(RelbnError):
    """Text could not be parsed - carries the offending position."""

    def __init__(self,
                 message: str,
                 line: int = 0,
                 column: int = 0,
                 expected: Optional[List[str]] = None):
        self.line = line
        self.column = column
        self.expected = sorted(expected or [])
        where = f"line {line}, column {column}: " if line else ""
        hint = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{where}{message}{hint}")


class FormatError(RelbnError):
    """Malformed line-oriented input (.bwg, DIMACS)."""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class ValidationError(RelbnError):
    """Specification failed structural validation."""

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(str(v) for v in report.violations))


class QueryConflictError(RelbnError):
    """An atom is assigned both values within Q and E."""
    pass


class UnknownAtomError(RelbnError):
    """Query mentions an atom that is not a node of the network."""
    pass


class FragmentError(RelbnError):
    """Specification or query outside the fragment an algorithm requires."""
    pass


class EncodeError(RelbnError):
    """Encoder input violates its preconditions."""
    pass


class CyclicGroundingError(EncodeError):
    """Ground dependency structure is cyclic for the given skeleton."""
    pass


class ResourceGuardError(RelbnError):
    """A configured cap (nodes, roots, edges) was exceeded."""
    exit_code = 2

    def __init__(self, what: str, count: int, cap: int):
        self.what = what
        self.count = count
        self.cap = cap
        super().__init__(f"{what}: {count} exceeds cap {cap}")


class ShapeError(RelbnError):
    """Graph or instance does not have the shape an algorithm needs."""
    exit_code = 2


class UncoverableError(RelbnError):
    """Some black node has no incident edge, so no edge cover exists."""
    exit_code = 2


class ZeroEvidenceError(RelbnError):
    """P(E) = 0, so P(Q|E) is undefined."""
    exit_code = 3


class UnboundLogvarError(RelbnError):
    """Grounding met a logvar the binding does not cover."""
    pass


class PartialAssignmentError(RelbnError):
    """Assignment does not cover every node of the network."""
    pass


class ParameterError(RelbnError):
    """Numeric argument outside its admissible range."""
    pass
