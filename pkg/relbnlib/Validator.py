from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

import networkx as nx

from .errors import ValidationError
from .model import (Assessment, Definition, RelationalSpec, Var, atoms, children, free_logvars,
                    Quantifier, relations_in)

logger = logging.getLogger(__name__)


class ViolationKind(Enum):
    CYCLE = "cycle"
    UNDECLARED = "undeclared-relation"
    ARITY = "arity-mismatch"
    DUPLICATE_ENTRY = "duplicate-entry"
    MISSING_ENTRY = "missing-entry"
    CONFLICTING_DECLARATION = "conflicting-declaration"
    STRAY_LOGVAR = "stray-logvar"
    HEAD_LOGVARS = "head-logvars"
    REBOUND_LOGVAR = "rebound-logvar"
    PROBABILITY = "probability-range"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    message: str
    relation: Optional[str] = None

    def __str__(self) -> str:
        return f"{self.kind.value}: {self.message}"


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def of_kind(self, kind: ViolationKind) -> List[Violation]:
        return [v for v in self.violations if v.kind == kind]

    def raise_if_invalid(self) -> None:
        if not self.ok:
            raise ValidationError(self)


def parvariable_graph(spec: RelationalSpec) -> nx.DiGraph:
    """Edge Y -> X iff Y occurs in the definition body of X."""
    g = nx.DiGraph()
    g.add_nodes_from(r.name for r in spec.relations)
    for d in spec.definitions():
        g.add_node(d.relation)
        g.add_edges_from((y, d.relation) for y in relations_in(d.body))
    return g


def _check_bindings(body, head: set, relation: str, report: ValidationReport) -> None:
    """No quantifier may rebind a head logvar or one bound by an enclosing quantifier."""

    def visit(f, bound: frozenset):
        if isinstance(f, Quantifier):
            if f.var in head or f.var in bound:
                report.violations.append(
                    Violation(ViolationKind.REBOUND_LOGVAR,
                              f"logvar {f.var.name} rebound in {relation}", relation))
            visit(f.body, bound | {f.var})
            return
        for child in children(f):
            visit(child, bound)

    visit(body, frozenset())


def validate_spec(spec: RelationalSpec) -> ValidationReport:
    """List every structural problem; an empty report means the spec is valid."""
    report = ValidationReport()

    def reportError(kind: ViolationKind, message: str, relation: Optional[str] = None):
        report.violations.append(Violation(kind, message, relation))

    arities: Dict[str, int] = {}
    for r in sorted(spec.relations):
        if r.name in arities and arities[r.name] != r.arity:
            reportError(ViolationKind.CONFLICTING_DECLARATION,
                        f"{r.name} declared with arities {arities[r.name]} and {r.arity}", r.name)
        arities.setdefault(r.name, r.arity)

    counts: Dict[str, int] = {}
    for entry in spec.entries:
        counts[entry.relation] = counts.get(entry.relation, 0) + 1
    for name, n in counts.items():
        if n > 1:
            reportError(ViolationKind.DUPLICATE_ENTRY, f"{name} has {n} entries", name)
    for name in sorted(arities):
        if name not in counts:
            reportError(ViolationKind.MISSING_ENTRY, f"{name} has no definition or assessment",
                        name)

    for entry in spec.entries:
        name = entry.relation
        if name not in arities:
            reportError(ViolationKind.UNDECLARED, f"entry for undeclared relation {name}", name)
        elif len(entry.logvars) != arities[name]:
            reportError(ViolationKind.ARITY,
                        f"{name} has arity {arities[name]} but head has {len(entry.logvars)}", name)
        if not all(isinstance(v, Var) for v in entry.logvars) or len(set(entry.logvars)) != len(
                entry.logvars):
            reportError(ViolationKind.HEAD_LOGVARS,
                        f"head of {name} must list pairwise distinct logvars", name)
        if isinstance(entry, Assessment) and not 0 <= entry.probability <= 1:
            reportError(ViolationKind.PROBABILITY,
                        f"P({name}) = {entry.probability} is outside [0, 1]", name)
        if not isinstance(entry, Definition):
            continue

        for atom in atoms(entry.body):
            if atom.relation not in arities:
                reportError(ViolationKind.UNDECLARED,
                            f"{name} mentions undeclared relation {atom.relation}", name)
            elif len(atom.args) != arities[atom.relation]:
                reportError(
                    ViolationKind.ARITY,
                    f"{atom.relation} used with {len(atom.args)} arguments in {name}, "
                    f"declared arity {arities[atom.relation]}", name)
        head = set(entry.logvars)
        stray = free_logvars(entry.body) - head
        if stray:
            names = ", ".join(sorted(v.name for v in stray))
            reportError(ViolationKind.STRAY_LOGVAR, f"{name} body has free logvars not in head: {names}",
                        name)
        _check_bindings(entry.body, head, name, report)

    graph = parvariable_graph(spec)
    for component in nx.strongly_connected_components(graph):
        members = sorted(component)
        if len(members) > 1 or graph.has_edge(members[0], members[0]):
            reportError(ViolationKind.CYCLE, "cyclic dependency among " + ", ".join(members),
                        members[0])

    if not report.ok:
        logger.debug("validation found %d violation(s)", len(report.violations))
    return report
