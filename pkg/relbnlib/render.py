# render.py
"""
Canonical text for formulas, specifications, queries and ground networks.

Parenthesization is chosen so that parse_spec(render_spec(s)) == s:
nested operators of the same kind keep their grouping and quantifiers are
wrapped whenever they are an operand.
"""
from __future__ import annotations

from typing import Dict, Iterable, List

from .model import (And, Assessment, Atom, Constant, Definition, DefinedNode, Eq, Exists, ForAll,
                    Formula, GroundAtom, GroundNetwork, Iff, Implies, Not, Or, Query,
                    RelationalSpec, RootNode, Var)

_LEVEL = {Iff: 1, Implies: 2, Or: 3, And: 4}


def _level(f: Formula) -> int:
    if isinstance(f, (ForAll, Exists)):
        return 0
    return _LEVEL.get(type(f), 5)


def render_term(t) -> str:
    return t.name if isinstance(t, Var) else str(t)


def _wrap(f: Formula, needs: bool) -> str:
    text = render_formula(f)
    return f"({text})" if needs else text


def render_formula(f: Formula) -> str:
    if isinstance(f, Constant):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        return f"{f.relation}({','.join(render_term(a) for a in f.args)})"
    if isinstance(f, Eq):
        return f"{render_term(f.left)} = {render_term(f.right)}"
    if isinstance(f, Not):
        return "!" + _wrap(f.body, _level(f.body) < 5)
    if isinstance(f, And):
        if not f.parts:
            return "true"
        return " & ".join(_wrap(p, _level(p) <= 4) for p in f.parts)
    if isinstance(f, Or):
        if not f.parts:
            return "false"
        return " | ".join(_wrap(p, _level(p) <= 3) for p in f.parts)
    if isinstance(f, Implies):
        right_needs = _level(f.right) < 2 or isinstance(f.right, (ForAll, Exists))
        return f"{_wrap(f.left, _level(f.left) <= 2)} -> {_wrap(f.right, right_needs)}"
    if isinstance(f, Iff):
        return f"{_wrap(f.left, _level(f.left) <= 1)} <-> {_wrap(f.right, _level(f.right) <= 1)}"
    if isinstance(f, ForAll):
        return f"forall {f.var.name}: {render_formula(f.body)}"
    if isinstance(f, Exists):
        return f"exists {f.var.name}: {render_formula(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


def _head(relation: str, logvars) -> str:
    return f"{relation}({','.join(render_term(v) for v in logvars)})"


def render_entry(entry) -> str:
    if isinstance(entry, Assessment):
        return f"prob {_head(entry.relation, entry.logvars)} = {entry.probability}."
    return f"def {_head(entry.relation, entry.logvars)} := {render_formula(entry.body)}."


def render_spec(spec: RelationalSpec) -> str:
    """One line per entry; declarations only for relations without an entry."""
    lines: List[str] = []
    with_entries = {e.relation for e in spec.entries}
    implied = {(e.relation, len(e.logvars)) for e in spec.entries}
    for r in sorted(spec.relations):
        if r.name not in with_entries or (r.name, r.arity) not in implied:
            lines.append(f"relation {r.name}/{r.arity}.")
    lines.extend(render_entry(e) for e in spec.entries)
    return "\n".join(lines) + "\n"


def render_literals(literals: Iterable) -> str:
    return ", ".join(f"{atom}={int(value)}" for atom, value in literals)


def render_query(query: Query) -> str:
    text = render_literals(query.query)
    if query.evidence:
        text += " | " + render_literals(query.evidence)
    if query.gamma is not None:
        text += f"; gamma={query.gamma}"
    return text


def render_network(net: GroundNetwork) -> str:
    """`.gbn`: `root atom p/q` or `def atom := ground-formula`, one node per line."""
    lines = []
    for atom, node in net.nodes.items():
        if isinstance(node, RootNode):
            lines.append(f"root {atom} {node.probability}")
        else:
            lines.append(f"def {atom} := {render_formula(node.body)}")
    return "\n".join(lines) + "\n"


def render_assignment(assignment: Dict[GroundAtom, bool]) -> str:
    return render_literals(sorted(assignment.items()))
