# ground.py
"""
Grounding of relational specifications over the domain 1..N.

Existential quantifiers become disjunctions and universal quantifiers
conjunctions, children ordered by individual. Ground equalities fold to
constants and constants are absorbed into And/Or; nothing else is
simplified.
"""
from __future__ import annotations

import itertools
import logging
from typing import Dict, List, Mapping, Optional

import networkx as nx

from .config import InferenceConfig, resolve
from .errors import ResourceGuardError, UnboundLogvarError, UnknownAtomError
from .model import (FALSE, TRUE, And, Assessment, Atom, Constant, DefinedNode, Eq, Exists, ForAll,
                    Formula, GroundAtom, GroundNetwork, Iff, Implies, Node, Not, Or, Query,
                    RelationalSpec, RootNode, Var, atoms)
from .Validator import validate_spec

logger = logging.getLogger(__name__)

Binding = Mapping[Var, int]


def _bind(term, binding: Binding):
    if isinstance(term, Var):
        if term not in binding:
            raise UnboundLogvarError(f"logvar {term.name} is not bound")
        return binding[term]
    return term


def _expand(f: Formula, binding: Binding, n: int) -> Formula:
    if isinstance(f, Constant):
        return f
    if isinstance(f, Atom):
        return Atom(f.relation, tuple(_bind(a, binding) for a in f.args))
    if isinstance(f, Eq):
        return TRUE if _bind(f.left, binding) == _bind(f.right, binding) else FALSE
    if isinstance(f, Not):
        return Not(_expand(f.body, binding, n))
    if isinstance(f, And):
        return And(tuple(_expand(p, binding, n) for p in f.parts))
    if isinstance(f, Or):
        return Or(tuple(_expand(p, binding, n) for p in f.parts))
    if isinstance(f, Implies):
        return Implies(_expand(f.left, binding, n), _expand(f.right, binding, n))
    if isinstance(f, Iff):
        return Iff(_expand(f.left, binding, n), _expand(f.right, binding, n))
    if isinstance(f, (ForAll, Exists)):
        parts = tuple(_expand(f.body, {**binding, f.var: i}, n) for i in range(1, n + 1))
        return And(parts) if isinstance(f, ForAll) else Or(parts)
    raise TypeError(f"not a formula: {f!r}")


def _negate(f: Formula) -> Formula:
    if isinstance(f, Constant):
        return FALSE if f.value else TRUE
    return Not(f)


def fold_constants(f: Formula, known: Optional[Mapping[GroundAtom, bool]] = None) -> Formula:
    """
    Absorb constants bottom-up, replacing ground atoms listed in `known` by
    their values first.
    """
    if isinstance(f, Atom):
        if known:
            value = known.get(f.ground_atom())
            if value is not None:
                return TRUE if value else FALSE
        return f
    if isinstance(f, (Constant, Eq)):
        return f
    if isinstance(f, Not):
        return _negate(fold_constants(f.body, known))
    if isinstance(f, (And, Or)):
        unit, zero = (TRUE, FALSE) if isinstance(f, And) else (FALSE, TRUE)
        parts = []
        for p in f.parts:
            p = fold_constants(p, known)
            if p == zero:
                return zero
            if p != unit:
                parts.append(p)
        if not parts:
            return unit
        if len(parts) == 1:
            return parts[0]
        return type(f)(tuple(parts))
    if isinstance(f, Implies):
        left, right = fold_constants(f.left, known), fold_constants(f.right, known)
        if left == FALSE or right == TRUE:
            return TRUE
        if left == TRUE:
            return right
        if right == FALSE:
            return _negate(left)
        return Implies(left, right)
    if isinstance(f, Iff):
        left, right = fold_constants(f.left, known), fold_constants(f.right, known)
        for a, b in ((left, right), (right, left)):
            if isinstance(a, Constant):
                return b if a.value else _negate(b)
        return Iff(left, right)
    raise TypeError(f"cannot fold {type(f).__name__}")


def ground_formula(body: Formula, binding: Binding, n: int, fold: bool = True) -> Formula:
    """
    Substitute the binding and expand quantifiers over 1..n.

    With fold=False only equalities are evaluated, which keeps the shape of
    the grounding (used to read off structural parents).
    """
    if n < 1:
        raise ValueError("domain size must be positive")
    expanded = _expand(body, binding, n)
    return fold_constants(expanded) if fold else expanded


def count_groundings(spec: RelationalSpec, n: int) -> int:
    return sum(n**r.arity for r in spec.relations)


def ground_spec(spec: RelationalSpec,
                n: int,
                config: Optional[InferenceConfig] = None) -> GroundNetwork:
    """One node per grounding of every relation, in entry order."""
    config = resolve(config)
    validate_spec(spec).raise_if_invalid()
    if n < 1:
        raise ValueError("domain size must be positive")
    total = count_groundings(spec, n)
    if total > config.node_cap:
        raise ResourceGuardError("ground nodes", total, config.node_cap)

    nodes: Dict[GroundAtom, Node] = {}
    for entry in spec.entries:
        for args in itertools.product(range(1, n + 1), repeat=len(entry.logvars)):
            atom = GroundAtom(entry.relation, args)
            if isinstance(entry, Assessment):
                nodes[atom] = RootNode(entry.probability)
                continue
            raw = ground_formula(entry.body, dict(zip(entry.logvars, args)), n, fold=False)
            parents = tuple(sorted({a.ground_atom() for a in atoms(raw)}))
            nodes[atom] = DefinedNode(fold_constants(raw), parents)

    logger.debug("grounded %d node(s) at N=%d", len(nodes), n)
    return GroundNetwork(n, nodes)


def relevant_subnetwork(net: GroundNetwork, query: Query) -> GroundNetwork:
    """Induced subnetwork on the ancestor closure of the atoms in Q and E."""
    targets = query.atoms()
    missing = [a for a in targets if a not in net]
    if missing:
        raise UnknownAtomError("not a node of the network: " + ", ".join(str(a) for a in missing))
    graph = net.graph()
    keep = set(targets)
    for atom in targets:
        keep |= nx.ancestors(graph, atom)
    logger.debug("relevant subnetwork keeps %d of %d node(s)", len(keep), len(net))
    return net.subnetwork(keep)
