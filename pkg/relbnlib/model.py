# model.py
"""
Core value types: formulas, relational specifications, ground networks and queries.

Everything here is immutable after construction. Individuals are the integers
1..N; logvars are `Var` instances. Probabilities are exact `Fraction`s.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import (Callable, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Set,
                    Tuple, Union)

import networkx as nx

from .errors import QueryConflictError, SpecSyntaxError

Rational = Fraction


def parse_rational(text: str) -> Rational:
    """Exact value of "p/q", an integer, or a decimal such as "0.2" (== 1/5)."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise SpecSyntaxError(f"bad rational {text!r}: {e}")


@dataclass(frozen=True, order=True)
class Relation:
    name: str
    arity: int


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Var, int]


###### Formulas ######


@dataclass(frozen=True)
class Constant:
    value: bool


TRUE = Constant(True)
FALSE = Constant(False)


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Atom:
    relation: str
    args: Tuple[Term, ...] = ()

    def is_ground(self) -> bool:
        return all(isinstance(a, int) for a in self.args)

    def ground_atom(self) -> "GroundAtom":
        if not self.is_ground():
            raise ValueError(f"atom {self.relation} has logvar arguments")
        return GroundAtom(self.relation, tuple(self.args))


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    parts: Tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    parts: Tuple["Formula", ...]


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ForAll:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"


Formula = Union[Constant, Eq, Atom, Not, And, Or, Implies, Iff, ForAll, Exists]
Quantifier = (ForAll, Exists)


def children(f: Formula) -> Tuple[Formula, ...]:
    if isinstance(f, (And, Or)):
        return f.parts
    if isinstance(f, (Implies, Iff)):
        return (f.left, f.right)
    if isinstance(f, (Not, ForAll, Exists)):
        return (f.body, )
    return ()


def walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def atoms(f: Formula) -> Iterator[Atom]:
    return (node for node in walk(f) if isinstance(node, Atom))


def relations_in(f: Formula) -> Set[str]:
    return {a.relation for a in atoms(f)}


def has_quantifier(f: Formula) -> bool:
    return any(isinstance(node, Quantifier) for node in walk(f))


def logvar_symbols(f: Formula) -> Set[Var]:
    """Every logvar mentioned, free or bound."""
    found: Set[Var] = set()
    for node in walk(f):
        if isinstance(node, Quantifier):
            found.add(node.var)
        elif isinstance(node, Atom):
            found.update(a for a in node.args if isinstance(a, Var))
        elif isinstance(node, Eq):
            found.update(t for t in (node.left, node.right) if isinstance(t, Var))
    return found


def free_logvars(f: Formula, bound: FrozenSet[Var] = frozenset()) -> Set[Var]:
    if isinstance(f, Atom):
        return {a for a in f.args if isinstance(a, Var) and a not in bound}
    if isinstance(f, Eq):
        return {t for t in (f.left, f.right) if isinstance(t, Var) and t not in bound}
    if isinstance(f, Quantifier):
        return free_logvars(f.body, bound | {f.var})
    result: Set[Var] = set()
    for child in children(f):
        result |= free_logvars(child, bound)
    return result


def formula_size(f: Formula) -> int:
    return sum(1 for _ in walk(f))


###### Specifications ######


@dataclass(frozen=True)
class Definition:
    """Definition axiom: relation(logvars) is equivalent to body."""
    relation: str
    logvars: Tuple[Var, ...]
    body: Formula


@dataclass(frozen=True)
class Assessment:
    """P(relation(logvars) = 1) = probability, shared by all groundings."""
    relation: str
    logvars: Tuple[Var, ...]
    probability: Rational


Entry = Union[Definition, Assessment]


@dataclass(frozen=True)
class RelationalSpec:
    relations: FrozenSet[Relation]
    entries: Tuple[Entry, ...]

    def relation(self, name: str) -> Optional[Relation]:
        for r in self.relations:
            if r.name == name:
                return r
        return None

    def arity(self, name: str) -> int:
        r = self.relation(name)
        if r is None:
            raise KeyError(name)
        return r.arity

    def relation_names(self) -> List[str]:
        return sorted({r.name for r in self.relations})

    def entry_for(self, name: str) -> Optional[Entry]:
        for entry in self.entries:
            if entry.relation == name:
                return entry
        return None

    def definitions(self) -> List[Definition]:
        return [e for e in self.entries if isinstance(e, Definition)]

    def assessments(self) -> List[Assessment]:
        return [e for e in self.entries if isinstance(e, Assessment)]

    def is_assessed(self, name: str) -> bool:
        return isinstance(self.entry_for(name), Assessment)


def combine_specs(*specs: RelationalSpec) -> RelationalSpec:
    """Union of relations, concatenation of entries (in argument order)."""
    relations: Set[Relation] = set()
    entries: List[Entry] = []
    for spec in specs:
        relations |= spec.relations
        entries.extend(spec.entries)
    return RelationalSpec(frozenset(relations), tuple(entries))


###### Ground networks ######


@dataclass(frozen=True, order=True)
class GroundAtom:
    relation: str
    args: Tuple[int, ...] = ()

    def __str__(self) -> str:
        return f"{self.relation}({','.join(str(a) for a in self.args)})"

    def as_atom(self) -> Atom:
        return Atom(self.relation, self.args)


@dataclass(frozen=True)
class RootNode:
    probability: Rational


@dataclass(frozen=True)
class DefinedNode:
    body: Formula
    parents: Tuple[GroundAtom, ...]


Node = Union[RootNode, DefinedNode]


@dataclass(frozen=True, eq=True)
class GroundNetwork:
    domain_size: int
    nodes: Mapping[GroundAtom, Node] = field(default_factory=dict)

    def __contains__(self, atom: GroundAtom) -> bool:
        return atom in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def roots(self) -> List[GroundAtom]:
        return [a for a, n in self.nodes.items() if isinstance(n, RootNode)]

    def defined(self) -> List[GroundAtom]:
        return [a for a, n in self.nodes.items() if isinstance(n, DefinedNode)]

    def parents(self, atom: GroundAtom) -> Tuple[GroundAtom, ...]:
        node = self.nodes[atom]
        return node.parents if isinstance(node, DefinedNode) else ()

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.nodes)
        for atom, node in self.nodes.items():
            if isinstance(node, DefinedNode):
                g.add_edges_from((p, atom) for p in node.parents)
        return g

    def topological_order(self) -> List[GroundAtom]:
        return list(nx.lexicographical_topological_sort(self.graph()))

    def subnetwork(self, keep: Iterable[GroundAtom]) -> "GroundNetwork":
        keep = set(keep)
        return GroundNetwork(self.domain_size, {a: n for a, n in self.nodes.items() if a in keep})


###### Queries ######

Literal = Tuple[GroundAtom, bool]


def merge_literals(*groups: Iterable[Literal]) -> Dict[GroundAtom, bool]:
    """Merge assignments, rejecting an atom given both values."""
    merged: Dict[GroundAtom, bool] = {}
    for group in groups:
        for atom, value in group:
            if merged.get(atom, value) != value:
                raise QueryConflictError(f"{atom} assigned both 0 and 1")
            merged[atom] = value
    return merged


@dataclass(frozen=True)
class Query:
    query: Tuple[Literal, ...] = ()
    evidence: Tuple[Literal, ...] = ()
    gamma: Optional[Rational] = None

    @classmethod
    def build(cls,
              query: Iterable[Literal] = (),
              evidence: Iterable[Literal] = (),
              gamma: Optional[Rational] = None) -> "Query":
        q = merge_literals(query)
        e = merge_literals(evidence)
        merge_literals(q.items(), e.items())
        return cls(tuple(q.items()), tuple(e.items()), gamma)

    def literals(self) -> Dict[GroundAtom, bool]:
        return merge_literals(self.query, self.evidence)

    def evidence_literals(self) -> Dict[GroundAtom, bool]:
        return dict(self.evidence)

    def atoms(self) -> List[GroundAtom]:
        return list(self.literals())


###### Fragment labels ######


class FragmentKind(Enum):
    PROP_AND = "PropAnd"
    PROP_OR = "PropOr"
    PROP_AND_NOT = "PropAndNot"
    DLLITE_NF = "DLLiteNF"
    DLLITE_NF_NEG = "DLLiteNFWithPrimitiveNegation"
    EL = "EL"
    ALC = "ALC"
    QF = "QF"
    FFFO_K = "FFFOk"
    FFFO = "FFFO"


@dataclass(frozen=True)
class FragmentLabel:
    kind: FragmentKind
    k: Optional[int] = None

    def __str__(self) -> str:
        if self.kind is FragmentKind.FFFO_K:
            return f"FFFOk({self.k})"
        return self.kind.value

    @property
    def is_dllite(self) -> bool:
        return self.kind in (FragmentKind.DLLITE_NF, FragmentKind.DLLITE_NF_NEG)


###### Semantics ######


def _term_value(t: Term, binding: Mapping[Var, int]) -> int:
    if isinstance(t, Var):
        if t not in binding:
            raise KeyError(f"unbound logvar {t.name}")
        return binding[t]
    return t


def evaluate(f: Formula,
             values: Mapping[GroundAtom, bool],
             binding: Optional[Mapping[Var, int]] = None,
             domain_size: int = 0) -> bool:
    """
    Truth value of f under an interpretation of ground atoms.

    Quantifiers range over 1..domain_size, so this is the reference semantics
    that grounding must preserve.
    """
    binding = binding or {}
    if isinstance(f, Constant):
        return f.value
    if isinstance(f, Atom):
        return values[GroundAtom(f.relation, tuple(_term_value(a, binding) for a in f.args))]
    if isinstance(f, Eq):
        return _term_value(f.left, binding) == _term_value(f.right, binding)
    if isinstance(f, Not):
        return not evaluate(f.body, values, binding, domain_size)
    if isinstance(f, And):
        return all(evaluate(p, values, binding, domain_size) for p in f.parts)
    if isinstance(f, Or):
        return any(evaluate(p, values, binding, domain_size) for p in f.parts)
    if isinstance(f, Implies):
        return (not evaluate(f.left, values, binding, domain_size)) or evaluate(
            f.right, values, binding, domain_size)
    if isinstance(f, Iff):
        return evaluate(f.left, values, binding, domain_size) == evaluate(
            f.right, values, binding, domain_size)
    if isinstance(f, ForAll):
        return all(
            evaluate(f.body, values, {
                **binding, f.var: i
            }, domain_size) for i in range(1, domain_size + 1))
    if isinstance(f, Exists):
        return any(
            evaluate(f.body, values, {
                **binding, f.var: i
            }, domain_size) for i in range(1, domain_size + 1))
    raise TypeError(f"not a formula: {f!r}")


Evaluator = Callable[[Mapping[GroundAtom, bool]], bool]


def compile_formula(f: Formula) -> Evaluator:
    """Closure evaluating a ground, quantifier-free formula."""
    if isinstance(f, Constant):
        value = f.value
        return lambda v: value
    if isinstance(f, Atom):
        key = f.ground_atom()
        return lambda v: v[key]
    if isinstance(f, Eq):
        same = f.left == f.right
        return lambda v: same
    if isinstance(f, Not):
        inner = compile_formula(f.body)
        return lambda v: not inner(v)
    if isinstance(f, And):
        parts = [compile_formula(p) for p in f.parts]
        return lambda v: all(p(v) for p in parts)
    if isinstance(f, Or):
        parts = [compile_formula(p) for p in f.parts]
        return lambda v: any(p(v) for p in parts)
    if isinstance(f, Implies):
        left, right = compile_formula(f.left), compile_formula(f.right)
        return lambda v: (not left(v)) or right(v)
    if isinstance(f, Iff):
        left, right = compile_formula(f.left), compile_formula(f.right)
        return lambda v: left(v) == right(v)
    raise TypeError(f"cannot compile {type(f).__name__}: ground formulas have no quantifiers")
