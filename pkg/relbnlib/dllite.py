# dllite.py
"""
Positive-query inference and MPE for DL-Lite specifications in normal form.

Specifications are normalized first: each role r gets auxiliary concepts
e_r(x) := exists y: r(x,y) and e_r_inv(x) := exists y: r(y,x), and every
existential in a concept body is replaced by the matching auxiliary. A
positive assignment then propagates into demands on primitive concepts,
demands e_r(a) / e_r_inv(a) and forced role groundings. Primitives factor
independently; every role contributes

    alpha^|forced| * Z(G, alpha / (1 - alpha)) * (1 - alpha)^|E(G)|

where G is the class-B graph of its remaining row and column demands.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple, Union

from .config import InferenceConfig
from .edgecover import ClassBCounter, ClassBGraph, min_edge_cover_bipartite_complete, partition_function
from .errors import FragmentError, UnknownAtomError, ZeroEvidenceError
from .fragments import classify_fragment
from .ground import ground_spec
from .infer import InferenceStats, joint_probability
from .model import (And, Assessment, Atom, Definition, DefinedNode, Exists, Formula, GroundAtom, Not,
                    Query, Rational, RelationalSpec, Relation, Var, compile_formula)

logger = logging.getLogger(__name__)

ConceptLiteral = Tuple[str, bool]


@dataclass(frozen=True)
class NormalizedDlliteSpec:
    spec: RelationalSpec  # rewritten spec, auxiliary definitions appended
    roles: Mapping[str, Rational]
    primitives: Mapping[str, Rational]
    aux: Mapping[str, Tuple[str, bool]]  # e_r -> (r, False), e_r_inv -> (r, True)
    concepts: Mapping[str, Tuple[ConceptLiteral, ...]]  # defined concept -> body literals

    def aux_name(self, role: str, inverse: bool) -> str:
        for name, target in self.aux.items():
            if target == (role, inverse):
                return name
        raise KeyError(role)


def _fresh(base: str, taken: Set[str]) -> str:
    name, i = base, 1
    while name in taken:
        name = f"{base}_{i}"
        i += 1
    taken.add(name)
    return name


def _flatten(f: Formula) -> List[Formula]:
    if isinstance(f, And):
        return [q for p in f.parts for q in _flatten(p)]
    return [f]


def normalize(spec: RelationalSpec, config: Optional[InferenceConfig] = None) -> NormalizedDlliteSpec:
    label = classify_fragment(spec, config)
    if not label.is_dllite:
        raise FragmentError(f"spec is {label}, not DL-Lite in normal form")
    roles = {a.relation: a.probability for a in spec.assessments() if len(a.logvars) == 2}
    primitives = {a.relation: a.probability for a in spec.assessments() if len(a.logvars) == 1}
    taken = {r.name for r in spec.relations}
    aux: Dict[str, Tuple[str, bool]] = {}
    names: Dict[Tuple[str, bool], str] = {}
    for role in sorted(roles):
        for inverse in (False, True):
            name = _fresh(f"e_{role}_inv" if inverse else f"e_{role}", taken)
            aux[name] = (role, inverse)
            names[role, inverse] = name

    concepts: Dict[str, Tuple[ConceptLiteral, ...]] = {}
    entries = []
    for entry in spec.entries:
        if isinstance(entry, Assessment):
            entries.append(entry)
            continue
        v = entry.logvars[0]
        parts, literals = [], []
        for part in _flatten(entry.body):
            if isinstance(part, Exists):
                role_atom = part.body
                inverse = role_atom.args[0] != v
                part = Atom(names[role_atom.relation, inverse], (v, ))
            if isinstance(part, Not):
                literals.append((part.body.relation, False))
            else:
                literals.append((part.relation, True))
            parts.append(part)
        body = parts[0] if len(parts) == 1 else And(tuple(parts))
        entries.append(Definition(entry.relation, entry.logvars, body))
        concepts[entry.relation] = tuple(literals)

    x, y = Var("x"), Var("y")
    relations = set(spec.relations)
    for name, (role, inverse) in aux.items():
        args = (y, x) if inverse else (x, y)
        entries.append(Definition(name, (x, ), Exists(y, Atom(role, args))))
        relations.add(Relation(name, 1))
    logger.debug("normalized %d role(s), %d concept(s)", len(roles), len(concepts))
    return NormalizedDlliteSpec(RelationalSpec(frozenset(relations), tuple(entries)), roles,
                                primitives, aux, concepts)


def _normalized(spec: Union[RelationalSpec, NormalizedDlliteSpec],
                config: Optional[InferenceConfig]) -> NormalizedDlliteSpec:
    return spec if isinstance(spec, NormalizedDlliteSpec) else normalize(spec, config)


###### Role factors ######


@dataclass(frozen=True)
class RoleReductionInstance:
    role: str
    alpha: Rational
    domain_size: int
    demanded: FrozenSet[int] = frozenset()  # a with e_r(a) = 1
    demanded_inv: FrozenSet[int] = frozenset()  # a with e_r_inv(a) = 1
    forced: FrozenSet[Tuple[int, int]] = frozenset()  # r(a, b) = 1

    def open_rows(self) -> List[int]:
        covered = {a for a, _ in self.forced}
        return sorted(self.demanded - covered)

    def open_columns(self) -> List[int]:
        covered = {b for _, b in self.forced}
        return sorted(self.demanded_inv - covered)

    def class_b(self) -> ClassBGraph:
        """Demand graph: unforced rows and columns black, the other lines white."""
        m, n, size = len(self.open_rows()), len(self.open_columns()), self.domain_size
        return ClassBGraph(size - n, m, n, size - m)


def role_factor(instance: RoleReductionInstance, counter: Optional[ClassBCounter] = None) -> Rational:
    """P(every demand and forced grounding of one role holds)."""
    alpha = Fraction(instance.alpha)
    if instance.forced and alpha == 0:
        return Fraction(0)
    forced = alpha**len(instance.forced)
    g = instance.class_b()
    if alpha == 1:
        return forced
    if alpha == 0:
        return Fraction(1 if g.m == g.n == 0 else 0)
    if g.m == g.n == 0:
        return forced
    gamma = partition_function(g, alpha / (1 - alpha), counter=counter) * (1 - alpha)**g.edge_count
    logger.debug("role %s: class B %s, gamma %s", instance.role, g.layers, gamma)
    return forced * gamma


###### Demand propagation ######


@dataclass
class _Demands:
    primitives: Dict[GroundAtom, bool] = field(default_factory=dict)
    rows: Dict[str, Set[int]] = field(default_factory=dict)
    columns: Dict[str, Set[int]] = field(default_factory=dict)
    forced: Dict[str, Set[Tuple[int, int]]] = field(default_factory=dict)
    consistent: bool = True

    def instances(self, norm: NormalizedDlliteSpec, n: int) -> List[RoleReductionInstance]:
        return [
            RoleReductionInstance(role, alpha, n, frozenset(self.rows.get(role, ())),
                                  frozenset(self.columns.get(role, ())),
                                  frozenset(self.forced.get(role, ())))
            for role, alpha in sorted(norm.roles.items())
        ]


def _check_args(atom: GroundAtom, arity: int, n: int) -> None:
    if len(atom.args) != arity or any(not 1 <= a <= n for a in atom.args):
        raise UnknownAtomError(f"{atom} is not a grounding over 1..{n}")


def _propagate(norm: NormalizedDlliteSpec, n: int, literals: Iterable[Tuple[GroundAtom, bool]]) -> _Demands:
    demands = _Demands()
    stack = list(literals)
    expanded = set()
    while stack:
        atom, value = stack.pop()
        name = atom.relation
        if name in norm.primitives:
            _check_args(atom, 1, n)
            if demands.primitives.get(atom, value) != value:
                demands.consistent = False
            demands.primitives[atom] = value
        elif name in norm.roles:
            _check_args(atom, 2, n)
            if not value:
                raise FragmentError(f"negative role assignment {atom}=0")
            demands.forced.setdefault(name, set()).add(atom.args)
        elif name in norm.aux:
            _check_args(atom, 1, n)
            if not value:
                raise FragmentError(f"negative assignment {atom}=0 on an existential concept")
            role, inverse = norm.aux[name]
            side = demands.columns if inverse else demands.rows
            side.setdefault(role, set()).add(atom.args[0])
        elif name in norm.concepts:
            _check_args(atom, 1, n)
            if not value:
                raise FragmentError(f"negative assignment {atom}=0 on a defined concept")
            if atom in expanded:
                continue
            expanded.add(atom)
            stack.extend((GroundAtom(child, atom.args), positive) for child, positive in norm.concepts[name])
        else:
            raise UnknownAtomError(f"{atom} is not a node of the network")
    return demands


def _probability(norm: NormalizedDlliteSpec, n: int, literals: Mapping[GroundAtom, bool],
                 stats: InferenceStats) -> Rational:
    demands = _propagate(norm, n, literals.items())
    if not demands.consistent:
        return Fraction(0)
    result = Fraction(1)
    for atom, value in demands.primitives.items():
        p = norm.primitives[atom.relation]
        result *= p if value else 1 - p
    for instance in demands.instances(norm, n):
        if result == 0:
            break
        counter = ClassBCounter()
        result *= role_factor(instance, counter)
        stats.calls += counter.calls
    return result


def infer_positive(spec: Union[RelationalSpec, NormalizedDlliteSpec],
                   n: int,
                   query: Query,
                   config: Optional[InferenceConfig] = None,
                   stats: Optional[InferenceStats] = None) -> Rational:
    """
    P(Q|E) for positive assignments on concepts, auxiliary concepts and roles;
    primitive concepts may be assigned either value.
    """
    if n < 1:
        raise ValueError("domain size must be positive")
    stats = stats if stats is not None else InferenceStats()
    norm = _normalized(spec, config)
    joint = _probability(norm, n, query.literals(), stats)
    if not query.evidence:
        return joint
    evidence = _probability(norm, n, query.evidence_literals(), stats)
    if evidence == 0:
        raise ZeroEvidenceError("P(E) = 0")
    return joint / evidence


def infer_positive_applies(spec: RelationalSpec, n: int, query: Query) -> bool:
    try:
        norm = normalize(spec)
        _propagate(norm, n, query.literals().items())
    except (FragmentError, UnknownAtomError):
        return False
    return True


###### Most probable explanation ######


@dataclass(frozen=True)
class MpeResult:
    assignment: Mapping[GroundAtom, bool]
    probability: Rational
    consistent: bool = True


def _role_cells(instance: RoleReductionInstance) -> Set[Tuple[int, int]]:
    alpha, n = instance.alpha, instance.domain_size
    if alpha >= Fraction(1, 2):
        return {(a, b) for a in range(1, n + 1) for b in range(1, n + 1)}
    cells = set(instance.forced)
    rows, columns = instance.open_rows(), instance.open_columns()
    if rows and columns:
        cover = min_edge_cover_bipartite_complete(len(rows), len(columns))
        cells |= {(rows[i - 1], columns[j - 1]) for i, j in cover}
    else:
        cells |= {(a, 1) for a in rows}
        cells |= {(1, b) for b in columns}
    return cells


def mpe(spec: Union[RelationalSpec, NormalizedDlliteSpec],
        n: int,
        evidence: Mapping[GroundAtom, bool],
        config: Optional[InferenceConfig] = None) -> MpeResult:
    """
    Most probable full assignment consistent with positive evidence.

    Roles with P >= 1/2 are set true everywhere; the others get their forced
    groundings plus a minimum edge cover of the remaining demands. Atoms of
    the auxiliary concepts are part of the assignment.
    """
    norm = _normalized(spec, config)
    demands = _propagate(norm, n, dict(evidence).items())
    net = ground_spec(norm.spec, n, config)

    values: Dict[GroundAtom, bool] = {}
    for name, p in norm.primitives.items():
        for a in range(1, n + 1):
            atom = GroundAtom(name, (a, ))
            values[atom] = demands.primitives.get(atom, p >= Fraction(1, 2))
    for instance in demands.instances(norm, n):
        cells = _role_cells(instance)
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                values[GroundAtom(instance.role, (a, b))] = (a, b) in cells
    for atom in net.topological_order():
        node = net.nodes[atom]
        if isinstance(node, DefinedNode):
            values[atom] = compile_formula(node.body)(values)

    consistent = demands.consistent and all(values[a] == v for a, v in evidence.items())
    probability = joint_probability(net, values) if consistent else Fraction(0)
    if probability == 0:
        consistent = False
    logger.debug("mpe over %d node(s): %s", len(net), probability)
    return MpeResult(values, probability, consistent)
