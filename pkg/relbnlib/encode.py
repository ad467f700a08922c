# encode.py
"""
Encoders into relational specifications: conditional probability tables,
Noisy-Or gates, plate models and PRMs with skeletons.

Fresh relations are named deterministically (Z_<bits>, W_<parent>, A_k)
and never reuse a name already present.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple

import networkx as nx
from lark import Transformer

from .errors import CyclicGroundingError, EncodeError, FragmentError
from .model import (FALSE, And, Assessment, Atom, Definition, Exists, ForAll, Formula, GroundAtom,
                    Implies, Not, Or, Rational, RelationalSpec, Relation, Var)
from .Parser import PLATE_GRAMMAR, PRM_GRAMMAR, SKELETON_GRAMMAR, _Common, parse_with

logger = logging.getLogger(__name__)

GUARD_PROBABILITY = Fraction(1, 2)


def _fresh(base: str, taken: Set[str]) -> str:
    name, i = base, 1
    while name in taken:
        name = f"{base}_{i}"
        i += 1
    taken.add(name)
    return name


def _numbered(prefix: str, taken: Set[str]) -> Callable[[], str]:
    """Supplier of prefix1, prefix2, ... skipping names in use."""
    counter = itertools.count(1)

    def next_name() -> str:
        name = f"{prefix}{next(counter)}"
        while name in taken:
            name = f"{prefix}{next(counter)}"
        taken.add(name)
        return name

    return next_name


def _configurations(k: int) -> List[Tuple[bool, ...]]:
    """Parent configurations in binary order, first parent most significant."""
    return list(itertools.product((False, True), repeat=k))


def _cpt_body(parents: Sequence[Formula], aux: Sequence[Formula]) -> Formula:
    """Or over configurations of (parent literals & aux atom)."""
    terms = []
    for config, z in zip(_configurations(len(parents)), aux):
        literals = [p if value else Not(p) for p, value in zip(parents, config)]
        terms.append(And(tuple(literals) + (z, )))
    return Or(tuple(terms))


###### CPTs and Noisy-Or ######


@dataclass(frozen=True)
class Cpt:
    child: str
    parents: Tuple[str, ...]
    table: Mapping[Tuple[bool, ...], Rational]

    @classmethod
    def from_list(cls, child: str, parents: Sequence[str], probabilities: Sequence) -> "Cpt":
        """probabilities in binary order of the parent configuration."""
        configs = _configurations(len(parents))
        if len(probabilities) != len(configs):
            raise EncodeError(f"{child}: {len(configs)} probabilities needed, got {len(probabilities)}")
        return cls(child, tuple(parents), dict(zip(configs, (Fraction(p) for p in probabilities))))

    def probability(self, config: Tuple[bool, ...]) -> Rational:
        return self.table[config]

    def probabilities(self) -> List[Rational]:
        return [self.table[c] for c in _configurations(len(self.parents))]


def cpt_to_axioms(cpt: Cpt) -> RelationalSpec:
    """
    Propositional CPT as one fresh root Z_<bits> per parent configuration
    and a definition axiom for the child. The parents stay declared without
    entries; combine with their own specs.
    """
    configs = _configurations(len(cpt.parents))
    missing = [c for c in configs if c not in cpt.table]
    if missing:
        raise EncodeError(f"{cpt.child}: table lacks {len(missing)} configuration(s)")
    relations = {Relation(cpt.child, 0)} | {Relation(p, 0) for p in cpt.parents}
    if not cpt.parents:
        return RelationalSpec(frozenset(relations), (Assessment(cpt.child, (), cpt.table[()]), ))

    taken = {r.name for r in relations}
    entries = []
    aux = []
    for config in configs:
        bits = "".join("1" if v else "0" for v in config)
        name = _fresh(f"Z_{bits}", taken)
        relations.add(Relation(name, 0))
        entries.append(Assessment(name, (), cpt.table[config]))
        aux.append(Atom(name, ()))
    body = _cpt_body([Atom(p, ()) for p in cpt.parents], aux)
    entries.append(Definition(cpt.child, (), body))
    return RelationalSpec(frozenset(relations), tuple(entries))


def noisy_or(child: str, parents: Sequence[str], inhibitor_probs: Sequence) -> RelationalSpec:
    """child := (Y1 & W_Y1) | ... with P(W_Yi = 1) = p_i."""
    if len(parents) != len(inhibitor_probs):
        raise EncodeError(f"{len(parents)} parent(s) but {len(inhibitor_probs)} probabilities")
    relations = {Relation(child, 0)} | {Relation(p, 0) for p in parents}
    taken = {r.name for r in relations}
    entries = []
    terms = []
    for parent, p in zip(parents, inhibitor_probs):
        name = _fresh(f"W_{parent}", taken)
        relations.add(Relation(name, 0))
        entries.append(Assessment(name, (), Fraction(p)))
        terms.append(And((Atom(parent, ()), Atom(name, ()))))
    body = Or(tuple(terms)) if terms else FALSE
    entries.append(Definition(child, (), body))
    return RelationalSpec(frozenset(relations), tuple(entries))


###### Plate models ######


@dataclass(frozen=True)
class PlateVariable:
    name: str
    logvars: Tuple[str, ...]
    parents: Tuple[str, ...] = ()
    probabilities: Tuple[Rational, ...] = ()


@dataclass(frozen=True)
class PlateModel:
    variables: Tuple[PlateVariable, ...]

    def variable(self, name: str) -> PlateVariable:
        for v in self.variables:
            if v.name == name:
                return v
        raise EncodeError(f"unknown parvariable {name}")

    def is_extended(self) -> bool:
        """True when some parent has a logvar outside its child's plate."""
        return any(not set(self.variable(p).logvars) <= set(v.logvars) for v in self.variables
                   for p in v.parents)


def plate_to_spec(model: PlateModel) -> RelationalSpec:
    """
    QF spec with auxiliary roots A_k over the child's logvars. Parent
    logvars outside the child's plate are existentially quantified inside
    the parent literal.
    """
    names = [v.name for v in model.variables]
    if len(set(names)) != len(names):
        raise EncodeError("parvariable declared twice")
    taken = set(names)
    relations = {Relation(v.name, len(v.logvars)) for v in model.variables}
    entries = []
    aux_name = _numbered("A_", taken)
    for v in model.variables:
        logvars = tuple(Var(x) for x in v.logvars)
        expected = 2**len(v.parents)
        if len(v.probabilities) != expected:
            raise EncodeError(f"{v.name}: {expected} probabilities needed, got {len(v.probabilities)}")
        if not v.parents:
            entries.append(Assessment(v.name, logvars, v.probabilities[0]))
            continue
        parent_literals = []
        for p in v.parents:
            parent = model.variable(p)
            literal: Formula = Atom(p, tuple(Var(x) for x in parent.logvars))
            for foreign in reversed([x for x in parent.logvars if x not in v.logvars]):
                literal = Exists(Var(foreign), literal)
            parent_literals.append(literal)
        aux = []
        for probability in v.probabilities:
            name = aux_name()
            relations.add(Relation(name, len(logvars)))
            entries.append(Assessment(name, logvars, probability))
            aux.append(Atom(name, logvars))
        entries.append(Definition(v.name, logvars, _cpt_body(parent_literals, aux)))
    if model.is_extended():
        logger.debug("extended plate: foreign parent logvars quantified existentially")
    return RelationalSpec(frozenset(relations), tuple(entries))


###### PRMs ######


@dataclass(frozen=True)
class PrmParent:
    attribute: str
    via: Optional[str] = None


@dataclass(frozen=True)
class PrmAttribute:
    name: str
    owner: str
    parents: Tuple[PrmParent, ...] = ()
    probabilities: Tuple[Rational, ...] = ()


@dataclass(frozen=True)
class Prm:
    classes: Tuple[str, ...]
    associations: Mapping[str, Tuple[str, str]]
    attributes: Tuple[PrmAttribute, ...]

    def attribute(self, name: str) -> PrmAttribute:
        for a in self.attributes:
            if a.name == name:
                return a
        raise EncodeError(f"unknown attribute {name}")

    def guards(self) -> List[Relation]:
        return ([Relation(c, 1) for c in self.classes] +
                [Relation(a, 2) for a in self.associations])


@dataclass(frozen=True)
class Skeleton:
    facts: FrozenSet[GroundAtom] = frozenset()

    def domain_size(self) -> int:
        return max((a for f in self.facts for a in f.args), default=1)


@dataclass(frozen=True)
class PrmEncoding:
    spec: RelationalSpec
    evidence: Mapping[GroundAtom, bool]  # every guard grounding over 1..domain_size
    domain_size: int


def _check_prm(prm: Prm) -> None:
    classes = set(prm.classes)
    for name, (left, right) in prm.associations.items():
        if left not in classes or right not in classes:
            raise EncodeError(f"association {name} links undeclared classes")
    guard_names = {g.name for g in prm.guards()}
    for a in prm.attributes:
        if a.name in guard_names:
            raise EncodeError(f"attribute {a.name} reuses a guard name")
        if a.owner not in classes:
            raise EncodeError(f"attribute {a.name} belongs to undeclared class {a.owner}")
        if len(a.probabilities) != 2**len(a.parents):
            raise EncodeError(f"{a.name}: {2**len(a.parents)} probabilities needed")
        for p in a.parents:
            owner = prm.attribute(p.attribute).owner
            if p.via is None:
                if owner != a.owner:
                    raise EncodeError(f"{a.name}: parent {p.attribute} of class {owner} needs `via`")
                continue
            if p.via not in prm.associations:
                raise EncodeError(f"{a.name}: unknown association {p.via}")
            if set(prm.associations[p.via]) != {owner, a.owner}:
                raise EncodeError(f"{a.name}: {p.via} does not link {owner} and {a.owner}")


def _check_skeleton(prm: Prm, skeleton: Skeleton) -> None:
    arity = {g.name: g.arity for g in prm.guards()}
    for fact in skeleton.facts:
        if arity.get(fact.relation) != len(fact.args):
            raise EncodeError(f"skeleton fact {fact} is not a guard grounding")
        if any(a < 1 for a in fact.args):
            raise EncodeError(f"skeleton fact {fact}: individuals are numbered from 1")
        if fact.relation in prm.associations:
            for cls, obj in zip(prm.associations[fact.relation], fact.args):
                if GroundAtom(cls, (obj, )) not in skeleton.facts:
                    raise EncodeError(f"skeleton fact {fact} needs {cls}({obj})")


def _linked(prm: Prm, skeleton: Skeleton, parent: PrmParent, child_class: str, obj: int) -> List[int]:
    if parent.via is None:
        return [obj]
    left, right = prm.associations[parent.via]
    found = []
    for fact in skeleton.facts:
        if fact.relation != parent.via:
            continue
        if right == child_class and fact.args[1] == obj:
            found.append(fact.args[0])
        elif left == child_class and fact.args[0] == obj:
            found.append(fact.args[1])
    return sorted(found)


def _check_acyclic(prm: Prm, skeleton: Skeleton) -> None:
    graph = nx.DiGraph()
    graph.add_nodes_from(a.name for a in prm.attributes)
    for a in prm.attributes:
        graph.add_edges_from((p.attribute, a.name) for p in a.parents)
    if nx.is_directed_acyclic_graph(graph):
        return
    ground = nx.DiGraph()
    for a in prm.attributes:
        for fact in skeleton.facts:
            if fact.relation != a.owner:
                continue
            for p in a.parents:
                for other in _linked(prm, skeleton, p, a.owner, fact.args[0]):
                    ground.add_edge((p.attribute, other), (a.name, fact.args[0]))
    if not nx.is_directed_acyclic_graph(ground):
        cycle = nx.find_cycle(ground)
        raise CyclicGroundingError("skeleton grounds a cycle through " +
                                   ", ".join(f"{u[0]}({u[1]})" for u, _ in cycle))
    raise FragmentError("attribute graph is cyclic; only skeleton-independent acyclicity is supported")


_LOGVAR_POOL = ("x", "y", "u", "v", "w")


def _attribute_entries(prm: Prm, a: PrmAttribute, aux_names: Callable[[], str],
                       relations: Set[Relation]) -> List:
    z = Var("z")
    if not a.parents:
        return [Assessment(a.name, (z, ), a.probabilities[0])]
    foreign: List[Var] = []
    class_guards: List[Formula] = []
    assoc_guards: List[Formula] = []
    parent_atoms: List[Formula] = []
    for p in a.parents:
        if p.via is None:
            parent_atoms.append(Atom(p.attribute, (z, )))
            continue
        index = len(foreign)
        x = Var(_LOGVAR_POOL[index] if index < len(_LOGVAR_POOL) else f"x{index}")
        foreign.append(x)
        _, right = prm.associations[p.via]
        class_guards.append(Atom(prm.attribute(p.attribute).owner, (x, )))
        assoc_guards.append(Atom(p.via, (x, z) if right == a.owner else (z, x)))
        parent_atoms.append(Atom(p.attribute, (x, )))

    aux_args = (z, ) + tuple(foreign)
    entries = []
    aux = []
    for probability in a.probabilities:
        name = aux_names()
        relations.add(Relation(name, len(aux_args)))
        entries.append(Assessment(name, aux_args, probability))
        aux.append(Atom(name, aux_args))
    body = _cpt_body(parent_atoms, aux)
    if foreign:
        body = Implies(And(tuple(class_guards + assoc_guards)), body)
        for x in reversed(foreign):
            body = ForAll(x, body)
    entries.append(Definition(a.name, (z, ), body))
    return entries


def prm_to_spec(prm: Prm, skeleton: Skeleton) -> PrmEncoding:
    """
    Guarded spec plus closed-world skeleton evidence over 1..N, N the
    largest object id. Guards are roots assessed at 1/2; inference
    conditions on the evidence.
    """
    _check_prm(prm)
    _check_skeleton(prm, skeleton)
    _check_acyclic(prm, skeleton)

    relations = set(prm.guards()) | {Relation(a.name, 1) for a in prm.attributes}
    aux_name = _numbered("A_", {r.name for r in relations})
    entries = [Assessment(g.name, tuple(Var(x) for x in ("x", "y")[:g.arity]), GUARD_PROBABILITY)
               for g in prm.guards()]
    for a in prm.attributes:
        entries.extend(_attribute_entries(prm, a, aux_name, relations))

    n = skeleton.domain_size()
    evidence: Dict[GroundAtom, bool] = {}
    for g in prm.guards():
        for args in itertools.product(range(1, n + 1), repeat=g.arity):
            atom = GroundAtom(g.name, args)
            evidence[atom] = atom in skeleton.facts
    logger.debug("PRM encoded over %d object(s), %d guard literal(s)", n, len(evidence))
    return PrmEncoding(RelationalSpec(frozenset(relations), tuple(entries)), evidence, n)


###### Text formats ######


class PlateTransformer(_Common):

    def start(self, variables):
        return PlateModel(tuple(variables))

    def names(self, children):
        return ("names", tuple(str(c) for c in children))

    def parents(self, children):
        return ("parents", tuple(str(c) for c in children))

    def pvar(self, children):
        name = str(children[0])
        logvars, parents, probabilities = (), (), []
        for c in children[1:]:
            if isinstance(c, tuple) and c[0] == "names":
                logvars = c[1]
            elif isinstance(c, tuple):
                parents = c[1]
            else:
                probabilities.append(c)
        return PlateVariable(name, logvars, parents, tuple(probabilities))


class PrmTransformer(_Common):

    def start(self, items):
        classes = tuple(i[1] for i in items if i[0] == "class")
        associations = {i[1]: (i[2], i[3]) for i in items if i[0] == "assoc"}
        attributes = tuple(i[1] for i in items if i[0] == "attr")
        return Prm(classes, associations, attributes)

    def class_decl(self, children):
        return ("class", str(children[0]))

    def assoc_decl(self, children):
        return ("assoc", ) + tuple(str(c) for c in children)

    def prm_parents(self, children):
        return tuple(children)

    def prm_parent(self, children):
        return PrmParent(str(children[0]), str(children[1]) if len(children) > 1 else None)

    def attr_decl(self, children):
        name, owner = str(children[0]), str(children[1])
        parents = next((c for c in children[2:] if isinstance(c, tuple)), ())
        probabilities = tuple(c for c in children[2:] if isinstance(c, Fraction))
        return ("attr", PrmAttribute(name, owner, parents, probabilities))


class SkeletonTransformer(_Common):

    def start(self, facts):
        return Skeleton(frozenset(facts))

    def fact(self, children):
        return GroundAtom(str(children[0]), tuple(int(c) for c in children[1:]))


def parse_plate(text: str) -> PlateModel:
    return parse_with(PLATE_GRAMMAR, PlateTransformer(), text)


def parse_prm(text: str) -> Prm:
    return parse_with(PRM_GRAMMAR, PrmTransformer(), text)


def parse_skeleton(text: str) -> Skeleton:
    return parse_with(SKELETON_GRAMMAR, SkeletonTransformer(), text)
