# infer.py
"""
Exact inference over ground networks.

All arithmetic is on Fractions. The general path enumerates root
assignments; the positive path multiplies root probabilities forced by an
upward closure over conjunctive (or, dually, disjunctive) bodies.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple, Union

from .config import InferenceConfig, resolve
from .errors import (FragmentError, ParameterError, PartialAssignmentError, ResourceGuardError,
                     UnknownAtomError, ZeroEvidenceError)
from .ground import fold_constants, ground_spec, relevant_subnetwork
from .model import (FALSE, TRUE, And, Atom, Constant, DefinedNode, Formula, GroundAtom,
                    GroundNetwork, Not, Or, Query, Rational, RelationalSpec, RootNode, atoms,
                    compile_formula, evaluate)

logger = logging.getLogger(__name__)


@dataclass
class InferenceStats:
    """Work counters filled in by the inference routines."""
    calls: int = 0  # closure visits or recursion calls
    enumerated: int = 0  # root assignments summed
    free_roots: int = 0  # largest enumeration width seen


def _weight(p: Rational, value: bool) -> Rational:
    return p if value else 1 - p


def joint_probability(net: GroundNetwork, assignment: Mapping[GroundAtom, bool]) -> Rational:
    """Product of root factors, times 0 if a defined node disagrees with its body."""
    missing = [a for a in net.nodes if a not in assignment]
    if missing:
        raise PartialAssignmentError(f"{len(missing)} node(s) unassigned, e.g. {missing[0]}")
    result = Fraction(1)
    for atom, node in net.nodes.items():
        if isinstance(node, RootNode):
            result *= _weight(node.probability, assignment[atom])
        elif evaluate(node.body, assignment) != assignment[atom]:
            return Fraction(0)
    return result


def _check_atoms(net: GroundNetwork, literals: Mapping[GroundAtom, bool]) -> None:
    missing = [a for a in literals if a not in net]
    if missing:
        raise UnknownAtomError("not a node of the network: " + ", ".join(str(a) for a in missing))


def _check_cap(count: int, config: InferenceConfig) -> None:
    if count > config.root_cap:
        raise ResourceGuardError("enumerated roots", count, config.root_cap)


def _enumerate_plain(net: GroundNetwork, literals: Mapping[GroundAtom, bool],
                     config: InferenceConfig, stats: InferenceStats) -> Rational:
    roots = net.roots()
    _check_cap(len(roots), config)
    order = [a for a in net.topological_order() if isinstance(net.nodes[a], DefinedNode)]
    evaluators = [(a, compile_formula(net.nodes[a].body)) for a in order]
    total = Fraction(0)
    for bits in itertools.product((False, True), repeat=len(roots)):
        values = dict(zip(roots, bits))
        if any(values[a] != v for a, v in literals.items() if a in values):
            continue
        for atom, fn in evaluators:
            values[atom] = fn(values)
        if all(values[a] == v for a, v in literals.items()):
            weight = Fraction(1)
            for r, b in zip(roots, bits):
                weight *= _weight(net.nodes[r].probability, b)
            total += weight
    stats.enumerated += 2**len(roots)
    stats.free_roots = max(stats.free_roots, len(roots))
    return total


def _ancestors(bodies: Mapping[GroundAtom, Formula], start) -> List[GroundAtom]:
    seen = set()
    stack = list(start)
    while stack:
        atom = stack.pop()
        if atom in seen:
            continue
        seen.add(atom)
        if atom in bodies:
            stack.extend(a.ground_atom() for a in atoms(bodies[atom]))
    return list(seen)


def _enumerate_conditioned(net: GroundNetwork, literals: Mapping[GroundAtom, bool],
                           config: InferenceConfig, stats: InferenceStats) -> Rational:
    factor = Fraction(1)
    known: Dict[GroundAtom, bool] = {}
    constraints: Dict[GroundAtom, bool] = {}
    for atom, value in literals.items():
        node = net.nodes[atom]
        if isinstance(node, RootNode):
            factor *= _weight(node.probability, value)
            known[atom] = value
        else:
            constraints[atom] = value
    if factor == 0:
        return factor

    relevant = relevant_subnetwork(net, Query(tuple(constraints.items())))
    for atom, node in relevant.nodes.items():
        if isinstance(node, RootNode) and atom not in known and node.probability in (0, 1):
            known[atom] = node.probability == 1

    bodies: Dict[GroundAtom, Formula] = {}
    for atom in relevant.topological_order():
        node = relevant.nodes[atom]
        if not isinstance(node, DefinedNode):
            continue
        body = fold_constants(node.body, known)
        if isinstance(body, Constant):
            known[atom] = body.value
        else:
            bodies[atom] = body

    for atom, value in list(constraints.items()):
        if atom in known:
            if known[atom] != value:
                return Fraction(0)
            del constraints[atom]
    if not constraints:
        return factor

    closure = set(_ancestors(bodies, constraints))
    free = sorted(a for a in closure if a not in bodies and a not in known)
    _check_cap(len(free), config)
    order = [a for a in relevant.topological_order() if a in closure and a in bodies]
    evaluators = [(a, compile_formula(bodies[a])) for a in order]
    logger.debug("enumerating %d free root(s) for %d constraint(s)", len(free), len(constraints))

    probabilities = [net.nodes[a].probability for a in free]
    values: Dict[GroundAtom, bool] = dict(known)
    values.update((a, False) for a in free)
    weight = Fraction(1)
    for p in probabilities:
        weight *= 1 - p
    flip_up = [p / (1 - p) for p in probabilities]

    total = Fraction(0)
    for step in range(2**len(free)):
        if step:
            i = (step & -step).bit_length() - 1  # Gray code: flip the lowest set bit
            atom = free[i]
            values[atom] = not values[atom]
            weight = weight * flip_up[i] if values[atom] else weight / flip_up[i]
        for atom, fn in evaluators:
            values[atom] = fn(values)
        if all(values[a] == v for a, v in constraints.items()):
            total += weight
    stats.enumerated += 2**len(free)
    stats.free_roots = max(stats.free_roots, len(free))
    return factor * total


def probability_of(net: GroundNetwork,
                   literals: Mapping[GroundAtom, bool],
                   config: Optional[InferenceConfig] = None,
                   simplify: bool = True,
                   stats: Optional[InferenceStats] = None) -> Rational:
    """P(all literals hold), summing over root assignments."""
    config = resolve(config)
    stats = stats if stats is not None else InferenceStats()
    _check_atoms(net, literals)
    if simplify:
        return _enumerate_conditioned(net, literals, config, stats)
    return _enumerate_plain(net, literals, config, stats)


def query_probability(net: GroundNetwork,
                      query: Query,
                      config: Optional[InferenceConfig] = None,
                      simplify: bool = True,
                      stats: Optional[InferenceStats] = None) -> Rational:
    """
    P(Q|E) = P(Q,E) / P(E) by root enumeration.

    With simplify=False every root of the network is enumerated (the literal
    definition); otherwise root literals condition the sum, constants are
    folded and only the free ancestors of the remaining constraints are
    enumerated.
    """
    joint = probability_of(net, query.literals(), config, simplify, stats)
    if not query.evidence:
        return joint
    evidence = probability_of(net, query.evidence_literals(), config, simplify, stats)
    if evidence == 0:
        raise ZeroEvidenceError("P(E) = 0")
    return joint / evidence


def check_gamma(gamma: Rational) -> None:
    if not 0 <= gamma <= 1:
        raise ParameterError(f"threshold gamma={gamma} must lie in [0, 1]")


def decide_threshold(spec: RelationalSpec,
                     n: int,
                     query: Query,
                     config: Optional[InferenceConfig] = None) -> bool:
    """True iff P(Q|E) > gamma, compared exactly."""
    if query.gamma is None:
        raise ValueError("threshold query needs gamma")
    check_gamma(query.gamma)
    net = ground_spec(spec, n, config)
    p = query_probability(relevant_subnetwork(net, query), query, config)
    return p > query.gamma


###### Positive queries over conjunctive bodies ######


def _literal(part: Formula) -> Optional[Tuple[GroundAtom, bool]]:
    if isinstance(part, Atom):
        return part.ground_atom(), True
    if isinstance(part, Not) and isinstance(part.body, Atom):
        return part.body.ground_atom(), False
    return None


def _forced_roots(net: GroundNetwork, start: List[GroundAtom], target: bool,
                  stats: InferenceStats) -> Optional[Dict[GroundAtom, bool]]:
    """
    Root values forced by setting every start atom to target.

    target=True walks conjunctions, target=False walks disjunctions. Returns
    None on a contradiction.
    """
    connective, absorbing = (And, FALSE) if target else (Or, TRUE)
    forced: Dict[GroundAtom, bool] = {}
    visited = set()
    stack = [(a, target) for a in start]
    while stack:
        atom, value = stack.pop()
        stats.calls += 1
        node = net.nodes[atom]
        if isinstance(node, RootNode):
            if forced.get(atom, value) != value:
                return None
            forced[atom] = value
            continue
        if value != target:
            raise FragmentError(f"{atom} would need the value {int(value)}")
        if atom in visited:
            continue
        visited.add(atom)
        body = node.body
        if body == absorbing:
            return None
        if isinstance(body, Constant):
            continue
        parts = body.parts if isinstance(body, connective) else (body, )
        for part in parts:
            lit = _literal(part)
            if lit is None:
                raise FragmentError(f"body of {atom} is not a {connective.__name__} of literals")
            child, positive = lit
            if not positive and not isinstance(net.nodes[child], RootNode):
                raise FragmentError(f"body of {atom} negates the defined atom {child}")
            stack.append((child, target if positive else not target))
    return forced


def _polarity(literals: Mapping[GroundAtom, bool]) -> bool:
    values = set(literals.values())
    if len(values) > 1:
        raise FragmentError("positive query path needs all assignments of one polarity")
    return values.pop() if values else True


def _closure_probability(net: GroundNetwork, literals: Mapping[GroundAtom, bool], target: bool,
                         stats: InferenceStats) -> Rational:
    forced = _forced_roots(net, list(literals), target, stats)
    if forced is None:
        return Fraction(0)
    result = Fraction(1)
    for atom, value in forced.items():
        result *= _weight(net.nodes[atom].probability, value)
    return result


def positive_query_product(spec: Union[RelationalSpec, GroundNetwork],
                           query: Query,
                           n: int = 1,
                           config: Optional[InferenceConfig] = None,
                           stats: Optional[InferenceStats] = None) -> Rational:
    """
    P(Q|E) for all-positive assignments over conjunctive bodies, or
    all-negative assignments over disjunctive bodies, in polynomial time.
    """
    stats = stats if stats is not None else InferenceStats()
    net = spec if isinstance(spec, GroundNetwork) else ground_spec(spec, n, config)
    literals = query.literals()
    _check_atoms(net, literals)
    target = _polarity(literals)
    joint = _closure_probability(net, literals, target, stats)
    if not query.evidence:
        return joint
    evidence = _closure_probability(net, query.evidence_literals(), target, stats)
    if evidence == 0:
        raise ZeroEvidenceError("P(E) = 0")
    return joint / evidence


def positive_query_applies(net: GroundNetwork, query: Query) -> bool:
    try:
        literals = query.literals()
        _check_atoms(net, literals)
        _forced_roots(net, list(literals), _polarity(literals), InferenceStats())
    except (FragmentError, UnknownAtomError):
        return False
    return True


def mpe_bruteforce(net: GroundNetwork,
                   evidence: Mapping[GroundAtom, bool],
                   config: Optional[InferenceConfig] = None
                   ) -> Tuple[Optional[Dict[GroundAtom, bool]], Rational]:
    """Exhaustive most probable explanation; first maximum in enumeration order."""
    config = resolve(config)
    roots = net.roots()
    _check_cap(len(roots), config)
    order = [a for a in net.topological_order() if isinstance(net.nodes[a], DefinedNode)]
    evaluators = [(a, compile_formula(net.nodes[a].body)) for a in order]
    best, best_p = None, Fraction(0)
    for bits in itertools.product((False, True), repeat=len(roots)):
        values = dict(zip(roots, bits))
        for atom, fn in evaluators:
            values[atom] = fn(values)
        if any(values[a] != v for a, v in evidence.items()):
            continue
        p = joint_probability(net, values)
        if best is None or p > best_p:
            best, best_p = values, p
    return best, best_p
