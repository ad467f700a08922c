import itertools
from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from relbnlib import (FragmentError, GroundAtom, InferenceConfig, InferenceStats,
                      ParameterError, PartialAssignmentError, Query, ResourceGuardError,
                      ZeroEvidenceError, decide_threshold, evaluate, ground_spec, joint_probability,
                      mpe_bruteforce, parse_query, parse_spec, positive_query_product, probability_of,
                      query_probability)
from relbnlib.model import GroundNetwork

CHAIN = parse_spec("""
prob A() = 1/2.
prob B() = 1/3.
def C() := A() & B().
def D() := C() & A().
""")


def atom(name, *args):
    return GroundAtom(name, args)


def test_joint_probability_of_fig2(fig2):
    net = ground_spec(fig2, 1)
    values = {atom("y"): True, atom("z0"): False, atom("z1"): True, atom("x"): True}
    assert joint_probability(net, values) == Fraction(14, 75)
    values[atom("x")] = False
    assert joint_probability(net, values) == 0


def test_joint_probability_edge_cases(fig2):
    assert joint_probability(GroundNetwork(1, {}), {}) == 1
    with pytest.raises(PartialAssignmentError):
        joint_probability(ground_spec(fig2, 1), {atom("y"): True})


def test_fig2_marginal(fig2):
    net = ground_spec(fig2, 1)
    query = parse_query("x=1")
    assert query_probability(net, query) == Fraction(11, 30)
    assert query_probability(net, query, simplify=False) == Fraction(11, 30)


def test_friends_probabilities(friends):
    net = ground_spec(friends, 2)
    assert query_probability(net, parse_query("friends(1,2)=1")) == Fraction(17, 125)
    assert query_probability(net, parse_query("friends(1,1)=1")) == 1
    assert query_probability(ground_spec(friends, 4), parse_query("friends(3,3)=1")) == 1


def test_conditioning(fig2):
    net = ground_spec(fig2, 1)
    assert query_probability(net, parse_query("y=1 | x=1")) == Fraction(7, 11)


def test_zero_evidence_is_an_error():
    spec = parse_spec("prob a() = 0.\ndef b() := a().\n")
    with pytest.raises(ZeroEvidenceError) as info:
        query_probability(ground_spec(spec, 1), parse_query("a=1 | b=1"))
    assert info.value.exit_code == 3


def test_root_cap(example5):
    net = ground_spec(example5, 3)
    stats = InferenceStats()
    with pytest.raises(ResourceGuardError):
        query_probability(net, parse_query("X6(1)=1"), InferenceConfig(root_cap=4), stats=stats)


def test_stats_record_enumeration(fig2):
    stats = InferenceStats()
    query_probability(ground_spec(fig2, 1), parse_query("x=1"), simplify=False, stats=stats)
    assert stats.enumerated == 8
    assert stats.free_roots == 3


def test_decide_threshold(fig2, friends):
    assert decide_threshold(fig2, 1, parse_query("x=1; gamma=1/3"))
    assert not decide_threshold(friends, 2, parse_query("friends(1,2)=1; gamma=17/125"))
    assert not decide_threshold(friends, 2, parse_query("friends(1,1)=1; gamma=1"))
    with pytest.raises(ValueError):
        decide_threshold(fig2, 1, parse_query("x=1"))
    with pytest.raises(ParameterError):
        decide_threshold(fig2, 1, parse_query("x=1; gamma=3/2"))
    assert decide_threshold(fig2, 1, parse_query("x=1; gamma=0"))
    assert not decide_threshold(fig2, 1, parse_query("x=1; gamma=1"))


def test_positive_product_examples():
    net = ground_spec(CHAIN, 1)
    assert positive_query_product(net, parse_query("C=1")) == Fraction(1, 6)
    assert positive_query_product(net, parse_query("A=1")) == Fraction(1, 2)
    assert positive_query_product(net, parse_query("D=1")) == Fraction(1, 6)
    assert positive_query_product(CHAIN, parse_query("D=1 | C=1"), 1) == 1


def test_positive_product_detects_contradiction():
    spec = parse_spec("prob a() = 1/2.\ndef b() := a() & !a().\n")
    assert positive_query_product(spec, parse_query("b=1"), 1) == 0


def test_positive_product_rejects_mixed_or_wrong_shape(fig2):
    with pytest.raises(FragmentError):
        positive_query_product(CHAIN, parse_query("C=1, A=0"), 1)
    with pytest.raises(FragmentError):
        positive_query_product(fig2, parse_query("x=1"), 1)


def test_mpe_bruteforce(fig2):
    best, p = mpe_bruteforce(ground_spec(fig2, 1), {atom("x"): True})
    assert p == Fraction(14, 75)
    assert best[atom("y")] and best[atom("z1")] and not best[atom("z0")]


###### Generated networks ######

PROBABILITIES = st.fractions(min_value=0, max_value=1, max_denominator=6)


@st.composite
def prop_networks(draw, connective=None, negate_defined=True, max_roots=6):
    """Propositional specs a1..ak (roots) and d1..dj (defined)."""
    roots = draw(st.integers(min_value=1, max_value=max_roots))
    defined = draw(st.integers(min_value=1, max_value=5))
    lines = [f"prob a{i}() = {draw(PROBABILITIES)}." for i in range(1, roots + 1)]
    for j in range(1, defined + 1):
        names = [f"a{i}()" for i in range(1, roots + 1)] + [f"d{k}()" for k in range(1, j)]
        size = draw(st.integers(min_value=1, max_value=3))
        parts = []
        for _ in range(size):
            name = draw(st.sampled_from(names))
            negate = draw(st.booleans()) and (negate_defined or name.startswith("a"))
            parts.append(("!" if negate else "") + name)
        op = connective or draw(st.sampled_from(["&", "|"]))
        lines.append(f"def d{j}() := {f' {op} '.join(parts)}.")
    spec = parse_spec("\n".join(lines) + "\n")
    return ground_spec(spec, 1)


def _choose_literals(draw, net, value=None, max_size=2):
    atoms = draw(st.lists(st.sampled_from(list(net.nodes)), min_size=1, max_size=max_size, unique=True))
    return [(a, draw(st.booleans()) if value is None else value) for a in atoms]


@given(prop_networks(max_roots=12))
@settings(max_examples=100, deadline=None)
def test_joint_probabilities_sum_to_one(net):
    roots = net.roots()
    defined = [a for a in net.topological_order() if a not in set(roots)]
    total = Fraction(0)
    for bits in itertools.product((False, True), repeat=len(roots)):
        values = dict(zip(roots, bits))
        for a in defined:
            values[a] = evaluate(net.nodes[a].body, values)
        total += joint_probability(net, values)
        if defined:
            last = defined[-1]
            assert joint_probability(net, {**values, last: not values[last]}) == 0
    assert total == 1


@given(prop_networks(max_roots=3))
@settings(max_examples=40, deadline=None)
def test_joint_probabilities_over_every_assignment(net):
    atoms = list(net.nodes)
    total = sum(
        joint_probability(net, dict(zip(atoms, bits)))
        for bits in itertools.product((False, True), repeat=len(atoms)))
    assert total == 1


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_evidence_monotonicity_and_chain_rule(data):
    net = data.draw(prop_networks())
    evidence = dict(_choose_literals(data.draw, net))
    query = {a: v for a, v in _choose_literals(data.draw, net) if a not in evidence}
    joint = probability_of(net, {**query, **evidence})
    p_e = probability_of(net, evidence)
    assert joint <= p_e
    assert probability_of(net, evidence, simplify=False) == p_e
    if p_e > 0:
        assert query_probability(net, Query.build(query.items(), evidence.items())) * p_e == joint


@given(st.data())
@settings(max_examples=200, deadline=None)
def test_positive_product_matches_enumeration(data):
    connective, value = data.draw(st.sampled_from([("&", True), ("|", False)]))
    net = data.draw(prop_networks(connective=connective, negate_defined=False, max_roots=12))
    evidence = dict(_choose_literals(data.draw, net, value, max_size=1))
    query = [(a, v) for a, v in _choose_literals(data.draw, net, value) if a not in evidence]
    q = Query.build(query, evidence.items())
    stats = InferenceStats()
    if probability_of(net, evidence) == 0:
        with pytest.raises(ZeroEvidenceError):
            positive_query_product(net, q, stats=stats)
        return
    assert positive_query_product(net, q, stats=stats) == query_probability(net, q, simplify=False)
    assert stats.calls <= 4 * len(net) * (len(net) + 1)
