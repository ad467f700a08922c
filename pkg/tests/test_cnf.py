import itertools

import hypothesis.strategies as st
import networkx as nx
import pytest
from hypothesis import given, settings

from relbnlib import (ClassBGraph, Cnf, EncodeError, FormatError, count_covers, count_models,
                      count_models_bruteforce, count_one_in_three, intersection_graph,
                      linmoncbpc_to_bwgraph, matrix_count_bruteforce, matrix_problem_to_formula,
                      one_in_three_gadget, parse_dimacs, render_dimacs)
from relbnlib.cnf import count_one_in_three_bruteforce, linmoncbpc_parts

from conftest import read_sample


def test_parse_sample():
    cnf = parse_dimacs(read_sample("phi.cnf"))
    assert cnf.num_vars == 3
    assert cnf.clauses == ((1, 2, 3), (-1, 2, 3))
    assert count_models(cnf) == 6


def test_dimacs_errors():
    with pytest.raises(FormatError):
        parse_dimacs("1 2 0\n")
    with pytest.raises(FormatError):
        parse_dimacs("p cnf 2 1\n1 3 0\n")
    with pytest.raises(FormatError):
        parse_dimacs("p cnf 2 1\n1 x 0\n")
    with pytest.raises(EncodeError):
        Cnf(2, ((1, 5), ))


def test_render_keeps_names():
    cnf = matrix_problem_to_formula(1, 1, 2, 2)
    text = render_dimacs(cnf)
    assert "c 1 A1_1" in text
    assert parse_dimacs(text).clauses == cnf.clauses


###### 1-in-3 gadget ######


def test_gadget_single_clause():
    phi = Cnf(3, ((1, 2, 3), ))
    gadget = one_in_three_gadget(phi)
    assert len(gadget.clauses) == 4
    assert gadget.num_vars == 8
    assert gadget.name(4) == "B1_1"
    assert count_one_in_three_bruteforce(gadget) == count_models(phi) == 7


def test_gadget_empty_formula():
    gadget = one_in_three_gadget(Cnf(0, ()))
    assert gadget.clauses == ()
    assert count_one_in_three(gadget) == 1


def test_gadget_two_clauses():
    phi = parse_dimacs(read_sample("phi.cnf"))
    gadget = one_in_three_gadget(phi)
    assert gadget.num_vars == 13
    assert count_one_in_three_bruteforce(gadget) == count_models_bruteforce(phi) == 6


def test_gadget_rejects_repeats_and_short_clauses():
    with pytest.raises(EncodeError):
        one_in_three_gadget(Cnf(2, ((1, 1, 2), )))
    with pytest.raises(EncodeError):
        one_in_three_gadget(Cnf(2, ((1, 2), )))


@st.composite
def three_cnfs(draw, max_vars=6, max_clauses=4):
    n = draw(st.integers(min_value=3, max_value=max_vars))
    literal = st.builds(lambda v, s: v if s else -v, st.integers(1, n), st.booleans())
    clause = st.lists(literal, min_size=3, max_size=3).filter(lambda c: len(set(c)) == 3).map(tuple)
    clauses = draw(st.lists(clause, max_size=max_clauses))
    return Cnf(n, tuple(clauses))


@given(three_cnfs())
@settings(max_examples=100, deadline=None)
def test_gadget_identity(phi):
    assert count_one_in_three(one_in_three_gadget(phi)) == count_models_bruteforce(phi)


@given(three_cnfs(max_vars=4, max_clauses=3))
@settings(max_examples=40, deadline=None)
def test_one_in_three_counter(phi):
    assert count_one_in_three(phi) == count_one_in_three_bruteforce(phi)


@given(st.integers(1, 5).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.lists(st.builds(lambda v, s: v if s else -v, st.integers(1, n), st.booleans()),
                      max_size=4).map(tuple), max_size=6))))
@settings(max_examples=100, deadline=None)
def test_dpll_matches_bruteforce(data):
    n, clauses = data
    cnf = Cnf(n, tuple(clauses))
    assert count_models(cnf) == count_models_bruteforce(cnf)


###### Matrices and class-B graphs ######


def test_matrix_formula_clauses():
    cnf = matrix_problem_to_formula(3, 2, 5, 6)
    assert len(cnf.clauses) == 5
    assert [len(c) for c in cnf.clauses] == [6, 6, 6, 5, 5]
    assert [cnf.name(v) for v in cnf.clauses[0]] == [f"A1_{j}" for j in range(1, 7)]
    assert [cnf.name(v) for v in cnf.clauses[4]] == [f"A{i}_2" for i in range(1, 6)]
    g = intersection_graph(cnf)
    assert nx.is_isomorphic(g, nx.complete_bipartite_graph(3, 2))


def test_matrix_bounds():
    with pytest.raises(EncodeError):
        matrix_problem_to_formula(2, 1, 2, 3)
    with pytest.raises(EncodeError):
        matrix_problem_to_formula(0, 1, 2, 3)


def test_layers_of_the_worked_instances():
    assert linmoncbpc_to_bwgraph(matrix_problem_to_formula(3, 2, 5, 6)).layers == (4, 3, 2, 2)
    assert linmoncbpc_to_bwgraph(matrix_problem_to_formula(3, 2, 5, 5)).layers == (3, 3, 2, 2)
    small = linmoncbpc_to_bwgraph(matrix_problem_to_formula(1, 1, 2, 2))
    assert small == ClassBGraph(1, 1, 1, 1, isolated_free_edges=1)
    assert count_covers(small) == 10


def test_one_to_one_matrix_count():
    assert matrix_count_bruteforce(1, 1, 2, 2) == 10
    assert count_models(matrix_problem_to_formula(1, 1, 2, 2)) == 10


@pytest.mark.parametrize("m, n, rows, cols", [
    (m, n, rows, cols)
    for rows, cols in itertools.product(range(2, 5), repeat=2)
    for m in range(1, rows)
    for n in range(1, cols)
])
def test_matrix_formula_graph_triangle(m, n, rows, cols):
    cnf = matrix_problem_to_formula(m, n, rows, cols)
    expected = count_models(cnf)
    assert count_covers(linmoncbpc_to_bwgraph(cnf)) == expected
    assert matrix_count_bruteforce(m, n, rows, cols) == expected


def test_linmoncbpc_checks():
    with pytest.raises(EncodeError):
        linmoncbpc_parts(Cnf(3, ((1, -2), (2, 3))))
    with pytest.raises(EncodeError):
        linmoncbpc_parts(Cnf(4, ((1, 2, 3), (1, 2, 4))))
    with pytest.raises(EncodeError):
        linmoncbpc_parts(Cnf(4, ((1, 2), (3, 4))))
    assert linmoncbpc_parts(Cnf(3, ((1, 2, 3), ))) == ([0], [])
    single = linmoncbpc_to_bwgraph(Cnf(4, ((1, 2, 3), )))
    assert count_covers(single) == count_models(Cnf(4, ((1, 2, 3), ))) == 14
