# cnf.py
"""
Propositional CNF formulas: DIMACS text, model counting, the 1-in-3 gadget,
and the matrix / LinMonCBPC / class-B conversions.

Literals are DIMACS integers: v for a variable, -v for its negation,
variables numbered from 1.
"""
from __future__ import annotations

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx

from .config import InferenceConfig, resolve
from .edgecover import ClassBGraph
from .errors import EncodeError, FormatError, ResourceGuardError

logger = logging.getLogger(__name__)

Clause = Tuple[int, ...]


@dataclass(frozen=True)
class Cnf:
    num_vars: int
    clauses: Tuple[Clause, ...] = ()
    names: Tuple[str, ...] = ()  # optional, names[v - 1] for variable v

    def __post_init__(self):
        for clause in self.clauses:
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise EncodeError(f"literal {lit} outside 1..{self.num_vars}")

    def name(self, v: int) -> str:
        return self.names[v - 1] if self.names else f"x{v}"

    def variables(self) -> List[int]:
        return sorted({abs(lit) for c in self.clauses for lit in c})

    def satisfied_by(self, values: Sequence[bool]) -> bool:
        """values[v - 1] is the value of variable v."""
        return all(any(values[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)

    def one_in_three_by(self, values: Sequence[bool]) -> bool:
        return all(sum(values[abs(l) - 1] == (l > 0) for l in c) == 1 for c in self.clauses)


###### DIMACS ######


def parse_dimacs(text: str) -> Cnf:
    header = None
    clauses: List[Clause] = []
    pending: List[int] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            words = line.split()
            if header is not None or len(words) != 4 or words[1] != "cnf":
                raise FormatError("expected `p cnf VARS CLAUSES`", number)
            try:
                header = (int(words[2]), int(words[3]))
            except ValueError:
                raise FormatError("header counts must be integers", number)
            continue
        if header is None:
            raise FormatError("clause before the `p cnf` header", number)
        for word in line.split():
            try:
                lit = int(word)
            except ValueError:
                raise FormatError(f"not a literal: {word!r}", number)
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
            elif abs(lit) > header[0]:
                raise FormatError(f"literal {lit} exceeds {header[0]} variables", number)
            else:
                pending.append(lit)
    if header is None:
        raise FormatError("missing `p cnf` header")
    if pending:
        clauses.append(tuple(pending))
    if len(clauses) != header[1]:
        logger.warning("header announces %d clause(s), found %d", header[1], len(clauses))
    return Cnf(header[0], tuple(clauses))


def render_dimacs(cnf: Cnf) -> str:
    lines = []
    if cnf.names:
        lines += [f"c {v} {cnf.name(v)}" for v in range(1, cnf.num_vars + 1)]
    lines.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    lines += [" ".join(str(l) for l in c) + " 0" for c in cnf.clauses]
    return "\n".join(lines) + "\n"


###### Counting ######


def count_models_bruteforce(cnf: Cnf, config: Optional[InferenceConfig] = None) -> int:
    config = resolve(config)
    if cnf.num_vars > config.root_cap:
        raise ResourceGuardError("variables for brute force", cnf.num_vars, config.root_cap)
    return sum(1 for values in itertools.product((False, True), repeat=cnf.num_vars)
               if cnf.satisfied_by(values))


def _assign(clauses: List[FrozenSet[int]], lit: int) -> Optional[List[FrozenSet[int]]]:
    """Clauses after making lit true; None on an empty clause."""
    result = []
    for c in clauses:
        if lit in c:
            continue
        if -lit in c:
            c = c - {-lit}
            if not c:
                return None
        result.append(c)
    return result


def _dpll(clauses: List[FrozenSet[int]], free: FrozenSet[int]) -> int:
    while True:
        if not clauses:
            return 2**len(free)
        unit = next((c for c in clauses if len(c) == 1), None)
        if unit is None:
            break
        (lit, ) = unit
        clauses = _assign(clauses, lit)
        if clauses is None:
            return 0
        free = free - {abs(lit)}
    counts = Counter(abs(l) for c in clauses for l in c)
    v = min(counts, key=lambda x: (-counts[x], x))
    total = 0
    for lit in (v, -v):
        branch = _assign(clauses, lit)
        if branch is not None:
            total += _dpll(branch, free - {v})
    return total


def count_models(cnf: Cnf) -> int:
    """Exact #SAT by DPLL with unit propagation; unconstrained variables count twice."""
    clauses = [frozenset(c) for c in cnf.clauses]
    if any(not c for c in clauses):
        return 0
    clauses = [c for c in clauses if not any(-l in c for l in c)]
    return _dpll(clauses, frozenset(range(1, cnf.num_vars + 1)))


def exactly_one_encoding(cnf: Cnf) -> Cnf:
    """Each clause becomes at-least-one plus pairwise at-most-one."""
    clauses: List[Clause] = []
    for c in cnf.clauses:
        clauses.append(c)
        clauses.extend((-a, -b) for a, b in itertools.combinations(c, 2))
    return Cnf(cnf.num_vars, tuple(clauses), cnf.names)


def count_one_in_three(cnf: Cnf) -> int:
    """Assignments making exactly one literal true in every clause."""
    return count_models(exactly_one_encoding(cnf))


def count_one_in_three_bruteforce(cnf: Cnf, config: Optional[InferenceConfig] = None) -> int:
    config = resolve(config)
    if cnf.num_vars > config.root_cap:
        raise ResourceGuardError("variables for brute force", cnf.num_vars, config.root_cap)
    return sum(1 for values in itertools.product((False, True), repeat=cnf.num_vars)
               if cnf.one_in_three_by(values))


###### 1-in-3 gadget ######


def one_in_three_gadget(cnf: Cnf) -> Cnf:
    """
    Replace each clause (L1 | L2 | L3) by

        (!L1 | B1 | B2), (L2 | B2 | B3), (!L3 | B3 | B4), (B1 | B3 | B5)

    over five fresh variables, so that 1-in-3 assignments of the result
    correspond one to one with models of the input.
    """
    clauses: List[Clause] = []
    names = [cnf.name(v) for v in range(1, cnf.num_vars + 1)]
    next_var = cnf.num_vars + 1
    for index, c in enumerate(cnf.clauses, start=1):
        if len(c) != 3:
            raise EncodeError(f"clause {index} has {len(c)} literal(s), the gadget needs 3")
        if len(set(c)) != 3:
            raise EncodeError(f"clause {index} repeats a literal")
        b = list(range(next_var, next_var + 5))
        names.extend(f"B{index}_{k}" for k in range(1, 6))
        next_var += 5
        l1, l2, l3 = c
        clauses += [(-l1, b[0], b[1]), (l2, b[1], b[2]), (-l3, b[2], b[3]), (b[0], b[2], b[4])]
    return Cnf(next_var - 1, tuple(clauses), tuple(names))


###### Matrices, LinMonCBPC formulas and class-B graphs ######


def matrix_problem_to_formula(m: int, n: int, rows: int, cols: int) -> Cnf:
    """
    0/1 matrices of size rows x cols whose first m rows and first n columns
    each hold a 1. Variable A{i}_{j} is cell (i, j).
    """
    if not (0 < m < rows and 0 < n < cols):
        raise EncodeError(f"need 0 < m < M and 0 < n < N, got m={m} n={n} M={rows} N={cols}")

    def var(i: int, j: int) -> int:
        return (i - 1) * cols + j

    clauses = [tuple(var(i, j) for j in range(1, cols + 1)) for i in range(1, m + 1)]
    clauses += [tuple(var(i, j) for i in range(1, rows + 1)) for j in range(1, n + 1)]
    names = tuple(f"A{i}_{j}" for i in range(1, rows + 1) for j in range(1, cols + 1))
    return Cnf(rows * cols, tuple(clauses), names)


def matrix_count_bruteforce(m: int, n: int, rows: int, cols: int) -> int:
    count = 0
    for cells in itertools.product((0, 1), repeat=rows * cols):
        grid = [cells[i * cols:(i + 1) * cols] for i in range(rows)]
        if all(any(grid[i]) for i in range(m)) and all(any(r[j] for r in grid) for j in range(n)):
            count += 1
    return count


def intersection_graph(cnf: Cnf) -> nx.Graph:
    """Clause indices, adjacent when the clauses share a variable."""
    g = nx.Graph()
    g.add_nodes_from(range(len(cnf.clauses)))
    supports = [{abs(l) for l in c} for c in cnf.clauses]
    for i, j in itertools.combinations(range(len(cnf.clauses)), 2):
        if supports[i] & supports[j]:
            g.add_edge(i, j)
    return g


def linmoncbpc_parts(cnf: Cnf) -> Tuple[List[int], List[int]]:
    """
    Check linear, monotone, clause-bipartite complete with uniform clause
    sizes per side; return the clause indices of both sides, the side
    holding clause 0 first.
    """
    if not cnf.clauses:
        raise EncodeError("empty formula")
    if any(l < 0 for c in cnf.clauses for l in c):
        raise EncodeError("formula is not monotone")
    supports = [set(c) for c in cnf.clauses]
    if any(len(s) != len(c) for s, c in zip(supports, cnf.clauses)):
        raise EncodeError("clause repeats a variable")
    for i, j in itertools.combinations(range(len(supports)), 2):
        if len(supports[i] & supports[j]) > 1:
            raise EncodeError(f"clauses {i + 1} and {j + 1} share more than one variable")

    g = intersection_graph(cnf)
    if len(cnf.clauses) == 1:
        return [0], []
    if not nx.is_connected(g) or not nx.is_bipartite(g):
        raise EncodeError("intersection graph is not complete bipartite")
    left, right = nx.bipartite.sets(g)
    if 0 not in left:
        left, right = right, left
    if g.number_of_edges() != len(left) * len(right):
        raise EncodeError("intersection graph is not complete bipartite")
    left, right = sorted(left), sorted(right)
    for side in (left, right):
        if len({len(cnf.clauses[i]) for i in side}) != 1:
            raise EncodeError("clause sizes differ within one side")
    return left, right


def linmoncbpc_to_bwgraph(cnf: Cnf) -> ClassBGraph:
    """
    Layers (s_L - |R|, |L|, |R|, s_R - |L|); variables in no clause become
    isolated free edges so that cover count equals model count.
    """
    left, right = linmoncbpc_parts(cnf)
    size_left = len(cnf.clauses[left[0]])
    size_right = len(cnf.clauses[right[0]]) if right else len(left)
    k_left, k_right = size_left - len(right), size_right - len(left)
    unused = cnf.num_vars - len(cnf.variables())
    g = ClassBGraph(k_left, len(left), len(right), k_right if right else 0, unused)
    logger.debug("LinMonCBPC formula -> class B %s with %d free edge(s)", g.layers, unused)
    return g
