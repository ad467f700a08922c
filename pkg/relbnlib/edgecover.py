# edgecover.py
"""
Edge covers of black-and-white graphs.

An edge cover here only has to touch every black node; white nodes are
unconstrained. Counting uses exact integers, the lambda-weighted partition
function Z(G, lambda) = sum over covers of lambda^|C| uses Fractions.

Class-B graphs (white V1, black V2, black V3, white V4, consecutive layers
completely connected) are counted by the two-phase dynamic program over
(k1, k2) states: the right phase settles V3 through its dangling edges into
V4, the left phase settles V2 against the whites left over, with a fresh
table per left-phase instantiation.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, FrozenSet, Hashable, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

import networkx as nx
import numpy as np

from .config import InferenceConfig, resolve
from .errors import FormatError, ParameterError, ResourceGuardError, ShapeError, UncoverableError

logger = logging.getLogger(__name__)

NodeId = Hashable
Edge = Tuple[NodeId, NodeId]
Number = Union[int, Fraction]


class EdgeKind(Enum):
    FREE = "free"
    DANGLING = "dangling"
    REGULAR = "regular"


def _edge(u: NodeId, v: NodeId) -> Edge:
    return (u, v) if str(u) <= str(v) else (v, u)


@dataclass(frozen=True)
class BwGraph:
    black: FrozenSet[NodeId]
    white: FrozenSet[NodeId]
    edges: Tuple[Edge, ...]

    @classmethod
    def build(cls, colors: Mapping[NodeId, str], edges: Iterable[Tuple[NodeId, NodeId]]) -> "BwGraph":
        """colors maps node -> "black" | "white"; rejects loops and parallel edges."""
        black = frozenset(v for v, c in colors.items() if c == "black")
        white = frozenset(v for v, c in colors.items() if c == "white")
        if len(black) + len(white) != len(colors):
            raise ShapeError("node colors must be black or white")
        seen = set()
        for u, v in edges:
            if u == v:
                raise ShapeError(f"self-loop at {u}")
            if u not in colors or v not in colors:
                raise ShapeError(f"edge {u}-{v} has an unknown endpoint")
            e = _edge(u, v)
            if e in seen:
                raise ShapeError(f"parallel edge {u}-{v}")
            seen.add(e)
        return cls(black, white, tuple(sorted(seen, key=lambda e: (str(e[0]), str(e[1])))))

    @property
    def nodes(self) -> List[NodeId]:
        return sorted(self.black | self.white, key=str)

    def is_black(self, v: NodeId) -> bool:
        return v in self.black

    def colors(self) -> Dict[NodeId, str]:
        return {v: "black" if v in self.black else "white" for v in self.nodes}

    def incident(self, v: NodeId) -> List[Edge]:
        return [e for e in self.edges if v in e]

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        for v, c in self.colors().items():
            g.add_node(v, color=c)
        g.add_edges_from(self.edges)
        return g

    def without_edge(self, e: Edge) -> "BwGraph":
        e = _edge(*e)
        return BwGraph(self.black, self.white, tuple(x for x in self.edges if x != e))

    def whitened(self, v: NodeId) -> "BwGraph":
        return BwGraph(self.black - {v}, self.white | ({v} if v in self.black else set()), self.edges)

    def without_node(self, v: NodeId) -> "BwGraph":
        """Drop v together with every edge incident to it."""
        return BwGraph(self.black - {v}, self.white - {v}, tuple(e for e in self.edges if v not in e))

    def relabeled(self, mapping: Mapping[NodeId, NodeId]) -> "BwGraph":
        colors = {mapping.get(v, v): c for v, c in self.colors().items()}
        return BwGraph.build(colors, [(mapping.get(u, u), mapping.get(v, v)) for u, v in self.edges])

    def is_cover(self, chosen: Iterable[Edge]) -> bool:
        touched = set()
        for u, v in chosen:
            touched.update((u, v))
        return self.black <= touched


@dataclass(frozen=True)
class ClassBGraph:
    """Layer sizes of a class-B graph plus isolated free edges carried alongside."""
    k1: int  # |V1|, white
    m: int  # |V2|, black
    n: int  # |V3|, black
    k2: int  # |V4|, white
    isolated_free_edges: int = 0

    def __post_init__(self):
        if min(self.k1, self.m, self.n, self.k2, self.isolated_free_edges) < 0:
            raise ShapeError("layer sizes must be non-negative")

    @property
    def layers(self) -> Tuple[int, int, int, int]:
        return (self.k1, self.m, self.n, self.k2)

    @property
    def edge_count(self) -> int:
        return self.k1 * self.m + self.m * self.n + self.n * self.k2 + self.isolated_free_edges

    def call_bound(self) -> int:
        """States evaluated by the dynamic program; V4 empty runs it mirrored."""
        m, n = (self.n, self.m) if self.k2 == 0 else (self.m, self.n)
        return (n + 1) * (n + 2) // 2 + (n + 1) * (m + 1) * (m + 2) // 2

    def to_bwgraph(self) -> BwGraph:
        layer = {
            name: [f"{name}_{i}" for i in range(1, size + 1)]
            for name, size in zip(("v1", "v2", "v3", "v4"), self.layers)
        }
        colors = {v: "white" for v in layer["v1"] + layer["v4"]}
        colors.update((v, "black") for v in layer["v2"] + layer["v3"])
        edges = []
        for left, right in (("v1", "v2"), ("v2", "v3"), ("v3", "v4")):
            edges.extend((u, v) for u in layer[left] for v in layer[right])
        for i in range(1, self.isolated_free_edges + 1):
            colors[f"f_{i}a"] = colors[f"f_{i}b"] = "white"
            edges.append((f"f_{i}a", f"f_{i}b"))
        return BwGraph.build(colors, edges)


def classify_edge(g: BwGraph, e: Edge) -> EdgeKind:
    e = _edge(*e)
    if e not in g.edges:
        raise ShapeError(f"{e[0]}-{e[1]} is not an edge")
    blacks = sum(1 for v in e if g.is_black(v))
    return (EdgeKind.FREE, EdgeKind.DANGLING, EdgeKind.REGULAR)[blacks]


###### Brute force ######


def _check_lambda(lam) -> Fraction:
    lam = Fraction(lam)
    if lam <= 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    return lam


def _cover_size_histogram(g: BwGraph, config: InferenceConfig) -> Tuple[List[int], int]:
    """Covers counted by size over the non-free edges, plus the number of free edges."""
    constrained = [e for e in g.edges if g.is_black(e[0]) or g.is_black(e[1])]
    free = len(g.edges) - len(constrained)
    if len(g.edges) > config.edge_cap:
        raise ResourceGuardError("edges for brute force", len(g.edges), config.edge_cap)
    masks = []
    for v in g.black:
        mask = 0
        for i, e in enumerate(constrained):
            if v in e:
                mask |= 1 << i
        masks.append(mask)
    histogram = [0] * (len(constrained) + 1)
    for subset in range(1 << len(constrained)):
        if all(subset & mask for mask in masks):
            histogram[bin(subset).count("1")] += 1
    return histogram, free


def count_covers_bruteforce(g: BwGraph, config: Optional[InferenceConfig] = None) -> int:
    """Exact count by enumerating edge subsets (guarded by config.edge_cap)."""
    histogram, free = _cover_size_histogram(g, resolve(config))
    return sum(histogram) * 2**free


def partition_function_bruteforce(g: BwGraph, lam, config: Optional[InferenceConfig] = None) -> Fraction:
    lam = _check_lambda(lam)
    histogram, free = _cover_size_histogram(g, resolve(config))
    return sum(c * lam**k for k, c in enumerate(histogram)) * (1 + lam)**free


###### Class B dynamic program ######


class ClassBCounter:
    """
    Evaluates Z for class-B graphs with edge weight factor w = 1 + lambda.

    `calls` counts evaluated (k1, k2) states over both phases.
    """

    def __init__(self, weight: Number = 2):
        self.weight = weight
        self.calls = 0

    def _power(self, k: int) -> Number:
        return self.weight**k

    def left(self, p: int, m: int) -> Number:
        """K_{p,m} with p white and m black nodes."""
        if m == 0:
            return 1
        if p == 0:
            return 0
        table: Dict[Tuple[int, int], Number] = {}
        for s in range(m, -1, -1):
            for k2 in range(s + 1):
                k1 = s - k2
                self.calls += 1
                if s == m:
                    table[k1, k2] = self._power(k2 * (p - 1))
                else:
                    table[k1, k2] = self.weight * table[k1, k2 + 1] - table[k1 + 1, k2]
        return table[0, 0]

    def right(self, a: int, m: int, n: int, b: int) -> Number:
        """Full class-B instance with m, n, b >= 1."""
        table: Dict[Tuple[int, int], Number] = {}
        for s in range(n, -1, -1):
            for k2 in range(s + 1):
                k1 = s - k2
                self.calls += 1
                if s == n:
                    table[k1, k2] = self._power(k2 * (b - 1)) * self.left(a + k2, m)
                else:
                    table[k1, k2] = self.weight * table[k1, k2 + 1] - table[k1 + 1, k2]
        return table[0, 0]

    def all_black(self, p: int, q: int) -> Number:
        """Complete bipartite K_{p,q} with every node black."""
        z: Dict[Tuple[int, int], Number] = {}
        for i in range(p + 1):
            for j in range(q + 1):
                if i == 0 or j == 0:
                    z[i, j] = 1 if i == j == 0 else 0
                    continue
                z[i, j] = (self.weight * self.layers(1, i - 1, j - 1, 1) - z[i, j - 1] - z[i - 1, j] -
                           z[i - 1, j - 1])
        return z[p, q]

    def layers(self, a: int, m: int, n: int, b: int) -> Number:
        if m == 0 and n == 0:
            return 1
        if n == 0:
            return (self._power(a) - 1)**m
        if m == 0:
            return (self._power(b) - 1)**n
        if a == 0 and b == 0:
            return self.all_black(m, n)
        if b == 0:
            return self.right(b, n, m, a)
        return self.right(a, m, n, b)

    def count(self, g: ClassBGraph) -> Number:
        return self.layers(*g.layers) * self._power(g.isolated_free_edges)


def count_covers_classB(g: ClassBGraph, counter: Optional[ClassBCounter] = None) -> int:
    """Exact edge-cover count of a class-B graph in cubic time."""
    counter = counter if counter is not None else ClassBCounter(2)
    result = int(counter.count(g))
    logger.debug("class B %s: %d cover(s) in %d call(s)", g.layers, result, counter.calls)
    return result


def _all_black_sides(g: BwGraph) -> Tuple[int, int]:
    if g.white:
        raise ShapeError("all-black counting needs every node black")
    if not g.edges and len(g.black) == 0:
        return 0, 0
    h = g.to_networkx()
    if not nx.is_connected(h) or not nx.is_bipartite(h):
        raise ShapeError("graph is not complete bipartite")
    left, right = nx.bipartite.sets(h)
    if len(g.edges) != len(left) * len(right):
        raise ShapeError("graph is not complete bipartite")
    return len(left), len(right)


def count_covers_all_black_bipartite(g: Union[BwGraph, Tuple[int, int]],
                                     counter: Optional[ClassBCounter] = None) -> int:
    """Accepts an all-black complete bipartite BwGraph or its side sizes (p, q)."""
    p, q = g if isinstance(g, tuple) else _all_black_sides(g)
    counter = counter if counter is not None else ClassBCounter(2)
    return int(counter.all_black(p, q))


def all_black_bipartite(p: int, q: int) -> BwGraph:
    colors = {f"p{i}": "black" for i in range(1, p + 1)}
    colors.update((f"q{j}", "black") for j in range(1, q + 1))
    return BwGraph.build(colors, [(f"p{i}", f"q{j}") for i in range(1, p + 1) for j in range(1, q + 1)])


###### General dispatch ######


def as_class_b(g: BwGraph) -> Optional[ClassBGraph]:
    """Recognize g as a class-B graph (up to free edges and isolated whites)."""
    free = [e for e in g.edges if not g.is_black(e[0]) and not g.is_black(e[1])]
    rest = [e for e in g.edges if e not in set(free)]
    neighbors: Dict[NodeId, set] = {v: set() for v in g.nodes}
    for u, v in rest:
        neighbors[u].add(v)
        neighbors[v].add(u)
    whites = [w for w in g.white if neighbors[w]]
    if not g.black:
        return ClassBGraph(0, 0, 0, 0, len(free))

    h = nx.Graph()
    h.add_nodes_from(g.black)
    h.add_edges_from(e for e in rest if g.is_black(e[0]) and g.is_black(e[1]))
    if h.number_of_edges() == 0:
        sides = (frozenset(g.black), frozenset())
    else:
        if not nx.is_connected(h) or not nx.is_bipartite(h):
            return None
        left, right = nx.bipartite.sets(h)
        if h.number_of_edges() != len(left) * len(right):
            return None
        sides = (frozenset(left), frozenset(right))

    attached = ([], [])
    for w in whites:
        if neighbors[w] == set(sides[0]):
            attached[0].append(w)
        elif sides[1] and neighbors[w] == set(sides[1]):
            attached[1].append(w)
        else:
            return None
    return ClassBGraph(len(attached[0]), len(sides[0]), len(sides[1]), len(attached[1]), len(free))


def _components(g: BwGraph) -> List[BwGraph]:
    h = g.to_networkx()
    parts = []
    for comp in nx.connected_components(h):
        black = frozenset(v for v in comp if v in g.black)
        white = frozenset(v for v in comp if v in g.white)
        parts.append(BwGraph(black, white, tuple(e for e in g.edges if e[0] in comp)))
    return parts


def _weighted(g: BwGraph, weight: Number, lam, config: InferenceConfig,
              counter: ClassBCounter) -> Number:
    result: Number = 1
    for part in _components(g):
        shape = as_class_b(part)
        if shape is not None:
            counter.weight = weight
            result *= counter.count(shape)
        elif lam is None:
            result *= count_covers_bruteforce(part, config)
        else:
            result *= partition_function_bruteforce(part, lam, config)
        if result == 0:
            break
    return result


def count_covers(g: Union[BwGraph, ClassBGraph],
                 config: Optional[InferenceConfig] = None,
                 counter: Optional[ClassBCounter] = None) -> int:
    """Count per connected component: class B by the recursion, anything else by brute force."""
    counter = counter if counter is not None else ClassBCounter(2)
    if isinstance(g, ClassBGraph):
        return count_covers_classB(g, counter)
    return int(_weighted(g, 2, None, resolve(config), counter))


def partition_function(g: Union[BwGraph, ClassBGraph],
                       lam,
                       config: Optional[InferenceConfig] = None,
                       counter: Optional[ClassBCounter] = None) -> Fraction:
    """Z(g, lambda); lambda = 1 gives the cover count."""
    lam = _check_lambda(lam)
    counter = counter if counter is not None else ClassBCounter(1 + lam)
    counter.weight = 1 + lam
    if isinstance(g, ClassBGraph):
        return Fraction(counter.count(g))
    return Fraction(_weighted(g, 1 + lam, lam, resolve(config), counter))


###### Minimum covers ######


def min_edge_cover_bipartite_complete(a: int, b: int) -> List[Tuple[int, int]]:
    """
    Lexicographically least minimum edge cover of K_{a,b}, as (row, column)
    pairs numbered from 1. Its size is max(a, b).
    """
    if a < 0 or b < 0 or a + b == 0:
        raise ParameterError("need a, b >= 0 with a + b > 0")
    if a == 0 or b == 0:
        raise UncoverableError(f"K_{{{a},{b}}}: one side is empty")
    if a <= b:
        cover = [(1, j) for j in range(1, b - a + 2)]
        cover += [(i, b - a + i) for i in range(2, a + 1)]
    else:
        cover = [(i, 1) for i in range(1, a - b + 2)]
        cover += [(a - b + j, j) for j in range(2, b + 1)]
    return sorted(cover)


###### Glauber dynamics ######

_SCALE = 2**53


def _accept(rng: np.random.Generator, p: Fraction) -> bool:
    """Exact Bernoulli(p) up to the 2^-53 grid: u/2^53 < p."""
    u = int(rng.integers(0, _SCALE))
    return u * p.denominator < p.numerator * _SCALE


def glauber_chain(g: BwGraph, lam, steps: int, seed: int) -> Iterator[FrozenSet[Edge]]:
    """
    Yield the state after each of `steps` moves, starting from all edges.

    A move picks an edge uniformly; an absent edge is added with probability
    lambda/(1+lambda), a present one removed with probability 1/(1+lambda)
    when the rest is still a cover. Uses numpy's PCG64 seeded by `seed`.
    """
    lam = _check_lambda(lam)
    if steps < 0:
        raise ParameterError("steps must be non-negative")
    if not g.is_cover(g.edges):
        raise UncoverableError("some black node has no incident edge")
    rng = np.random.default_rng(seed)
    add_p, remove_p = lam / (1 + lam), 1 / (1 + lam)
    state = set(g.edges)
    degree = {v: 0 for v in g.nodes}
    for u, v in g.edges:
        degree[u] += 1
        degree[v] += 1
    for _ in range(steps):
        if g.edges:
            e = g.edges[int(rng.integers(0, len(g.edges)))]
            if e not in state:
                if _accept(rng, add_p):
                    state.add(e)
                    degree[e[0]] += 1
                    degree[e[1]] += 1
            elif all(degree[v] > 1 or not g.is_black(v) for v in e) and _accept(rng, remove_p):
                state.remove(e)
                degree[e[0]] -= 1
                degree[e[1]] -= 1
        yield frozenset(state)


def glauber_sample(g: BwGraph, lam, steps: int, seed: int) -> FrozenSet[Edge]:
    state = frozenset(g.edges)
    for state in glauber_chain(g, lam, steps, seed):
        pass
    if steps == 0:
        return frozenset(g.edges)
    return state


###### .bwg text format ######


def parse_bwg(text: str) -> Union[BwGraph, ClassBGraph]:
    """`node ID black|white`, `edge ID ID`, or a single `classB k1 m n k2` line."""
    colors: Dict[str, str] = {}
    edges: List[Edge] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if words[0] == "classB":
            try:
                sizes = [int(w) for w in words[1:]]
            except ValueError:
                raise FormatError("classB expects integers", number)
            if len(sizes) not in (4, 5) or colors or edges:
                raise FormatError("classB expects k1 m n k2 [free] and no other lines", number)
            return ClassBGraph(*sizes)
        if words[0] == "node" and len(words) == 3 and words[2] in ("black", "white"):
            if words[1] in colors:
                raise FormatError(f"node {words[1]} declared twice", number)
            colors[words[1]] = words[2]
        elif words[0] == "edge" and len(words) == 3:
            edges.append((words[1], words[2]))
        else:
            raise FormatError(f"cannot read {line!r}", number)
    try:
        return BwGraph.build(colors, edges)
    except ShapeError as e:
        raise FormatError(str(e))


def render_bwg(g: Union[BwGraph, ClassBGraph]) -> str:
    if isinstance(g, ClassBGraph):
        extra = f" {g.isolated_free_edges}" if g.isolated_free_edges else ""
        return f"classB {g.k1} {g.m} {g.n} {g.k2}{extra}\n"
    lines = [f"node {v} {c}" for v, c in g.colors().items()]
    lines += [f"edge {u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"
