# engines.py
"""
Inference engines behind one interface, chosen by name.

`auto` tries the fast paths first (dllite, then positive-product) and
falls back to qf-pruned, which conditions, prunes to the relevant
ancestors and enumerates the free roots. `bruteforce` enumerates every
root of the full grounding.
"""
from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .config import InferenceConfig, resolve
from .Constants import ENGINE_NAMES
from .dllite import infer_positive, infer_positive_applies
from .errors import FragmentError, ParameterError, UnknownAtomError
from .fragments import classify_fragment
from .ground import ground_spec, relevant_subnetwork
from .infer import (InferenceStats, check_gamma, positive_query_applies, positive_query_product,
                    query_probability)
from .model import GroundNetwork, Query, Rational, RelationalSpec

logger = logging.getLogger(__name__)


@dataclass
class EngineResult:
    engine: str
    value: Rational
    stats: InferenceStats = field(default_factory=InferenceStats)

    @property
    def calls(self) -> int:
        return self.stats.calls + self.stats.enumerated

    def decision(self, gamma: Optional[Rational]) -> Optional[bool]:
        if gamma is None:
            return None
        check_gamma(gamma)
        return self.value > gamma


class Engine(ABC):
    name = ""

    def __init__(self, config: Optional[InferenceConfig] = None):
        self.config = resolve(config)
        self._grounded: Optional[Tuple[RelationalSpec, int, Query, GroundNetwork]] = None

    def pruned_network(self, spec: RelationalSpec, n: int, query: Query) -> GroundNetwork:
        """Relevant subnetwork for the query, grounded once per (spec, n, query)."""
        cached = self._grounded
        if cached is not None and cached[0] is spec and cached[1] == n and cached[2] == query:
            return cached[3]
        net = relevant_subnetwork(ground_spec(spec, n, self.config), query)
        self._grounded = (spec, n, query, net)
        return net

    @abstractmethod
    def applies(self, spec: RelationalSpec, n: int, query: Query) -> bool:
        pass

    @abstractmethod
    def probability(self, spec: RelationalSpec, n: int, query: Query, stats: InferenceStats) -> Rational:
        pass

    def run(self, spec: RelationalSpec, n: int, query: Query) -> EngineResult:
        stats = InferenceStats()
        value = self.probability(spec, n, query, stats)
        return EngineResult(self.name, value, stats)


class BruteForceEngine(Engine):
    name = "bruteforce"

    def applies(self, spec, n, query):
        return True

    def probability(self, spec, n, query, stats):
        net = ground_spec(spec, n, self.config)
        return query_probability(net, query, self.config, simplify=False, stats=stats)


class QfPrunedEngine(Engine):
    name = "qf-pruned"

    def applies(self, spec, n, query):
        return True

    def probability(self, spec, n, query, stats):
        return query_probability(self.pruned_network(spec, n, query), query, self.config, simplify=True,
                                 stats=stats)


class PositiveProductEngine(Engine):
    name = "positive-product"

    def applies(self, spec, n, query):
        try:
            net = self.pruned_network(spec, n, query)
        except UnknownAtomError:
            return False
        return positive_query_applies(net, query)

    def probability(self, spec, n, query, stats):
        return positive_query_product(self.pruned_network(spec, n, query), query, n, self.config, stats)


class DlliteEngine(Engine):
    name = "dllite"

    def applies(self, spec, n, query):
        return classify_fragment(spec, self.config).is_dllite and infer_positive_applies(spec, n, query)

    def probability(self, spec, n, query, stats):
        if not classify_fragment(spec, self.config).is_dllite:
            raise FragmentError("dllite engine needs a DL-Lite spec in normal form")
        return infer_positive(spec, n, query, self.config, stats)


class AutoEngine(Engine):
    """Most specific applicable engine; the result names the one used."""
    name = "auto"
    candidates = (DlliteEngine, PositiveProductEngine, QfPrunedEngine)

    def choose(self, spec: RelationalSpec, n: int, query: Query) -> Engine:
        for cls in self.candidates:
            engine = cls(self.config)
            if engine.applies(spec, n, query):
                logger.debug("auto engine picked %s", engine.name)
                return engine
        return QfPrunedEngine(self.config)

    def applies(self, spec, n, query):
        return True

    def probability(self, spec, n, query, stats):
        return self.choose(spec, n, query).probability(spec, n, query, stats)

    def run(self, spec, n, query):
        return self.choose(spec, n, query).run(spec, n, query)


_ENGINES = {cls.name: cls for cls in (AutoEngine, BruteForceEngine, QfPrunedEngine,
                                      PositiveProductEngine, DlliteEngine)}


def engine_names() -> List[str]:
    return list(ENGINE_NAMES)


def EngineFactory(name: str, config: Optional[InferenceConfig] = None) -> Engine:
    if name not in _ENGINES:
        raise ParameterError(f"unknown engine {name!r}; choose from {', '.join(ENGINE_NAMES)}")
    return _ENGINES[name](config)
