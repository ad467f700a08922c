# config.py
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, replace

from .Constants import (DEFAULT_EDGE_CAP, DEFAULT_FFFO_BOUND, DEFAULT_NODE_CAP, DEFAULT_ROOT_CAP,
                        NODE_CAP_ENV, ROOT_CAP_ENV)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InferenceConfig:
    """Resource guards and engine selection shared by every module."""
    root_cap: int = DEFAULT_ROOT_CAP  # roots enumerated per probability
    node_cap: int = DEFAULT_NODE_CAP  # ground nodes per network
    edge_cap: int = DEFAULT_EDGE_CAP  # edges for brute-force cover counting
    fffo_bound: int = DEFAULT_FFFO_BOUND  # largest k reported as FFFOk
    engine: str = "auto"

    @classmethod
    def from_env(cls, **overrides) -> "InferenceConfig":
        config = cls()
        for env, field_name in ((ROOT_CAP_ENV, "root_cap"), (NODE_CAP_ENV, "node_cap")):
            raw = os.environ.get(env)
            if raw is None:
                continue
            try:
                config = replace(config, **{field_name: int(raw)})
            except ValueError:
                logger.warning("ignoring %s=%r: not an integer", env, raw)
        overrides = {k: v for k, v in overrides.items() if v is not None}
        return replace(config, **overrides)


DEFAULT_CONFIG = InferenceConfig()


def resolve(config: "InferenceConfig | None") -> InferenceConfig:
    return config if config is not None else DEFAULT_CONFIG
