"""Within-route positions shared by the index-based and distance-based encoders."""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from ..core import Instance, Solution, cumulative_distances


@dataclass
class Layout:
    """Per-node position data; depot gets route -1, index 0, phase 0."""

    route: np.ndarray      # route id per node
    index: np.ndarray      # within-route position i (depot = 0)
    length: np.ndarray     # route length L = number of edges
    cum: np.ndarray        # cumulative travel distance d_i
    total: np.ndarray      # route length d_L
    active: np.ndarray     # node is the depot or served


def solution_layout(inst: Instance, sol: Solution) -> Layout:
    n = inst.n_nodes
    route = np.full(n, -1, dtype=np.int64)
    index = np.zeros(n, dtype=np.int64)
    length = np.zeros(n, dtype=np.int64)
    cum = np.zeros(n)
    total = np.zeros(n)
    active = np.zeros(n, dtype=bool)
    active[0] = True
    for ri, r in enumerate(sol.routes):
        d = cumulative_distances(inst, r)
        for k in range(1, len(r) - 1):
            v = r[k]
            route[v], index[v], length[v] = ri, k, len(r) - 1
            cum[v], total[v] = d[k], d[-1]
            active[v] = True
    return Layout(route, index, length, cum, total, active)


def stream(seed: int, inst: Instance | None, tag: str) -> np.random.Generator:
    """Seeded stream for random tables, keyed by (seed, instance name, tag)."""
    key = [int(seed), zlib.crc32(tag.encode())]
    if inst is not None:
        key.append(zlib.crc32(inst.name.encode()))
    return np.random.default_rng(np.random.SeedSequence(key))
