"""Attention-bias encoders (RPE, ALiBi, SPD) over all node pairs.

Each returns an (N+1, N+1) matrix indexed by node id. For probing, a node's
vector is its row of the bias matrix (the bias profile).
"""

from __future__ import annotations

from collections import deque

import numpy as np

from ..core import Instance, Solution
from .layout import stream


def rpe_table(window: int, seed: int) -> np.ndarray:
    """Scalar per signed offset -window .. window (entry ``o + window``)."""
    return stream(seed, None, "rpe").standard_normal(2 * window + 1)


def bias_rpe(index: np.ndarray, window: int, seed: int) -> np.ndarray:
    off = np.clip(index[:, None] - index[None, :], -window, window)
    return rpe_table(window, seed)[off + window]


def alibi_slopes(heads: int) -> np.ndarray:
    """Geometric head slopes 2^(-8h/heads), h = 1 .. heads."""
    return 2.0 ** (-8.0 * np.arange(1, heads + 1) / heads)


def bias_alibi(index: np.ndarray, heads: int = 1) -> np.ndarray:
    m = alibi_slopes(heads)[0]
    return -m * np.abs(index[:, None] - index[None, :]).astype(float)


def route_graph(inst: Instance, sol: Solution) -> list[list[int]]:
    """Adjacency lists of the depot-plus-route-arcs graph (undirected)."""
    adj: list[list[int]] = [[] for _ in range(inst.n_nodes)]
    for r in sol.routes:
        for k in range(len(r) - 1):
            u, v = r[k], r[k + 1]
            if v not in adj[u]:
                adj[u].append(v)
                adj[v].append(u)
    return adj


def hop_distances(adj: list[list[int]]) -> np.ndarray:
    """All-pairs BFS hop counts; -1 marks unreachable pairs."""
    n = len(adj)
    out = np.full((n, n), -1, dtype=np.int64)
    for s in range(n):
        row = out[s]
        row[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if row[w] < 0:
                    row[w] = row[u] + 1
                    queue.append(w)
    return out


def spd_table(size: int, seed: int) -> np.ndarray:
    return stream(seed, None, "spd").standard_normal(size)


def bias_spd(inst: Instance, sol: Solution, seed: int) -> np.ndarray:
    """Seeded scalar per hop distance, capped at the route-graph diameter.

    Unreachable pairs (unserved PCVRP customers) read a separate last entry.
    """
    hops = hop_distances(route_graph(inst, sol))
    diameter = int(hops.max()) if hops.size else 0
    table = spd_table(diameter + 2, seed)
    idx = np.where(hops < 0, diameter + 1, np.minimum(hops, diameter))
    return table[idx]
