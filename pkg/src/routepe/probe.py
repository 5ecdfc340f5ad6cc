"""Structural measurements: Spearman probing, anisometry and angular entropy.

Probing targets for a sampled customer pair (u, v):

* D1: |d_u - d_v|, the gap in cumulative travel distance (same route only);
* D2: min(gap, d_L - gap), the cyclic arc distance (same route only);
* D3: 1 if u and v lie on different routes, else 0 (all pairs).

Each target is correlated with the L2 distance between the pair's
embedding rows. Pairs are sampled with one stream per solution so results
do not depend on how solutions are split across workers.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .core import Instance, Solution, cumulative_distances, depot_angles
from .errors import UndefinedCorrelationError


@dataclass(frozen=True)
class PairSample:
    solution: int
    u: int
    v: int
    same_route: bool
    d1: float | None
    d2: float | None
    d3: int


@dataclass
class ProbeReport:
    method: str
    rho_d1: float | None
    rho_d2: float | None
    rho_d3: float | None
    n_pairs_d1: int
    n_pairs_d3: int
    d3_ratio: float | None = None
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class AnisometryReport:
    cv: float
    max_min: float
    mad: float
    n_instances: int = 0


@dataclass
class EntropyReport:
    per_k: dict[int, float]
    counts: dict[int, int]
    mean: float
    min: float
    bins: int = 36


# -- rank correlation -------------------------------------------------------

def average_ranks(x) -> np.ndarray:
    """1-based ranks; tied values share the mean of their positions."""
    x = np.asarray(x, dtype=float)
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    starts = np.flatnonzero(np.concatenate(([True], xs[1:] != xs[:-1])))
    ends = np.concatenate((starts[1:], [len(xs)]))
    mean_rank = (starts + ends + 1) / 2.0
    ranks = np.empty(len(x))
    ranks[order] = np.repeat(mean_rank, ends - starts)
    return ranks


def spearman(xs, ys) -> float:
    """Pearson correlation of average-ranked data."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("spearman needs two 1-D sequences of equal length")
    if len(x) < 2:
        raise ValueError("spearman needs at least two observations")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise UndefinedCorrelationError("correlation is undefined for constant input")
    rx = average_ranks(x)
    ry = average_ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    rho = float(np.dot(rx, ry) / math.sqrt(float(np.dot(rx, rx)) * float(np.dot(ry, ry))))
    return min(1.0, max(-1.0, rho))


# -- pair sampling ----------------------------------------------------------

def _route_tables(inst: Instance, sol: Solution):
    """Customer list plus route id, cumulative distance and route length per node."""
    route = {}
    cum = {}
    total = {}
    for ri, r in enumerate(sol.routes):
        d = cumulative_distances(inst, r)
        for k in range(1, len(r) - 1):
            route[r[k]] = ri
            cum[r[k]] = float(d[k])
            total[r[k]] = float(d[-1])
    customers = sorted(route)
    return customers, route, cum, total


def _pair_rng(seed: int, solution_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(solution_index), 0x9A17]))


def allocate_pairs(sizes: Sequence[int], count: int, seed: int) -> np.ndarray:
    """Pairs per solution, proportional to its number of unordered customer pairs."""
    weights = np.array([s * (s - 1) / 2 for s in sizes], dtype=float)
    if weights.sum() <= 0:
        raise ValueError("no solution has two served customers")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x5A3B]))
    return rng.multinomial(count, weights / weights.sum())


def sample_solution_pairs(inst: Instance, sol: Solution, count: int, seed: int,
                          solution_index: int) -> list[PairSample]:
    customers, route, cum, total = _route_tables(inst, sol)
    if count == 0:
        return []
    rng = _pair_rng(seed, solution_index)
    m = len(customers)
    a = rng.integers(0, m, size=count)
    b = rng.integers(0, m - 1, size=count)
    b = np.where(b >= a, b + 1, b)
    out = []
    for ia, ib in zip(a.tolist(), b.tolist()):
        u, v = customers[ia], customers[ib]
        if u > v:
            u, v = v, u
        same = route[u] == route[v]
        if same:
            gap = abs(cum[u] - cum[v])
            out.append(PairSample(solution_index, u, v, True, gap, min(gap, total[u] - gap), 0))
        else:
            out.append(PairSample(solution_index, u, v, False, None, None, 1))
    return out


def sample_pairs(instances: Sequence[Instance], solutions: Sequence[Solution], count: int,
                 seed: int) -> list[PairSample]:
    """``count`` pairs drawn uniformly over (solution, unordered customer pair)."""
    if not solutions:
        raise ValueError("no solutions to sample from")
    sizes = [len(s.served()) for s in solutions]
    per = allocate_pairs(sizes, count, seed)
    out: list[PairSample] = []
    for k, (inst, sol) in enumerate(zip(instances, solutions)):
        out.extend(sample_solution_pairs(inst, sol, int(per[k]), seed, k))
    return out


# -- probing ----------------------------------------------------------------

def _safe_spearman(x, y) -> float | None:
    if len(x) < 2:
        return None
    try:
        return spearman(x, y)
    except UndefinedCorrelationError:
        return None


def pair_distances(pairs: Sequence[PairSample], vectors: Sequence[np.ndarray]) -> np.ndarray:
    """L2 distance between embedding rows of every pair; ``vectors[k]`` per solution."""
    sol = np.fromiter((p.solution for p in pairs), dtype=np.int64, count=len(pairs))
    u = np.fromiter((p.u for p in pairs), dtype=np.int64, count=len(pairs))
    v = np.fromiter((p.v for p in pairs), dtype=np.int64, count=len(pairs))
    out = np.empty(len(pairs))
    for k in np.unique(sol).tolist():
        sel = sol == k
        V = vectors[k]
        out[sel] = np.linalg.norm(V[u[sel]] - V[v[sel]], axis=1)
    return out


def probe_method(method: str, pairs: Sequence[PairSample], vectors: Sequence[np.ndarray],
                 config: dict | None = None) -> ProbeReport:
    dist = pair_distances(pairs, vectors)
    same = np.array([p.same_route for p in pairs], dtype=bool)
    d1 = np.array([p.d1 for p in pairs if p.same_route], dtype=float)
    d2 = np.array([p.d2 for p in pairs if p.same_route], dtype=float)
    d3 = np.array([p.d3 for p in pairs], dtype=float)
    ratio = None
    if same.any() and (~same).any():
        intra = float(dist[same].mean())
        if intra > 0:
            ratio = float(dist[~same].mean()) / intra
    return ProbeReport(
        method=method,
        rho_d1=_safe_spearman(dist[same], d1),
        rho_d2=_safe_spearman(dist[same], d2),
        rho_d3=_safe_spearman(dist, d3),
        n_pairs_d1=int(same.sum()),
        n_pairs_d3=len(pairs),
        d3_ratio=ratio,
        config=dict(config or {}),
    )


def probe(instances: Sequence[Instance], solutions: Sequence[Solution],
          embeddings: Mapping[str, Sequence], count: int = 10000, seed: int = 0) -> dict[str, ProbeReport]:
    """Spearman probes for each method; ``embeddings[method][k]`` belongs to solution k.

    Entries may be :class:`~routepe.pe.Embedding` objects or bare arrays.
    """
    pairs = sample_pairs(instances, solutions, count, seed)
    out = {}
    for method, embs in embeddings.items():
        vecs = [getattr(e, "vectors", e) for e in embs]
        cfg = getattr(embs[0], "config", {}) if len(embs) else {}
        out[method] = probe_method(method, pairs, vecs, cfg)
    return out


# -- anisometry -------------------------------------------------------------

def _edge_lengths(inst: Instance, route) -> np.ndarray:
    c = inst.coords[list(route)]
    return np.hypot(*(c[1:] - c[:-1]).T)


def _fit_residuals(d: np.ndarray) -> np.ndarray:
    """Residuals of the least-squares line of d against its index.

    Centred closed form, so exactly linear input gives exactly zero.
    """
    x = np.arange(len(d), dtype=float) - (len(d) - 1) / 2.0
    dc = d - math.fsum(d) / len(d)
    slope = math.fsum(x * dc) / math.fsum(x * x)
    return dc - slope * x


def anisometry(instances: Sequence[Instance], solutions: Sequence[Solution], *,
               per_route: bool = False) -> AnisometryReport:
    """CV and max/min of edge lengths, and residual MAD of d_i against i.

    CV is computed over all edges of an instance and averaged over
    instances. max/min is taken per instance (or per route, averaged within
    the instance, with ``per_route=True``) and averaged over instances.
    MAD pools linear-fit residuals of every route and is expressed in units
    of the mean edge length of the batch.
    """
    cvs, ratios, residuals, all_edges = [], [], [], []
    for inst, sol in zip(instances, solutions):
        routes = [r for r in sol.routes if len(r) >= 3]
        if not routes:
            continue
        edges = [_edge_lengths(inst, r) for r in routes]
        pooled = np.concatenate(edges)
        all_edges.append(pooled)
        cvs.append(float(pooled.std() / pooled.mean()))
        if per_route:
            ratios.append(float(np.mean([e.max() / e[e > 0].min() for e in edges])))
        else:
            ratios.append(float(pooled.max() / pooled[pooled > 0].min()))
        for r, e in zip(routes, edges):
            residuals.append(_fit_residuals(np.concatenate(([0.0], np.cumsum(e)))))
    if not cvs:
        raise ValueError("no routes with at least two edges")
    res = np.concatenate(residuals)
    mad = float(np.median(np.abs(res - np.median(res))))
    return AnisometryReport(
        cv=float(np.mean(cvs)),
        max_min=float(np.mean(ratios)),
        mad=mad / float(np.concatenate(all_edges).mean()),
        n_instances=len(cvs),
    )


# -- angular entropy --------------------------------------------------------

def normalized_entropy(angles, bins: int = 36) -> float:
    """Shannon entropy of an angle histogram over [-pi, pi), divided by log(bins)."""
    a = np.asarray(angles, dtype=float)
    if a.size == 0:
        raise ValueError("no angles to histogram")
    idx = np.floor((a + np.pi) / (2 * np.pi) * bins).astype(np.int64)
    counts = np.bincount(np.clip(idx, 0, bins - 1), minlength=bins)
    p = counts[counts > 0] / a.size
    return max(0.0, float(-(p * np.log(p)).sum() / math.log(bins)))


def angular_entropy(instances: Sequence[Instance], solutions: Sequence[Solution],
                    k_range: Sequence[int] = range(2, 16), bins: int = 36) -> EntropyReport:
    """Entropy of depot angles of customers at route position k, pooled over the batch.

    Positions count the starting depot as 1, so k = 2 is the first customer.
    """
    by_k: dict[int, list[float]] = {k: [] for k in k_range}
    for inst, sol in zip(instances, solutions):
        theta, _ = depot_angles(inst)
        for r in sol.routes:
            for k in k_range:
                if k - 1 <= len(r) - 2:
                    by_k[k].append(float(theta[r[k - 1]]))
    per_k = {k: normalized_entropy(v, bins) for k, v in by_k.items() if v}
    if not per_k:
        raise ValueError("no route is long enough for the requested positions")
    vals = list(per_k.values())
    return EntropyReport(per_k, {k: len(v) for k, v in by_k.items()}, float(np.mean(vals)), float(np.min(vals)), bins)
