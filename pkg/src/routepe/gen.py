"""Seeded instance generation for CVRP, VRPTW, PCVRP and PDTSP.

Every instance draws from its own stream,
``numpy.random.default_rng(SeedSequence([seed, index]))``, so a batch can be
generated in any order or in parallel with identical results. Draw order
within a stream: depot, customer coordinates, demands, then variant fields
(VRPTW: service, window length, window start; PCVRP: prize multipliers).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from fractions import Fraction

import numpy as np

from .core import Instance, Variant
from .errors import ConfigError


@dataclass(frozen=True)
class GenConfig:
    variant: Variant | str = Variant.CVRP
    n: int = 100
    layout: str = "uniform"
    seed: int = 0
    kappa: float | None = None
    cluster_count: int = 5
    cluster_sigma: float = 0.05
    horizon: float = 3.0

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.layout not in ("uniform", "clustered"):
            raise ConfigError(f"unknown layout {self.layout!r}")
        if self.layout == "clustered" and self.cluster_count < 1:
            raise ConfigError("cluster_count must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["variant"] = self.variant.value
        return d


def capacity_for(n: int) -> int:
    """Size-dependent vehicle capacity, evaluated in exact arithmetic."""
    if n > 1000:
        # 33.3 == 333/10
        return 30 + math.floor(Fraction(1000, 5) + Fraction(n - 1000) * Fraction(10, 333))
    if n > 20:
        return 30 + n // 5
    return 30


def instance_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def _uniform_coords(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.uniform(0.0, 1.0, size=(n, 2))


def _clustered_coords(rng: np.random.Generator, n: int, k: int, sigma: float) -> np.ndarray:
    centers = rng.uniform(0.2, 0.8, size=(k, 2))
    labels = rng.integers(0, k, size=n)
    pts = np.empty((n, 2))
    for i, c in enumerate(labels):
        while True:
            p = centers[c] + sigma * rng.standard_normal(2) if sigma > 0 else centers[c].copy()
            if (p >= 0).all() and (p <= 1).all():
                pts[i] = p
                break
    return pts


def gen_clustered(cfg: GenConfig, index: int = 0) -> Instance:
    """Clustered layout: Gaussian blobs around centers drawn in [0.2, 0.8]^2."""
    return gen_instance(replace(cfg, layout="clustered"), index)


def gen_instance(cfg: GenConfig, index: int = 0) -> Instance:
    variant = cfg.variant
    if variant is Variant.PCVRP and cfg.kappa is None:
        raise ConfigError("PCVRP generation requires kappa")
    rng = instance_rng(cfg.seed, index)
    n_cust = 2 * cfg.n if variant is Variant.PDTSP else cfg.n

    depot = rng.uniform(0.0, 1.0, size=(1, 2))
    if cfg.layout == "clustered":
        cust = _clustered_coords(rng, n_cust, cfg.cluster_count, cfg.cluster_sigma)
    else:
        cust = _uniform_coords(rng, n_cust)
    coords = np.vstack([depot, cust])
    name = f"{variant.value}_{cfg.n}_{cfg.seed}_{index}"
    meta = {"generator": cfg.to_dict(), "index": int(index)}

    if variant is Variant.PDTSP:
        pairs = [(i, i + cfg.n) for i in range(1, cfg.n + 1)]
        return Instance(variant, coords, pd_pairs=pairs, name=name, meta=meta)

    demands = np.concatenate(([0], rng.integers(1, 10, size=cfg.n)))
    capacity = capacity_for(cfg.n)
    inst = Instance(variant, coords, demands=demands, capacity=capacity, name=name, meta=meta)

    if variant is Variant.VRPTW:
        service = rng.uniform(0.15, 0.18, size=cfg.n)
        length = rng.uniform(0.18, 0.20, size=cfg.n)
        u = rng.uniform(0.0, 1.0, size=cfg.n)
        tau = np.hypot(*(cust - depot[0]).T)
        lo = tau
        # latest start that still lets the vehicle return by the horizon
        hi = np.maximum(lo, cfg.horizon - length - service - tau)
        start = lo + u * (hi - lo)
        windows = np.vstack([[0.0, math.inf], np.column_stack([start, start + length])])
        inst.windows = windows
        inst.service = np.concatenate(([0.0], service))
    elif variant is Variant.PCVRP:
        xi = rng.uniform(0.8, 1.2, size=cfg.n)
        inst.prizes = np.concatenate(([0.0], cfg.kappa * xi * demands[1:]))
    return inst


def gen_batch(cfg: GenConfig, count: int, start: int = 0) -> list[Instance]:
    return [gen_instance(cfg, i) for i in range(start, start + count)]


def greedy_prize_fraction(inst: Instance) -> float:
    """Fraction of customers a greedy oracle chooses to serve.

    Customers are considered in descending prize order and inserted at their
    cheapest capacity-feasible position (or on a new route) iff the prize
    strictly exceeds the insertion detour.
    """
    d = inst.dist_list
    dem = inst.demands
    cap = inst.capacity
    prizes = inst.prizes
    order = sorted(range(1, inst.n_nodes), key=lambda v: (-prizes[v], v))
    routes: list[list[int]] = []
    loads: list[int] = []
    served = 0
    for c in order:
        best = 2.0 * d[0][c]
        where = None
        for ri, r in enumerate(routes):
            if loads[ri] + dem[c] > cap:
                continue
            for k in range(len(r) - 1):
                a, b = r[k], r[k + 1]
                delta = d[a][c] + d[c][b] - d[a][b]
                if delta < best:
                    best, where = delta, (ri, k + 1)
        if prizes[c] > best:
            served += 1
            if where is None:
                routes.append([0, c, 0])
                loads.append(int(dem[c]))
            else:
                routes[where[0]].insert(where[1], c)
                loads[where[0]] += int(dem[c])
    return served / inst.n_customers


def calibrate_kappa(n: int, seed: int, target_fraction: float = 0.5, *,
                    n_instances: int = 20, tol: float = 0.01, max_iter: int = 60) -> float:
    """Bisect the prize scale so the greedy oracle serves ``target_fraction``.

    The served fraction is averaged over ``n_instances`` seeded instances.
    """
    if not 0 < target_fraction < 1:
        raise ConfigError("target_fraction must lie in (0, 1)")
    base = [gen_instance(GenConfig(Variant.PCVRP, n=n, seed=seed, kappa=1.0), i) for i in range(n_instances)]
    unit_prizes = [b.prizes.copy() for b in base]

    def served(kappa: float) -> float:
        for inst, p in zip(base, unit_prizes):
            inst.prizes = kappa * p
        return float(np.mean([greedy_prize_fraction(inst) for inst in base]))

    lo, hi = 0.0, 0.01
    while served(hi) < target_fraction:
        lo, hi = hi, hi * 2
        if hi > 1e6:
            raise ConfigError("could not bracket kappa")
    mid = hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f = served(mid)
        if abs(f - target_fraction) <= tol:
            break
        if f < target_fraction:
            lo = mid
        else:
            hi = mid
    return mid
