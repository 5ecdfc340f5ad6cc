"""Ruin-and-recreate improvement with simulated-annealing acceptance."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from ..core import Instance, Solution, Variant, objective, reward
from ..errors import ConfigError
from ._routes import RouteOps, best_insertion


@dataclass(frozen=True)
class SearchConfig:
    """Settings of :func:`improve`.

    ``budget`` counts ruin-recreate iterations; ``time_limit`` (seconds)
    optionally stops earlier, at the cost of run-to-run determinism.
    The temperature starts at ``sigma`` and is multiplied by ``decay`` after
    every iteration.
    """

    budget: int = 20000
    sigma: float = 0.02
    decay: float = 0.9995
    ruin_size: int = 10
    max_string: int = 6
    recreate_noise: float = 0.1
    seed: int = 0
    time_limit: float | None = None

    def __post_init__(self):
        if self.budget < 0:
            raise ConfigError("budget must be non-negative")
        if self.sigma < 0:
            raise ConfigError("sigma must be non-negative")
        if not 0 < self.decay <= 1:
            raise ConfigError("decay must lie in (0, 1]")
        if self.ruin_size < 0 or self.max_string < 1:
            raise ConfigError("ruin_size must be >= 0 and max_string >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


def sa_accept(old_cost: float, new_cost: float, sigma: float, rng: np.random.Generator) -> bool:
    """Metropolis rule: accept with probability min(1, exp(-(new - old) / sigma)).

    ``sigma == 0`` accepts only non-worsening candidates.
    """
    delta = new_cost - old_cost
    if delta <= 0.0:
        return True
    if sigma <= 0.0:
        return False
    return bool(rng.random() < math.exp(-delta / sigma))


def ruin(inst: Instance, sol: Solution, ruin_size: int, rng: np.random.Generator,
         max_string: int = 6) -> tuple[Solution, list[int]]:
    """Remove ``ruin_size`` customers as contiguous strings near a random anchor.

    Routes are visited in order of their customers' distance to the anchor
    and each contributes at most one string (an interval of its interior).
    Strings are grown in place if the per-route cap leaves customers to
    remove. Routes emptied completely are dropped, except for the single
    PDTSP tour.
    """
    if ruin_size == 0:
        return sol.copy(), []
    routes = [list(r) for r in sol.routes]
    owner = {v: ri for ri, r in enumerate(routes) for v in r[1:-1]}
    served = [v for r in routes for v in r[1:-1]]
    if ruin_size > len(served):
        raise ConfigError(f"ruin_size {ruin_size} exceeds {len(served)} served customers")

    anchor = served[int(rng.integers(len(served)))]
    by_dist = np.argsort(inst.dist[anchor], kind="stable")
    spans: dict[int, list[int]] = {}
    remaining = ruin_size
    for c in by_dist.tolist():
        if remaining == 0:
            break
        ri = owner.get(c)
        if ri is None or ri in spans:
            continue
        r = routes[ri]
        n_cust = len(r) - 2
        length = min(remaining, n_cust, max_string)
        k = r.index(c)
        start = int(rng.integers(max(1, k - length + 1), min(k, n_cust - length + 1) + 1))
        spans[ri] = [start, start + length]
        remaining -= length
    while remaining > 0:
        for ri in sorted(spans):
            if remaining == 0:
                break
            lo, hi = spans[ri]
            if hi < len(routes[ri]) - 1:
                spans[ri][1] += 1
                remaining -= 1
            elif lo > 1:
                spans[ri][0] -= 1
                remaining -= 1

    removed: list[int] = []
    out = []
    for ri, r in enumerate(routes):
        if ri in spans:
            lo, hi = spans[ri]
            removed.extend(r[lo:hi])
            r = r[:lo] + r[hi:]
            if len(r) == 2 and inst.variant is not Variant.PDTSP:
                continue
        out.append(r)
    return Solution(out), removed


def recreate(inst: Instance, partial: Solution, removed: list[int], noise: float,
             rng: np.random.Generator) -> Solution:
    """Randomized greedy repair.

    Customers are reinserted in random order, each at its cheapest feasible
    position after perturbing detours by ``noise``. PCVRP customers whose
    chosen detour is not below their prize stay unserved.
    """
    if not removed:
        return partial.copy()
    ops = RouteOps(inst)
    routes = [list(r) for r in partial.routes]
    loads = [ops.load(r) for r in routes]
    profiles = [ops.tw_profile(r) for r in routes] if ops.tw else None
    order = [removed[i] for i in rng.permutation(len(removed))]
    for c in order:
        best = best_insertion(ops, routes, c, loads, profiles, noise, rng)
        if best is None:
            raise ConfigError(f"customer {c} has no feasible insertion")
        delta, ri, pos = best
        if ops.prize and delta >= ops.prizes[c]:
            continue
        if ri < 0:
            routes.append([0, c, 0])
            loads.append(ops.dem[c])
            if ops.tw:
                profiles.append(ops.tw_profile(routes[-1]))
        else:
            routes[ri].insert(pos, c)
            loads[ri] += ops.dem[c]
            if ops.tw:
                profiles[ri] = ops.tw_profile(routes[ri])
    return Solution(routes)


def improve(inst: Instance, sol: Solution, cfg: SearchConfig,
            rng: np.random.Generator | None = None) -> tuple[Solution, list[float]]:
    """Annealed ruin-and-recreate; returns the incumbent and per-step rewards.

    Each step's reward is the improvement of the candidate over the
    incumbent, so the rewards sum to ``cost(start) - cost(best)``.
    """
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    current = sol.copy()
    cur_cost = objective(inst, current)
    best, best_cost = current, cur_cost
    temp = cfg.sigma
    trace: list[float] = []
    deadline = None if cfg.time_limit is None else time.monotonic() + cfg.time_limit
    prize = inst.variant is Variant.PCVRP
    for _ in range(cfg.budget):
        if deadline is not None and time.monotonic() > deadline:
            break
        n_served = sum(len(r) - 2 for r in current.routes)
        size = min(cfg.ruin_size, n_served)
        partial, removed = ruin(inst, current, size, rng, cfg.max_string)
        if prize:
            on_route = set(removed).union(partial.served())
            removed = removed + [v for v in range(1, inst.n_nodes) if v not in on_route]
        cand = recreate(inst, partial, removed, cfg.recreate_noise, rng)
        cand_cost = objective(inst, cand)
        if sa_accept(cur_cost, cand_cost, temp, rng):
            current, cur_cost = cand, cand_cost
        trace.append(reward(best_cost, cand_cost))
        if cand_cost < best_cost:
            best, best_cost = cand, cand_cost
        temp *= cfg.decay
    return best.copy(), trace
