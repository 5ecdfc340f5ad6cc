"""Route-level feasibility and cheapest-insertion helpers used by the solver."""

from __future__ import annotations

import math

import numpy as np

from ..core import Instance, Variant, schedule

# slack kept when testing window feasibility incrementally, so that the
# forward schedule used by check_feasible never disagrees by rounding
TW_MARGIN = 1e-9


class RouteOps:
    """Variant-aware feasibility checks bound to one instance."""

    def __init__(self, inst: Instance):
        self.inst = inst
        self.d = inst.dist_list
        self.variant = inst.variant
        self.has_cap = inst.variant is not Variant.PDTSP and inst.capacity is not None
        self.cap = inst.capacity if self.has_cap else 0
        self.dem = inst.demands.tolist() if inst.demands is not None else [0] * inst.n_nodes
        self.tw = inst.variant is Variant.VRPTW
        self.prec = inst.variant is Variant.PDTSP
        self.prize = inst.variant is Variant.PCVRP
        if self.tw:
            self.a = inst.windows[:, 0].tolist()
            self.b = inst.windows[:, 1].tolist()
            self.s = inst.service.tolist()
        self.pickup_of = inst.pickup_of
        self.delivery_of = inst.delivery_of
        self.prizes = inst.prizes.tolist() if inst.prizes is not None else None

    def load(self, route) -> int:
        dem = self.dem
        return sum(dem[v] for v in route[1:-1])

    def length(self, route) -> float:
        d = self.d
        return sum(d[route[k]][route[k + 1]] for k in range(len(route) - 1))

    def time_ok(self, route) -> bool:
        t = schedule(self.inst, route)
        b = self.b
        return all(t[k] <= b[route[k]] for k in range(1, len(route) - 1))

    def precedence_ok(self, route) -> bool:
        pos = {v: k for k, v in enumerate(route)}
        for dl, p in self.pickup_of.items():
            if dl in pos and p in pos and pos[p] > pos[dl]:
                return False
        return True

    def order_ok(self, route) -> bool:
        """Checks that depend on visit order (windows, precedence)."""
        if self.tw and not self.time_ok(route):
            return False
        if self.prec and not self.precedence_ok(route):
            return False
        return True

    def feasible(self, route) -> bool:
        if self.has_cap and self.load(route) > self.cap:
            return False
        return self.order_ok(route)

    # window bookkeeping for O(1) insertion tests
    def tw_profile(self, route) -> tuple[list[float], list[float]]:
        """Service starts and latest admissible starts along ``route``."""
        starts = schedule(self.inst, route)
        d, b, s = self.d, self.b, self.s
        latest = [math.inf] * len(route)
        for k in range(len(route) - 2, 0, -1):
            v, w = route[k], route[k + 1]
            latest[k] = min(b[v], latest[k + 1] - s[v] - d[v][w])
        return starts, latest


def insertion_candidates(ops: RouteOps, routes: list[list[int]], c: int, loads: list[int],
                         profiles: list | None = None):
    """Yield ``(delta, route_index, position)`` for every feasible insertion of ``c``.

    ``position`` is the index ``c`` would take in the route. A final
    candidate with ``route_index == -1`` stands for opening a new route
    (not offered for PDTSP).
    """
    d = ops.d
    dc = d[c]
    dem_c = ops.dem[c]
    for ri, r in enumerate(routes):
        if ops.has_cap and loads[ri] + dem_c > ops.cap:
            continue
        lo, hi = 0, len(r) - 1
        if ops.prec:
            p = ops.pickup_of.get(c)
            q = ops.delivery_of.get(c)
            if p is not None and p in r:
                lo = r.index(p)
            if q is not None and q in r:
                hi = min(hi, r.index(q))
        if ops.tw:
            starts, latest = profiles[ri]
            a, b, s = ops.a, ops.b, ops.s
            ac, bc, sc = a[c], b[c], s[c]
            for k in range(lo, hi):
                u, w = r[k], r[k + 1]
                tc = max(ac, starts[k] + s[u] + dc[u])
                if tc > bc - TW_MARGIN:
                    continue
                arr = tc + sc + dc[w]
                if max(a[w], arr) > latest[k + 1] - TW_MARGIN:
                    continue
                yield dc[u] + dc[w] - d[u][w], ri, k + 1
        else:
            for k in range(lo, hi):
                u, w = r[k], r[k + 1]
                yield dc[u] + dc[w] - d[u][w], ri, k + 1
    if not ops.prec:
        if ops.tw and max(ops.a[c], dc[0]) > ops.b[c]:
            return
        yield 2.0 * dc[0], -1, 1


def best_insertion(ops: RouteOps, routes, c, loads, profiles=None, noise: float = 0.0,
                   rng: np.random.Generator | None = None):
    """Cheapest (optionally noise-perturbed) feasible insertion of ``c``.

    Returns ``(true_delta, route_index, position)`` or ``None`` when no
    feasible position exists. With noise > 0 each candidate's detour is
    scaled by ``1 + noise * u`` with ``u ~ U[-1, 1]`` before comparison.
    """
    cands = list(insertion_candidates(ops, routes, c, loads, profiles))
    if not cands:
        return None
    if noise > 0.0 and rng is not None and len(cands) > 1:
        u = rng.uniform(-1.0, 1.0, size=len(cands)).tolist()
        best = min(range(len(cands)), key=lambda i: (cands[i][0] * (1.0 + noise * u[i]), i))
    else:
        best = min(range(len(cands)), key=lambda i: (cands[i][0], i))
    return cands[best]
