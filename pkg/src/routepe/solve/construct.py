"""Feasible starting solutions for each variant."""

from __future__ import annotations

from ..core import Instance, Solution, Variant
from ..errors import InfeasibleInstanceError
from ._routes import RouteOps, best_insertion


def _check_demands(inst: Instance) -> None:
    if inst.demands is None or inst.capacity is None:
        return
    too_big = [v for v in range(1, inst.n_nodes) if inst.demands[v] > inst.capacity]
    if too_big:
        raise InfeasibleInstanceError(f"customers {too_big} have demand above capacity {inst.capacity}")


def savings(inst: Instance) -> Solution:
    """Parallel Clarke-Wright savings under the capacity constraint."""
    _check_demands(inst)
    d = inst.dist_list
    dem = inst.demands.tolist()
    cap = inst.capacity
    n = inst.n_nodes
    routes: dict[int, list[int]] = {v: [v] for v in range(1, n)}
    owner = list(range(n))
    load = {v: dem[v] for v in range(1, n)}
    pairs = []
    for i in range(1, n):
        di0 = d[0][i]
        row = d[i]
        for j in range(i + 1, n):
            s = di0 + d[0][j] - row[j]
            if s > 0:
                pairs.append((-s, i, j))
    pairs.sort()
    for _, i, j in pairs:
        ri, rj = owner[i], owner[j]
        if ri == rj or load[ri] + load[rj] > cap:
            continue
        a, b = routes[ri], routes[rj]
        if a[-1] == i and b[0] == j:
            merged = a + b
        elif a[0] == i and b[-1] == j:
            merged = b + a
        elif a[-1] == i and b[-1] == j:
            merged = a + b[::-1]
        elif a[0] == i and b[0] == j:
            merged = a[::-1] + b
        else:
            continue
        routes[ri] = merged
        load[ri] += load.pop(rj)
        del routes[rj]
        for v in b:
            owner[v] = ri
    return Solution([[0] + routes[k] + [0] for k in sorted(routes)])


def deadline_insertion(inst: Instance) -> Solution:
    """Sequential cheapest insertion, customers taken by ascending due time."""
    _check_demands(inst)
    ops = RouteOps(inst)
    order = sorted(range(1, inst.n_nodes), key=lambda v: (ops.b[v], v))
    routes: list[list[int]] = []
    loads: list[int] = []
    profiles: list = []
    for c in order:
        best = best_insertion(ops, routes, c, loads, profiles)
        if best is None:
            raise InfeasibleInstanceError(f"customer {c} cannot be served within its window")
        _, ri, pos = best
        if ri < 0:
            routes.append([0, c, 0])
            loads.append(ops.dem[c])
            profiles.append(ops.tw_profile(routes[-1]))
        else:
            routes[ri].insert(pos, c)
            loads[ri] += ops.dem[c]
            profiles[ri] = ops.tw_profile(routes[ri])
    return Solution(routes)


def nearest_precedence(inst: Instance) -> Solution:
    """Nearest-neighbour tour that only visits a delivery after its pickup."""
    d = inst.dist_list
    unlocked = {p for p, _ in inst.pd_pairs}
    tour = [0]
    cur = 0
    while unlocked:
        nxt = min(unlocked, key=lambda v: (d[cur][v], v))
        unlocked.remove(nxt)
        tour.append(nxt)
        if nxt in inst.delivery_of:
            unlocked.add(inst.delivery_of[nxt])
        cur = nxt
    tour.append(0)
    if len(tour) != inst.n_nodes + 1:
        raise InfeasibleInstanceError("pickup/delivery pairs do not cover all customers")
    return Solution([tour])


def construct(inst: Instance) -> Solution:
    if inst.variant in (Variant.CVRP, Variant.PCVRP):
        return savings(inst)
    if inst.variant is Variant.VRPTW:
        return deadline_insertion(inst)
    return nearest_precedence(inst)
