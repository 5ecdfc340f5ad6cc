import math

import numpy as np
import pytest
from conftest import make_cvrp
from oracles import exact_cvrp_optimum

from routepe.core import Instance, Solution, Variant, check_feasible, objective
from routepe.errors import ConfigError, InfeasibleInstanceError
from routepe.gen import GenConfig, gen_instance
from routepe.solve import (SearchConfig, construct, improve, local_search, recreate, ruin,
                           sa_accept, solve, solve_rng)
from routepe.solve._routes import RouteOps, best_insertion


def _instance(variant, n, seed, index=0):
    return gen_instance(GenConfig(variant, n, seed=seed, kappa=0.15 if variant == "pcvrp" else None), index)


def _served_once(inst, sol):
    served = sol.served()
    return len(served) == len(set(served))


# -- construction -----------------------------------------------------------

def test_single_customer():
    inst = make_cvrp([[0, 0], [0.5, 0.5]])
    assert construct(inst).routes == [[0, 1, 0]]


@pytest.mark.parametrize("variant", ["cvrp", "vrptw", "pdtsp"])
def test_construct_feasible(variant):
    for i in range(3):
        inst = _instance(variant, 100 if variant != "pdtsp" else 50, 7, i)
        assert check_feasible(inst, construct(inst)) == []


def test_pcvrp_construct_serves_everyone():
    inst = _instance("pcvrp", 60, 2)
    sol = construct(inst)
    assert check_feasible(inst, sol) == []
    assert sorted(sol.served()) == list(range(1, 61))


def test_demand_above_capacity_is_infeasible():
    inst = make_cvrp([[0, 0], [1, 0], [0, 1]], demands=[0, 3, 12], capacity=10)
    with pytest.raises(InfeasibleInstanceError):
        construct(inst)


def test_unreachable_window_is_infeasible():
    inst = Instance(Variant.VRPTW, [[0, 0], [1, 0]], demands=[0, 1], capacity=10,
                    windows=[[0, math.inf], [0, 0.5]], service=[0, 0.1])
    with pytest.raises(InfeasibleInstanceError):
        construct(inst)


def test_construct_within_30_percent_of_optimum_n8():
    for i in range(10):
        inst = _instance("cvrp", 8, 101, i)
        opt = exact_cvrp_optimum(inst.coords.tolist(), inst.demands.tolist(), inst.capacity)
        c = objective(inst, construct(inst))
        assert opt - 1e-9 <= c <= 1.3 * opt


# -- local search -----------------------------------------------------------

def test_local_search_fixed_point():
    inst = _instance("cvrp", 40, 3)
    once = local_search(inst, construct(inst))
    twice = local_search(inst, once)
    assert twice.routes == once.routes


def test_two_opt_uncrosses():
    # square visited as 1 -> 3 -> 2 -> 4 has two crossing edges
    inst = make_cvrp([[0.5, -1.0], [0, 0], [1, 0], [1, 1], [0, 1]])
    crossed = Solution([[0, 1, 3, 2, 4, 0]])
    out = local_search(inst, crossed)
    assert objective(inst, out) < objective(inst, crossed) - 1e-9
    assert out.routes in ([[0, 1, 4, 3, 2, 0]], [[0, 2, 3, 4, 1, 0]])


@pytest.mark.parametrize("variant", ["cvrp", "vrptw", "pcvrp", "pdtsp"])
def test_local_search_never_worse_and_feasible(variant):
    for i in range(3):
        inst = _instance(variant, 40, 17, i)
        start = construct(inst)
        out = local_search(inst, start)
        assert objective(inst, out) <= objective(inst, start) + 1e-12
        assert check_feasible(inst, out) == []
        assert _served_once(inst, out)


def test_local_search_between_optimum_and_construct_n8():
    for i in range(10):
        inst = _instance("cvrp", 8, 202, i)
        opt = exact_cvrp_optimum(inst.coords.tolist(), inst.demands.tolist(), inst.capacity)
        c0 = objective(inst, construct(inst))
        c1 = objective(inst, local_search(inst, construct(inst)))
        assert opt - 1e-9 <= c1 <= c0 + 1e-12


def test_pcvrp_drops_unprofitable_customer():
    inst = Instance(Variant.PCVRP, [[0, 0], [0.1, 0], [0.9, 0.9]], demands=[0, 1, 1], capacity=10,
                    prizes=[0, 1.0, 0.01])
    out = local_search(inst, Solution([[0, 1, 2, 0]]))
    assert out.routes == [[0, 1, 0]]


# -- acceptance rule --------------------------------------------------------

def test_sa_accepts_improvement_and_ties():
    rng = np.random.default_rng(0)
    assert all(sa_accept(10.0, 9.0, 0.5, rng) for _ in range(100))
    assert all(sa_accept(10.0, 10.0, 0.5, rng) for _ in range(100))


def test_sa_zero_sigma_rejects_worsening():
    rng = np.random.default_rng(0)
    assert sa_accept(1.0, 1.0, 0.0, rng)
    assert not any(sa_accept(1.0, 1.0 + 1e-12, 0.0, rng) for _ in range(100))


@pytest.mark.parametrize("sigma", [0.02, 1.0])
def test_sa_acceptance_rate_at_delta_sigma(sigma):
    rng = np.random.default_rng(1234)
    rate = np.mean([sa_accept(1.0, 1.0 + sigma, sigma, rng) for _ in range(100_000)])
    assert abs(rate - math.exp(-1)) < 0.01


def test_search_config_validation():
    with pytest.raises(ConfigError):
        SearchConfig(sigma=-1)
    with pytest.raises(ConfigError):
        SearchConfig(decay=0)


# -- ruin and recreate ------------------------------------------------------

def test_ruin_zero_is_identity():
    inst = _instance("cvrp", 30, 1)
    sol = construct(inst)
    partial, removed = ruin(inst, sol, 0, np.random.default_rng(0))
    assert partial.routes == sol.routes and removed == []


def test_ruin_whole_route_drops_it():
    inst = make_cvrp([[0, 0], [1, 0], [1.1, 0], [-1, 0], [-1.1, 0]])
    sol = Solution([[0, 1, 2, 0], [0, 3, 4, 0]])
    for seed in range(20):
        partial, removed = ruin(inst, sol, 2, np.random.default_rng(seed), max_string=2)
        assert len(partial.routes) == 1
        assert sorted(removed) in ([1, 2], [3, 4])


def test_ruin_too_large():
    inst = _instance("cvrp", 5, 1)
    with pytest.raises(ConfigError):
        ruin(inst, construct(inst), 6, np.random.default_rng(0))


def _is_string(route, removed_here):
    pos = sorted(route.index(v) for v in removed_here)
    return pos == list(range(pos[0], pos[0] + len(pos)))


def test_ruin_removes_contiguous_strings():
    inst = _instance("cvrp", 60, 4)
    sol = local_search(inst, construct(inst))
    rng = np.random.default_rng(5)
    for _ in range(200):
        size = int(rng.integers(1, 25))
        partial, removed = ruin(inst, sol, size, rng)
        assert len(removed) == size == len(set(removed))
        assert 0 not in removed
        assert sorted(partial.served() + removed) == list(range(1, 61))
        for r in sol.routes:
            here = [v for v in r if v in set(removed)]
            if here:
                assert _is_string(r, here)


def test_recreate_empty_is_identity():
    inst = _instance("cvrp", 20, 2)
    sol = construct(inst)
    assert recreate(inst, sol, [], 0.1, np.random.default_rng(0)).routes == sol.routes


def _scan_insertions(inst, routes, c):
    """Every position in every route plus a new route; returns the cheapest feasible."""
    d = inst.dist
    best = (2.0 * d[0, c], len(routes), 1)
    for ri, r in enumerate(routes):
        for k in range(1, len(r)):
            cand = r[:k] + [c] + r[k:]
            # the other routes are absent here, so "missing" entries are expected
            if all(v.kind == "missing" for v in check_feasible(inst, Solution([cand]))):
                delta = d[r[k - 1], c] + d[c, r[k]] - d[r[k - 1], r[k]]
                if delta < best[0] - 1e-12:
                    best = (delta, ri, k)
    return best


@pytest.mark.parametrize("variant", ["cvrp", "vrptw"])
def test_single_reinsertion_matches_exhaustive_scan(variant):
    for i in range(15):
        inst = _instance(variant, 25, 31, i)
        sol = local_search(inst, construct(inst))
        c = 1 + i
        partial = Solution([[v for v in r if v != c] for r in sol.routes])
        partial = Solution([r for r in partial.routes if len(r) > 2])
        out = recreate(inst, partial, [c], 0.0, np.random.default_rng(0))
        delta, ri, k = _scan_insertions(inst, partial.routes, c)
        expected = objective(inst, partial) + delta
        assert abs(objective(inst, out) - expected) < 1e-9
        if ri < len(partial.routes):
            assert out.routes[ri][k] == c


def test_best_insertion_respects_pdtsp_precedence():
    inst = _instance("pdtsp", 10, 3)
    ops = RouteOps(inst)
    sol = construct(inst)
    p, q = inst.pd_pairs[0]
    route = [v for v in sol.routes[0] if v != q]
    _, ri, pos = best_insertion(ops, [route], q, [0])
    assert pos > route.index(p)


@pytest.mark.parametrize("variant", ["cvrp", "vrptw", "pcvrp", "pdtsp"])
def test_recreate_feasible(variant):
    inst = _instance(variant, 50, 9)
    sol = local_search(inst, construct(inst))
    rng = np.random.default_rng(2)
    for _ in range(30):
        partial, removed = ruin(inst, sol, 10, rng)
        out = recreate(inst, partial, removed, 0.2, rng)
        assert check_feasible(inst, out) == []
        assert _served_once(inst, out)


# -- improve ----------------------------------------------------------------

def test_improve_budget_zero():
    inst = _instance("cvrp", 30, 1)
    sol = construct(inst)
    best, trace = improve(inst, sol, SearchConfig(budget=0))
    assert best.routes == sol.routes and trace == []


@pytest.mark.parametrize("variant", ["cvrp", "vrptw", "pcvrp", "pdtsp"])
def test_improve_telescoping_and_feasible(variant):
    for i in range(3):
        inst = _instance(variant, 40, 23, i)
        start = local_search(inst, construct(inst))
        best, trace = improve(inst, start, SearchConfig(budget=300, seed=i))
        c0, c1 = objective(inst, start), objective(inst, best)
        assert math.fsum(trace) == c0 - c1
        assert all(r >= 0 for r in trace)
        assert c1 <= c0
        assert check_feasible(inst, best) == []


def test_incumbent_is_monotone():
    inst = _instance("cvrp", 40, 5)
    start = construct(inst)
    _, trace = improve(inst, start, SearchConfig(budget=400, seed=3))
    incumbent = objective(inst, start) - np.cumsum(trace)
    assert np.all(np.diff(incumbent) <= 1e-12)


def test_solve_deterministic():
    inst = _instance("vrptw", 40, 8)
    a = solve(inst, SearchConfig(budget=200), solve_rng(1, 2))
    b = solve(inst, SearchConfig(budget=200), solve_rng(1, 2))
    assert a[0].routes == b[0].routes and a[1] == b[1]


def test_improve_beats_plain_local_search():
    inst = _instance("cvrp", 100, 77)
    base = objective(inst, local_search(inst, construct(inst)))
    sol, _ = solve(inst, SearchConfig(budget=1000, seed=1))
    assert objective(inst, sol) <= base
