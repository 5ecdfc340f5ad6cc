"""Domain types, distances, costs and feasibility checks.

Node 0 is always the depot. Per-node arrays (demands, windows, service
times, prizes) are stored with a depot entry at index 0 so that they can be
indexed directly by node id.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import StructuralError

Route = list[int]


class Variant(str, enum.Enum):
    CVRP = "cvrp"
    VRPTW = "vrptw"
    PCVRP = "pcvrp"
    PDTSP = "pdtsp"

    @classmethod
    def parse(cls, value: "str | Variant") -> "Variant":
        if isinstance(value, Variant):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            from .errors import ConfigError

            raise ConfigError(f"unknown variant {value!r}") from None


@dataclass(eq=False)
class Instance:
    """A routing instance on the unit square.

    ``windows`` has shape (N+1, 2); the depot row is ``(0, inf)``.
    ``pd_pairs`` lists ``(pickup, delivery)`` node pairs for PDTSP.
    """

    variant: Variant
    coords: np.ndarray
    demands: np.ndarray | None = None
    capacity: int | None = None
    windows: np.ndarray | None = None
    service: np.ndarray | None = None
    prizes: np.ndarray | None = None
    pd_pairs: list[tuple[int, int]] | None = None
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.variant = Variant.parse(self.variant)
        self.coords = np.asarray(self.coords, dtype=float).reshape(-1, 2)
        if self.demands is not None:
            self.demands = np.asarray(self.demands, dtype=np.int64)
        if self.windows is not None:
            self.windows = np.asarray(self.windows, dtype=float).reshape(-1, 2)
        if self.service is not None:
            self.service = np.asarray(self.service, dtype=float)
        if self.prizes is not None:
            self.prizes = np.asarray(self.prizes, dtype=float)
        if self.pd_pairs is not None:
            self.pd_pairs = [(int(p), int(d)) for p, d in self.pd_pairs]

    @property
    def n_nodes(self) -> int:
        return len(self.coords)

    @property
    def n_customers(self) -> int:
        return len(self.coords) - 1

    @cached_property
    def dist(self) -> np.ndarray:
        """Full Euclidean distance matrix (N+1, N+1)."""
        diff = self.coords[:, None, :] - self.coords[None, :, :]
        return np.hypot(diff[..., 0], diff[..., 1])

    @cached_property
    def dist_list(self) -> list[list[float]]:
        # plain nested lists are much faster than numpy for scalar lookups
        return self.dist.tolist()

    @cached_property
    def delivery_of(self) -> dict[int, int]:
        return {p: d for p, d in (self.pd_pairs or [])}

    @cached_property
    def pickup_of(self) -> dict[int, int]:
        return {d: p for p, d in (self.pd_pairs or [])}


@dataclass
class Solution:
    """A set of depot-anchored routes; PDTSP uses exactly one tour."""

    routes: list[Route]

    def copy(self) -> "Solution":
        return Solution([list(r) for r in self.routes])

    def served(self) -> list[int]:
        return [v for r in self.routes for v in r[1:-1]]


@dataclass(frozen=True)
class CostBreakdown:
    travel: float
    prize_collected: float
    objective: float


@dataclass(frozen=True)
class Violation:
    kind: str
    route: int | None = None
    node: int | None = None
    message: str = ""


def euclid(a: Sequence[float], b: Sequence[float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def validate_route(route: Sequence[int], n_nodes: int | None = None) -> None:
    """Raise StructuralError unless ``route`` is a closed depot-anchored route."""
    if len(route) < 2:
        raise StructuralError(f"route too short: {list(route)}")
    if route[0] != 0 or route[-1] != 0:
        raise StructuralError(f"route must start and end at the depot: {list(route)}")
    interior = route[1:-1]
    if 0 in interior:
        raise StructuralError(f"interior depot visit in route: {list(route)}")
    if n_nodes is not None and any(not (0 < v < n_nodes) for v in interior):
        raise StructuralError(f"node index out of range in route: {list(route)}")


def route_length(inst: Instance, route: Sequence[int]) -> float:
    d = inst.dist_list
    return math.fsum(d[route[k]][route[k + 1]] for k in range(len(route) - 1))


def solution_cost(inst: Instance, sol: Solution) -> CostBreakdown:
    travel = 0.0
    prize = 0.0
    for r in sol.routes:
        validate_route(r, inst.n_nodes)
        travel += route_length(inst, r)
    if inst.variant is Variant.PCVRP:
        prizes = inst.prizes
        prize = math.fsum(float(prizes[v]) for r in sol.routes for v in r[1:-1])
        return CostBreakdown(travel, prize, travel - prize)
    return CostBreakdown(travel, 0.0, travel)


def objective(inst: Instance, sol: Solution) -> float:
    return solution_cost(inst, sol).objective


def schedule(inst: Instance, route: Sequence[int]) -> list[float]:
    """Service start times along ``route`` with waiting allowed.

    t_j = max(a_j, t_i + s_i + tau_ij); the depot departs at time 0.
    """
    d = inst.dist_list
    win = inst.windows
    svc = inst.service
    t = [0.0]
    for k in range(1, len(route)):
        i, j = route[k - 1], route[k]
        arrive = t[-1] + (float(svc[i]) if svc is not None else 0.0) + d[i][j]
        start = max(float(win[j, 0]), arrive) if win is not None else arrive
        t.append(start)
    return t


def check_feasible(inst: Instance, sol: Solution) -> list[Violation]:
    """Return every constraint violation; an empty list means feasible."""
    out: list[Violation] = []
    variant = inst.variant
    n = inst.n_nodes
    seen: dict[int, int] = {}
    for ri, r in enumerate(sol.routes):
        try:
            validate_route(r, n)
        except StructuralError as exc:
            out.append(Violation("structure", ri, None, str(exc)))
            continue
        for v in r[1:-1]:
            if v in seen:
                out.append(Violation("duplicate", ri, v, f"customer {v} visited more than once"))
            else:
                seen[v] = ri
        if variant is not Variant.PDTSP and inst.capacity is not None and inst.demands is not None:
            load = int(sum(int(inst.demands[v]) for v in r[1:-1]))
            if load > inst.capacity:
                out.append(Violation("capacity", ri, None, f"load {load} exceeds capacity {inst.capacity}"))
        if variant is Variant.VRPTW:
            times = schedule(inst, r)
            for k in range(1, len(r) - 1):
                v = r[k]
                if times[k] > inst.windows[v, 1]:
                    out.append(Violation("time_window", ri, v,
                                         f"service at {times[k]:.6g} after due {inst.windows[v, 1]:.6g}"))
        if variant is Variant.PDTSP:
            pos = {v: k for k, v in enumerate(r)}
            for p, dl in inst.pd_pairs or []:
                if p in pos and dl in pos and pos[dl] < pos[p]:
                    out.append(Violation("precedence", ri, dl, f"delivery {dl} before pickup {p}"))
    if variant is Variant.PDTSP and len(sol.routes) != 1:
        out.append(Violation("route_count", None, None, f"PDTSP needs one tour, got {len(sol.routes)}"))
    if variant is not Variant.PCVRP:
        for v in range(1, n):
            if v not in seen:
                out.append(Violation("missing", None, v, f"customer {v} not served"))
    return out


def cumulative_distances(inst: Instance, route: Sequence[int]) -> np.ndarray:
    """Cumulative travel distance d_i along ``route``; d_1 = 0, d_L = route length."""
    if len(route) < 2:
        raise StructuralError("route must have at least two nodes")
    c = inst.coords[list(route)]
    steps = np.hypot(*(c[1:] - c[:-1]).T)
    return np.concatenate(([0.0], np.cumsum(steps)))


def depot_angles(inst: Instance) -> tuple[np.ndarray, np.ndarray]:
    """Depot-anchored polar angle per node in [-pi, pi).

    Returns ``(theta, degenerate)``. The depot row and any customer located
    exactly at the depot get theta = 0 and ``degenerate = True``.
    """
    rel = inst.coords - inst.coords[0]
    theta = np.arctan2(rel[:, 1], rel[:, 0])
    theta[theta >= math.pi] = -math.pi
    degenerate = (rel[:, 0] == 0.0) & (rel[:, 1] == 0.0)
    theta[degenerate] = 0.0
    if degenerate[1:].any():
        warnings.warn(f"{int(degenerate[1:].sum())} customer(s) coincide with the depot; angle set to 0",
                      RuntimeWarning, stacklevel=2)
    return theta, degenerate


def reward(incumbent_cost: float, new_cost: float) -> float:
    """Improvement over the incumbent; zero unless a new incumbent is found."""
    return incumbent_cost - min(new_cost, incumbent_cost)
