"""Heuristic solver: construction, local search and annealed ruin-and-recreate."""

from __future__ import annotations

import numpy as np

from ..core import Instance, Solution, objective
from .construct import construct
from .lns import SearchConfig, improve, recreate, ruin, sa_accept
from .local_search import local_search

__all__ = ["SearchConfig", "construct", "improve", "local_search", "recreate", "ruin",
           "sa_accept", "solve", "solve_rng"]


def solve_rng(seed: int, key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(key)]))


def solve(inst: Instance, cfg: SearchConfig, rng: np.random.Generator | None = None
          ) -> tuple[Solution, list[float]]:
    """construct -> local_search -> improve -> local_search.

    The returned trace covers the ``improve`` phase only.
    """
    sol = local_search(inst, construct(inst))
    if cfg.budget > 0:
        sol, trace = improve(inst, sol, cfg, rng)
        polished = local_search(inst, sol)
        if objective(inst, polished) < objective(inst, sol):
            sol = polished
    else:
        trace = []
    return sol, trace
