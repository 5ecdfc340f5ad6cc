"""Routing solutions, heuristic solvers and positional encodings of routes."""

from .core import Instance, Solution, Variant, check_feasible, objective, solution_cost
from .errors import RoutePEError

__version__ = "0.1.0"

__all__ = ["Instance", "RoutePEError", "Solution", "Variant", "check_feasible", "objective",
           "solution_cost", "__version__"]
