"""Exact clique-coloring solvers over tree and branch decompositions."""
from .graph import Coloring, Graph, GuardError, brute_force_solve, is_clique_coloring, maximal_cliques

__all__ = ["Coloring", "Graph", "GuardError", "brute_force_solve", "is_clique_coloring", "maximal_cliques"]
