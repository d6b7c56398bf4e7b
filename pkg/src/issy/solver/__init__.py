"""Symbolic game solving."""

from .accel import AccelLemma, accelerate_geometric
from .arena import Arena, Player, PlayerId, Subgame
from .attractor import AttractorResult, SolverOptions, attractor
from .region import Region, region_includes
from .solve import SolveOutcome, Verdict, parity_colors, solve, solve_portfolio

__all__ = ["AccelLemma", "Arena", "AttractorResult", "Player", "PlayerId", "Region", "SolveOutcome",
           "SolverOptions", "Subgame", "Verdict", "accelerate_geometric", "attractor", "parity_colors",
           "region_includes", "solve", "solve_portfolio"]
