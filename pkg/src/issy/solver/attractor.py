"""Attractor fixpoints with an acceleration hook."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from ..terms import mk_or
from .accel import AccelLemma, accelerate_geometric
from .arena import Arena, Player, Subgame
from .region import Region, region_includes

log = logging.getLogger(__name__)


@dataclass
class SolverOptions:
    accel: str = "geometric"  # "geometric" | "none"
    accel_every: int = 3
    budget: int = 100
    epsilon: Fraction = Fraction(1, 2)
    timeout: float | None = None
    max_candidates: int = 12

    def __post_init__(self):
        if self.accel not in ("geometric", "none"):
            raise ValueError(f"unknown acceleration mode '{self.accel}'")
        if self.budget < 1 or self.accel_every < 1:
            raise ValueError("budget and acceleration cadence must be positive")
        self.epsilon = Fraction(self.epsilon)
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


@dataclass
class AttractorResult:
    region: Region
    layers: list[Region]
    converged: bool
    iterations: int
    lemmas: list[AccelLemma] = field(default_factory=list)
    lemma_layers: dict[int, AccelLemma] = field(default_factory=dict)

    def __iter__(self):  # (region, layers) unpacking
        return iter((self.region, self.layers))


def attractor(arena: Arena, player: Player, target: Region, opts: SolverOptions | None = None,
              sub: Subgame | None = None) -> AttractorResult:
    """Least fixpoint of X ↦ target ∨ cpre(X) inside ``sub``.

    Every ``accel_every`` iterations each location that is not fully covered
    gets an acceleration attempt. ``layers[k]`` is the region after step k;
    steps produced by a lemma are listed in ``lemma_layers``."""
    opts = opts or SolverOptions()
    sub = sub or arena.full()
    A = Region({loc: arena.simp(t) for loc, t in target.inter(sub.S).items()})
    layers = [A]
    res = AttractorResult(A, layers, False, 0)
    for it in range(1, opts.budget + 1):
        arena.check_time()
        res.iterations = it
        pre = arena.cpre(player, A, sub)
        new = Region({loc: arena.simp(mk_or(A[loc], pre[loc])) for loc in sub.S})
        if region_includes(A, new, arena.session, sub.S) is True:
            res.converged = True
            break
        A = new
        layers.append(A)
        if opts.accel == "geometric" and it % opts.accel_every == 0:
            A = _accelerate_all(arena, player, target, A, sub, opts, res)
    res.region = A
    return res


def _accelerate_all(arena, player, target, A, sub, opts, res) -> Region:
    for loc in list(sub.S):
        if arena.session.check_implies(sub.S[loc], A[loc]) is True:
            continue
        lemma = accelerate_geometric(arena, player, loc, target, A, sub, opts.epsilon, opts.max_candidates)
        if lemma is None:
            continue
        A = Region({**A.as_dict(), loc: arena.simp(mk_or(A[loc], lemma.conclusion))})
        res.layers.append(A)
        res.lemmas.append(lemma)
        res.lemma_layers[len(res.layers) - 1] = lemma
    return A
