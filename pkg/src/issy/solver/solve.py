"""Realizability: safety and reachability fixpoints, lifted Zielonka for parity."""

from __future__ import annotations

import enum
import logging
import threading
import time
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field, replace

from ..errors import BackendError
from ..game import SymbolicGame
from ..smt import SmtSession
from ..spec import WinCond
from ..terms import FALSE, mk_and, mk_not
from .accel import AccelLemma
from .arena import Arena, Player, SolverInterrupted, Subgame
from .attractor import AttractorResult, SolverOptions, attractor
from .region import Region, region_includes

log = logging.getLogger(__name__)


class Verdict(enum.Enum):
    REALIZABLE = "Realizable"
    UNREALIZABLE = "Unrealizable"
    UNKNOWN = "Unknown"


@dataclass
class SolveOutcome:
    verdict: Verdict
    system_region: Region
    reason: str | None = None  # budget | timeout | backend for Unknown
    layers: list[Region] = field(default_factory=list)
    lemmas: list[AccelLemma] = field(default_factory=list)
    lemma_layers: dict[int, AccelLemma] = field(default_factory=dict)
    objective: WinCond | None = None
    iterations: int = 0
    seconds: float = 0.0
    config: str = ""

    @property
    def realizable(self) -> bool:
        return self.verdict is Verdict.REALIZABLE

    def describe(self) -> str:
        if self.verdict is Verdict.UNKNOWN:
            return f"UNKNOWN({self.reason})"
        return self.verdict.value.upper()


def _covers_initial(arena: Arena, region: Region):
    g = arena.game
    return arena.session.check_implies(g.domain(g.initial), region[g.initial])


def _solve_safety(arena: Arena, opts: SolverOptions) -> SolveOutcome:
    g = arena.game
    safe = Region({loc.name: loc.domain for loc in g.locations if loc.color > 0})
    X = Region({k: arena.simp(v) for k, v in safe.items()})
    layers = [X]
    for it in range(1, opts.budget + 1):
        arena.check_time()
        pre = arena.cpre(Player.SYSTEM, X)
        nX = Region({loc: arena.simp(mk_and(safe[loc], pre[loc])) for loc in safe})
        layers.append(nX)
        if region_includes(nX, X, arena.session, g.names) is True:
            exact = arena.exact
            verdict = _verdict(arena, nX, exact)
            return SolveOutcome(verdict, nX, None if verdict is not Verdict.UNKNOWN else "backend",
                                layers, objective=g.objective, iterations=it)
        X = nX
        # every iterate over-approximates the winning region
        if _covers_initial(arena, X) is False and arena.exact:
            return SolveOutcome(Verdict.UNREALIZABLE, X, None, layers, objective=g.objective, iterations=it)
    return SolveOutcome(Verdict.UNKNOWN, X, "budget", layers, objective=g.objective, iterations=opts.budget)


def _verdict(arena: Arena, W: Region, exact: bool) -> Verdict:
    c = _covers_initial(arena, W)
    if c is True:
        return Verdict.REALIZABLE
    if c is False and exact:
        return Verdict.UNREALIZABLE
    return Verdict.UNKNOWN


def _solve_reachability(arena: Arena, opts: SolverOptions) -> SolveOutcome:
    g = arena.game
    target = Region({loc.name: loc.domain for loc in g.locations if loc.color > 0})
    res = attractor(arena, Player.SYSTEM, target, opts)
    out = SolveOutcome(Verdict.UNKNOWN, res.region, "budget", res.layers, res.lemmas, res.lemma_layers,
                       g.objective, res.iterations)
    c = _covers_initial(arena, res.region)
    if c is True:  # the region under-approximates the attractor in any case
        out.verdict, out.reason = Verdict.REALIZABLE, None
    elif res.converged and arena.exact and c is False:
        out.verdict, out.reason = Verdict.UNREALIZABLE, None
    elif res.converged:
        out.reason = "backend"
    return out


# --------------------------------------------------------------------------
# parity


def parity_colors(g: SymbolicGame) -> dict[str, int]:
    """Location colors under max-odd parity for the non-safety objectives."""
    if g.objective is WinCond.BUECHI:
        return {loc.name: 1 if loc.color > 0 else 0 for loc in g.locations}
    if g.objective is WinCond.COBUECHI:
        return {loc.name: 1 if loc.color > 0 else 2 for loc in g.locations}
    return {loc.name: loc.color for loc in g.locations}


class _Zielonka:
    def __init__(self, arena: Arena, colors: dict[str, int], opts: SolverOptions):
        self.a, self.colors, self.opts = arena, colors, opts
        self.exact = True
        self.iterations = 0
        self.lemmas: list[AccelLemma] = []

    def attr(self, player: Player, target: Region, sub: Subgame) -> Region:
        res: AttractorResult = attractor(self.a, player, target, self.opts, sub)
        self.iterations += res.iterations
        self.lemmas += res.lemmas
        if not res.converged:
            self.exact = False
        return res.region

    def solve(self, sub: Subgame) -> tuple[Region, Region]:
        """Winning regions (system, environment) of the sub-game."""
        a = self.a
        a.check_time()
        if not list(sub.S):
            return Region(), Region()
        d = max(self.colors[loc] for loc in sub.S)
        alpha = Player.SYSTEM if d % 2 == 1 else Player.ENVIRONMENT
        U = Region({loc: sub.S[loc] for loc in sub.S if self.colors[loc] == d})
        A = self.attr(alpha, U, sub)
        sub1 = a.remove(sub, alpha, A)
        W1 = self.solve(sub1)
        w_opp1 = W1[1] if alpha is Player.SYSTEM else W1[0]
        if all(a.is_empty(w_opp1[loc]) for loc in w_opp1):
            return (sub.S, Region()) if alpha is Player.SYSTEM else (Region(), sub.S)
        B = self.attr(alpha.opponent, w_opp1, sub)
        sub2 = a.remove(sub, alpha.opponent, B)
        W2 = self.solve(sub2)
        if alpha is Player.SYSTEM:
            return W2[0], W2[1].union(B)
        return W2[0].union(B), W2[1]


def _solve_parity(arena: Arena, opts: SolverOptions) -> SolveOutcome:
    g = arena.game
    z = _Zielonka(arena, parity_colors(g), opts)
    full = arena.full()
    # positions from which the environment forces a system dead end are lost
    dead = z.attr(Player.ENVIRONMENT, Region(), full)
    sub = arena.remove(full, Player.ENVIRONMENT, dead)
    W_sys, _ = z.solve(sub)
    exact = z.exact and arena.exact
    verdict = _verdict(arena, W_sys, exact)
    if verdict is Verdict.REALIZABLE and not exact:
        verdict = Verdict.UNKNOWN  # under inexact attractors the partition is not trustworthy
    reason = None if verdict is not Verdict.UNKNOWN else ("budget" if not z.exact else "backend")
    return SolveOutcome(verdict, W_sys, reason, [], z.lemmas, {}, g.objective, z.iterations)


def solve(g: SymbolicGame, opts: SolverOptions | None = None, session: SmtSession | None = None,
          cancel: threading.Event | None = None) -> SolveOutcome:
    """Decide whether the system wins from every initial valuation."""
    opts = opts or SolverOptions()
    own = session is None
    t0 = time.monotonic()
    deadline = t0 + opts.timeout if opts.timeout else None
    session = session or SmtSession(deadline=deadline)
    if deadline is not None and session.deadline is None:
        session.deadline = deadline
    arena = Arena(g, session, deadline, cancel)
    try:
        if g.objective is WinCond.SAFETY:
            out = _solve_safety(arena, opts)
        elif g.objective is WinCond.REACHABILITY:
            out = _solve_reachability(arena, opts)
        else:
            out = _solve_parity(arena, opts)
    except SolverInterrupted as e:
        out = SolveOutcome(Verdict.UNKNOWN, Region(), e.reason, objective=g.objective)
    except BackendError as e:
        log.warning("SMT backend failure: %s", e)
        out = SolveOutcome(Verdict.UNKNOWN, Region(), "backend", objective=g.objective)
    finally:
        if own:
            session.close()
    out.seconds = time.monotonic() - t0
    out.config = opts.accel
    return out


def solve_portfolio(g: SymbolicGame, opts: SolverOptions | None = None, smt_command: str | None = None) -> SolveOutcome:
    """Run the accelerated and plain configurations side by side; the first
    conclusive verdict wins and the other run is cancelled."""
    opts = opts or SolverOptions()
    configs = [replace(opts, accel="geometric"), replace(opts, accel="none")]
    cancel = threading.Event()

    def run(o: SolverOptions) -> SolveOutcome:
        deadline = time.monotonic() + o.timeout if o.timeout else None
        with SmtSession(smt_command, deadline=deadline) as s:
            return solve(g, o, s, cancel)

    with ThreadPoolExecutor(max_workers=len(configs)) as pool:
        pending = {pool.submit(run, o) for o in configs}
        best = None
        while pending:
            done, pending = wait(pending, return_when=FIRST_COMPLETED)
            for f in done:
                out = f.result()
                if out.verdict is not Verdict.UNKNOWN:
                    cancel.set()
                    return out
                best = best or out
        return best
