"""Compile emitted C and check its runs against the game.

Every step printed by the program is checked for legality (some transition
of the game allows it and the target domain holds), for the objective, and
inside ranked loops for the promised rank descent.
"""

from __future__ import annotations

import os
import random
import shutil
import subprocess
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction

from ..game import SymbolicGame
from ..solver.explicit import compile_term
from ..spec import WinCond
from ..terms import Sort, evaluate
from .program import AbstractProgram


class CompileError(Exception):
    pass


def c_compiler() -> str | None:
    for cc in (os.environ.get("CC"), "gcc", "cc", "clang"):
        if cc and shutil.which(cc):
            return cc
    return None


def compile_c(source: str, workdir: str | None = None, name: str = "strategy") -> tuple[str, str]:
    """Compile with ``-std=c11 -Wall``; returns (binary path, compiler stderr)."""
    cc = c_compiler()
    if cc is None:
        raise CompileError("no C compiler found")
    workdir = workdir or tempfile.mkdtemp(prefix="issy-c-")
    src = os.path.join(workdir, name + ".c")
    exe = os.path.join(workdir, name)
    with open(src, "w") as fh:
        fh.write(source)
    proc = subprocess.run([cc, "-std=c11", "-Wall", "-O1", "-o", exe, src], capture_output=True, text=True)
    if proc.returncode != 0:
        raise CompileError(proc.stderr)
    return exe, proc.stderr


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, Fraction):
        return repr(float(v))
    return str(v)


def _parse(text: str, sort: Sort):
    if sort is Sort.BOOL:
        return text == "1"
    if sort is Sort.INT:
        return int(text)
    return Fraction(text)


@dataclass
class SimulationResult:
    steps: int
    exit_code: int
    violations: list[str] = field(default_factory=list)
    reached: int | None = None  # step at which a reachability target was entered

    @property
    def ok(self) -> bool:
        return not self.violations


class Simulator:
    def __init__(self, g: SymbolicGame, program: AbstractProgram, binary: str):
        self.g, self.p, self.binary = g, program, binary
        self.states = list(g.env.states)
        self.inputs = list(g.env.inputs)
        self.guards = {id(t): compile_term(t.guard) for t in g.transitions}
        self.doms = {loc.name: compile_term(loc.domain) for loc in g.locations}
        self.loops = {}
        for loc, lp in program.loops():
            self.loops.setdefault(loc, []).append(
                (compile_term(lp.invariant), compile_term(lp.base), lp.rank, lp.epsilon))

    def _val(self, cur, inp=None, nxt=None):
        m = {(d.name, False): v for d, v in zip(self.states, cur)}
        if inp is not None:
            m.update({(d.name, False): v for d, v in zip(self.inputs, inp)})
        if nxt is not None:
            m.update({(d.name, True): v for d, v in zip(self.states, nxt)})
        return m

    def legal(self, loc, cur, inp, loc2, nxt) -> bool:
        m = self._val(cur, inp, nxt)
        if not self.doms[loc2](self._val(nxt)):
            return False
        return any(t.dst == loc2 and self.guards[id(t)](m) for t in self.g.outgoing(loc))

    def run(self, initial, inputs: list, bound: int | None = None) -> SimulationResult:
        lines = [" ".join(_fmt(v) for v in initial)] + [" ".join(_fmt(v) for v in i) for i in inputs]
        proc = subprocess.run([self.binary], input="\n".join(lines) + "\n", capture_output=True, text=True,
                              timeout=60)
        res = SimulationResult(0, proc.returncode)
        loc, cur = self.p.initial, tuple(initial)
        reach = self.g.objective is WinCond.REACHABILITY
        if reach and self.g.color(loc) > 0:
            res.reached = 0
        if self.g.objective is WinCond.SAFETY and self.g.color(loc) == 0:
            res.violations.append("initial location is unsafe")
        out = proc.stdout.splitlines()
        for k, line in enumerate(out):
            parts = line.split()
            loc2 = parts[0]
            nxt = tuple(_parse(x, d.sort) for x, d in zip(parts[1:], self.states))
            inp = tuple(inputs[k])
            if not self.legal(loc, cur, inp, loc2, nxt):
                res.violations.append(f"step {k + 1}: illegal move {loc}{cur} -[{inp}]-> {loc2}{nxt}")
                break
            for inv, base, rank, eps in self.loops.get(loc, ()):
                m = self._val(cur)
                if loc2 == loc and inv(m) and not base(m) and inv(self._val(nxt)) and not base(self._val(nxt)):
                    r0, r1 = evaluate(rank, m), evaluate(rank, self._val(nxt))
                    if not (r0 >= 0 and r1 <= r0 - eps):
                        res.violations.append(f"step {k + 1}: rank {rank} went from {r0} to {r1}")
            loc, cur = loc2, nxt
            res.steps = k + 1
            if self.g.objective is WinCond.SAFETY and self.g.color(loc) == 0:
                res.violations.append(f"step {k + 1}: entered unsafe location {loc}")
                break
            if reach and res.reached is None and self.g.color(loc) > 0:
                res.reached = k + 1
                break
        if res.violations:
            return res
        if reach:
            if res.reached is None:
                res.violations.append(f"target not reached in {res.steps} steps (exit code {proc.returncode})")
            elif bound is not None and res.reached > bound:
                res.violations.append(f"target reached after {res.reached} steps, bound {bound}")
        elif proc.returncode != 0:
            res.violations.append(f"program stopped with exit code {proc.returncode}: {proc.stderr.strip()}")
        elif res.steps != len(inputs):
            res.violations.append(f"program printed {res.steps} of {len(inputs)} steps")
        return res


def random_inputs(g: SymbolicGame, rng: random.Random, steps: int, lo: int = -8, hi: int = 8) -> list[tuple]:
    def one(d):
        if d.sort is Sort.BOOL:
            return rng.random() < 0.5
        if d.sort is Sort.INT:
            return rng.randint(lo, hi)
        return Fraction(rng.randint(lo * 4, hi * 4), 4)
    return [tuple(one(d) for d in g.env.inputs) for _ in range(steps)]
