"""SMT-LIB2 subprocess backend.

A :class:`SmtSession` owns one solver process and talks to it over pipes:
``(set-logic ALL)`` once, then ``(push)``/``(pop)`` around every query.
Sessions are single-owner; use one per thread.
"""

from __future__ import annotations

import enum
import logging
import os
import selectors
import shlex
import subprocess
import threading
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import terms as T
from .errors import BackendError
from .sexpr import SAtom, SExprError, SList, read_all
from .terms import App, Const, Quant, Sort, Term, Var, VarEnv

log = logging.getLogger(__name__)

DEFAULT_COMMAND = "z3 -in"
PRIME_SUFFIX = "__p"
_END = "@@issy-end@@"


class Verdict(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


@dataclass
class SatResult:
    verdict: Verdict
    model: dict | None = None  # (name, primed) -> bool | int | Fraction

    @property
    def sat(self) -> bool:
        return self.verdict is Verdict.SAT

    @property
    def unsat(self) -> bool:
        return self.verdict is Verdict.UNSAT


@dataclass
class SmtStats:
    queries: int = 0
    cache_hits: int = 0
    qelim_calls: int = 0
    unknowns: int = 0
    seconds: float = 0.0


def solver_command() -> str:
    return os.environ.get("ISSY_SMT_CMD", DEFAULT_COMMAND)


class SmtSession:
    """One solver process; every query runs inside its own push/pop frame."""

    def __init__(self, command: str | None = None, timeout: float = 10.0, deadline: float | None = None,
                 seed: int = 0):
        self.command = command or solver_command()
        self.timeout = timeout
        self.deadline = deadline  # absolute time.monotonic() bound for the whole run
        self.seed = seed
        self.stats = SmtStats()
        self._proc = None
        self._buf = b""
        self._cache: dict[str, object] = {}

    # -- process plumbing ------------------------------------------------

    def _start(self):
        try:
            self._proc = subprocess.Popen(shlex.split(self.command), stdin=subprocess.PIPE,
                                          stdout=subprocess.PIPE, stderr=subprocess.STDOUT)
        except OSError as e:
            raise BackendError(f"cannot start SMT solver '{self.command}': {e}") from e
        self._buf = b""
        self._write("(set-option :print-success false)\n(set-option :produce-models true)\n"
                    f"(set-option :random-seed {self.seed})\n(set-logic ALL)\n")

    def close(self):
        if self._proc is not None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=1)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
            self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass

    def _write(self, text: str):
        try:
            self._proc.stdin.write(text.encode())
            self._proc.stdin.flush()
        except OSError as e:
            self._kill()
            raise BackendError(f"SMT solver pipe closed: {e}") from e

    def _kill(self):
        if self._proc is not None:
            self._proc.kill()
            self._proc.wait()
            self._proc = None

    def _budget(self) -> float:
        limit = self.timeout + 5.0
        if self.deadline is not None:
            limit = min(limit, self.deadline - time.monotonic())
        return limit

    def _run(self, script: str) -> str | None:
        """Send ``script`` and return all output up to the end marker.

        Returns None if the wall-clock limit expired (the process is killed)."""
        if self._proc is None:
            self._start()
        self._write(script + f'\n(echo "{_END}")\n')
        marker = _END.encode()
        limit = self._budget()
        start = time.monotonic()
        fd = self._proc.stdout.fileno()
        sel = selectors.DefaultSelector()
        sel.register(fd, selectors.EVENT_READ)
        try:
            while marker not in self._buf:
                left = limit - (time.monotonic() - start)
                if left <= 0 or not sel.select(left):
                    log.warning("SMT query exceeded %.1fs, restarting solver", limit)
                    self._kill()
                    return None
                chunk = os.read(fd, 65536)
                if not chunk:
                    out = self._buf.decode(errors="replace")
                    self._kill()
                    raise BackendError(f"SMT solver exited unexpectedly: {out.strip()[:500]}")
                self._buf += chunk
        finally:
            sel.close()
        idx = self._buf.index(marker)
        out = self._buf[:idx].decode(errors="replace")
        rest = self._buf[idx + len(marker):]
        self._buf = rest.split(b"\n", 1)[1] if b"\n" in rest else b""
        return out.rstrip().rstrip('"').rstrip()

    # -- declarations ------------------------------------------------------

    @staticmethod
    def _decls(ts) -> tuple[str, dict]:
        vs: dict[str, Var] = {}
        for t in ts:
            for v in T.free_vars(t):
                name = v.name + PRIME_SUFFIX if v.primed else v.name
                old = vs.get(name)
                if old is not None and old.sort != v.sort:
                    raise BackendError(f"variable {name} used with sorts {old.sort} and {v.sort}")
                vs[name] = v
        lines = [f"(declare-const {n} {vs[n].sort})" for n in sorted(vs)]
        return "\n".join(lines), vs

    def _timeout_opt(self) -> str:
        ms = int(max(1.0, min(self.timeout, self._budget())) * 1000)
        return f"(set-option :timeout {ms})"

    # -- queries -----------------------------------------------------------

    def check_sat(self, assertions, want_model: bool = True) -> SatResult:
        assertions = list(assertions)
        decls, vs = self._decls(assertions)
        body = "\n".join(f"(assert {T.to_sexpr(a, PRIME_SUFFIX)})" for a in assertions)
        key = "sat|" + str(want_model) + "|" + decls + "\n" + body
        hit = self._cache.get(key)
        if hit is not None:
            self.stats.cache_hits += 1
            return hit
        self.stats.queries += 1
        t0 = time.monotonic()
        script = f"(push 1)\n{self._timeout_opt()}\n{decls}\n{body}\n(check-sat)"
        out = self._run(script)
        if out is None:
            self.stats.unknowns += 1
            self.stats.seconds += time.monotonic() - t0
            return SatResult(Verdict.UNKNOWN)
        answer = out.strip().splitlines()[-1].strip() if out.strip() else ""
        if "(error" in out:
            self._run("(pop 1)")
            self._check_errors(out, script)
        if answer == "sat":
            model = None
            if want_model:
                mout = self._run("(get-model)")
                if mout is None:
                    model = None
                else:
                    self._check_errors(mout, "(get-model)")
                    model = self._parse_model(mout, vs)
            res = SatResult(Verdict.SAT, model)
        elif answer == "unsat":
            res = SatResult(Verdict.UNSAT)
        elif answer == "unknown":
            res = SatResult(Verdict.UNKNOWN)
        else:
            self._run("(pop 1)")
            raise BackendError(f"unexpected solver answer: {out.strip()[:300]}")
        self._run("(pop 1)")
        self.stats.seconds += time.monotonic() - t0
        if res.verdict is Verdict.UNKNOWN:
            self.stats.unknowns += 1
        else:
            self._cache[key] = res
        return res

    def check_implies(self, a: Term, b: Term) -> bool | None:
        """True iff a ∧ ¬b is unsat, False iff sat, None if unknown."""
        if b == T.TRUE or a == T.FALSE or a == b:
            return True
        r = self.check_sat([a, T.mk_not(b)], want_model=False)
        if r.verdict is Verdict.UNSAT:
            return True
        if r.verdict is Verdict.SAT:
            return False
        return None

    def is_valid(self, a: Term) -> bool | None:
        return self.check_implies(T.TRUE, a)

    def is_sat(self, a: Term) -> bool | None:
        if a == T.FALSE:
            return False
        if a == T.TRUE:
            return True
        r = self.check_sat([a], want_model=False)
        if r.verdict is Verdict.UNKNOWN:
            return None
        return r.verdict is Verdict.SAT

    def apply_tactic(self, term: Term, tactic: str) -> Term | None:
        """Run ``(apply tactic)`` on ``term``; the goal set is read back as a
        disjunction of conjunctions. None if the tactic failed or timed out."""
        decls, vs = self._decls([term])
        body = f"(assert {T.to_sexpr(term, PRIME_SUFFIX)})"
        key = "tac|" + tactic + "|" + decls + "\n" + body
        if key in self._cache:
            self.stats.cache_hits += 1
            return self._cache[key]
        self.stats.queries += 1
        t0 = time.monotonic()
        ms = int(max(1.0, min(self.timeout, self._budget())) * 1000)
        script = f"(push 1)\n{decls}\n{body}\n(apply (try-for {tactic} {ms}))"
        out = self._run(script)
        if out is None:
            self.stats.seconds += time.monotonic() - t0
            return None
        self._run("(pop 1)")
        self.stats.seconds += time.monotonic() - t0
        if "(error" in out:
            if "tactic failed" in out or "canceled" in out or "timeout" in out:
                self._cache[key] = None
                return None
            raise BackendError(f"solver error: {out.strip()[:500]}")
        result = self._parse_goals(out, vs)
        self._cache[key] = result
        return result

    def qelim(self, term: Term) -> tuple[Term, bool]:
        """Quantifier elimination. Returns (result, eliminated)."""
        self.stats.qelim_calls += 1
        pre = eliminate_equalities(term)
        if not T.has_quantifier(pre):
            return pre, True
        res = self.apply_tactic(pre, "(then simplify qe simplify)")
        if res is None or T.has_quantifier(res):
            return term, False
        return res, True

    def simplify(self, term: Term, strong: bool = False) -> Term:
        if isinstance(term, (Const, Var)):
            return term
        tactic = "(then simplify propagate-values ctx-simplify)"
        if strong:
            tactic = "(then simplify propagate-values ctx-simplify (or-else (try-for ctx-solver-simplify 2000) skip))"
        res = self.apply_tactic(term, tactic)
        return term if res is None else res

    def version(self) -> str:
        out = self._run("(get-info :version)")
        return (out or "").strip()

    # -- response parsing -------------------------------------------------

    @staticmethod
    def _check_errors(out: str, script: str):
        for line in out.splitlines():
            if line.strip().startswith("(error"):
                raise BackendError(f"solver error: {line.strip()} while running:\n{script[:800]}")

    def _parse_model(self, out: str, vs: dict) -> dict:
        try:
            exprs = read_all(out)
        except SExprError as e:
            raise BackendError(f"malformed model: {e}") from e
        model = {}
        if not exprs:
            return model
        top = exprs[0]
        items = top.items
        if items and isinstance(items[0], SAtom) and items[0].text == "model":
            items = items[1:]
        for d in items:
            if not isinstance(d, SList) or len(d) != 5 or d[0] != "define-fun":
                continue
            name = d[1].text
            if name not in vs or len(d[2]) != 0:
                continue
            v = vs[name]
            val = T.evaluate(_to_term(d[4], vs, {}), {})
            if v.sort == Sort.INT:
                val = int(val)
            elif v.sort == Sort.REAL:
                val = Fraction(val)
            model[v.key] = val
        # unconstrained variables may be omitted from the model
        for name, v in vs.items():
            if v.key not in model:
                model[v.key] = False if v.sort == Sort.BOOL else (0 if v.sort == Sort.INT else Fraction(0))
        return model

    def _parse_goals(self, out: str, vs: dict) -> Term:
        try:
            exprs = read_all(out)
        except SExprError as e:
            raise BackendError(f"malformed tactic output: {e}") from e
        if not exprs or not isinstance(exprs[0], SList) or exprs[0][0] != "goals":
            raise BackendError(f"unexpected tactic output: {out[:300]}")
        disj = []
        for goal in exprs[0].items[1:]:
            conj = []
            items = goal.items[1:]
            k = 0
            while k < len(items):
                it = items[k]
                if isinstance(it, SAtom) and it.text.startswith(":"):
                    k += 2
                    continue
                conj.append(_to_term(it, vs, {}))
                k += 1
            disj.append(T.mk_and(conj))
        return T.resolve_numerals(T.mk_or(disj))


def parse_smt_term(text: str, variables: dict[str, Var]) -> Term:
    """Read a single SMT-LIB term over the given symbol table."""
    exprs = read_all(text)
    if len(exprs) != 1:
        raise BackendError("expected exactly one term")
    return T.resolve_numerals(_to_term(exprs[0], variables, {}))


def _num_atom(text: str):
    if text.isdigit():
        return Const(Fraction(int(text)), Sort.INT)
    if text.count(".") == 1 and text.replace(".", "").isdigit():
        return Const(Fraction(text), Sort.REAL)
    return None


_SORTS = {"Int": Sort.INT, "Real": Sort.REAL, "Bool": Sort.BOOL}


def _to_term(e, vs: dict, lets: dict) -> Term:
    if isinstance(e, SAtom):
        t = e.text
        if t in lets:
            return lets[t]
        if t == "true":
            return T.TRUE
        if t == "false":
            return T.FALSE
        c = _num_atom(t)
        if c is not None:
            return c
        if t in vs:
            return vs[t]
        raise BackendError(f"unknown symbol in solver output: {t}")
    items = e.items
    if not items:
        raise BackendError("empty application in solver output")
    head = items[0]
    if isinstance(head, SList):
        # indexed identifier, e.g. ((_ divisible 3) x)
        if len(head) == 3 and head[0] == "_" and head[1] == "divisible":
            k = int(head[2].text)
            arg = _to_term(items[1], vs, lets)
            return App("=", (App("mod", (arg, Const(Fraction(k), Sort.INT))), Const(Fraction(0), Sort.INT)))
        raise BackendError(f"unsupported indexed operator: {head}")
    op = head.text
    if op == "let":
        inner = dict(lets)
        for binding in items[1]:
            inner[binding[0].text] = _to_term(binding[1], vs, lets)
        return _to_term(items[2], vs, inner)
    if op in ("forall", "exists"):
        bound = []
        inner_vs = dict(vs)
        inner_lets = dict(lets)
        for b in items[1]:
            name, sort = b[0].text, _SORTS[b[1].text]
            if name.endswith(PRIME_SUFFIX):
                v = Var(name[:-len(PRIME_SUFFIX)], sort, True)
            else:
                v = Var(name, sort)
            bound.append(v)
            inner_vs[name] = v
            inner_lets.pop(name, None)
        body = _to_term(items[2], inner_vs, inner_lets)
        return Quant(op, tuple(bound), body)
    if op == "!":
        return _to_term(items[1], vs, lets)
    args = tuple(_to_term(a, vs, lets) for a in items[1:])
    if op not in T.ALL_OPS:
        raise BackendError(f"unsupported operator in solver output: {op}")
    if op == "/" and all(isinstance(a, Const) for a in args):
        return T.normalize(App("/", args))
    if op == "-" and len(args) == 1 and isinstance(args[0], Const):
        return Const(-args[0].value, args[0].sort)
    return App(op, args)


# --------------------------------------------------------------------------
# syntactic one-point elimination


def eliminate_equalities(term: Term) -> Term:
    """Apply the one-point rule ``∃x. x = e ∧ φ  ≡  φ[x := e]`` wherever an
    existential body has a top-level equality conjunct for a bound variable."""
    if isinstance(term, (Const, Var)):
        return term
    if isinstance(term, App):
        return App(term.op, tuple(eliminate_equalities(a) for a in term.args))
    body = eliminate_equalities(term.body)
    if term.kind == "forall":
        return T.mk_forall(term.vars, body)
    remaining = list(term.vars)
    changed = True
    while changed and remaining:
        changed = False
        parts = T.conjuncts(body)
        for v in list(remaining):
            for i, c in enumerate(parts):
                e = _defining_rhs(c, v)
                if e is None:
                    continue
                rest = parts[:i] + parts[i + 1:]
                body = T.substitute(T.mk_and(rest), {v: e})
                remaining.remove(v)
                changed = True
                break
            if changed:
                break
    return T.mk_exists(remaining, body)


def _defining_rhs(c: Term, v: Var):
    if not (isinstance(c, App) and c.op == "=" and len(c.args) == 2):
        return None
    a, b = c.args
    for lhs, rhs in ((a, b), (b, a)):
        if lhs == v and v.key not in {w.key for w in T.free_vars(rhs)} and not T.has_quantifier(rhs):
            return rhs
    return None


# --------------------------------------------------------------------------
# module-level convenience API over a per-thread default session

_local = threading.local()


def default_session() -> SmtSession:
    s = getattr(_local, "session", None)
    if s is None:
        s = SmtSession()
        _local.session = s
    return s


def set_default_session(session: SmtSession | None):
    _local.session = session


def _check_env(ts, env: VarEnv | None):
    if env is not None:
        for t in ts:
            T.typecheck(t, env)


def check_sat(assertions, env: VarEnv | None = None, session: SmtSession | None = None) -> SatResult:
    assertions = list(assertions)
    _check_env(assertions, env)
    return (session or default_session()).check_sat(assertions)


def check_implies(a: Term, b: Term, env: VarEnv | None = None, session: SmtSession | None = None):
    _check_env([a, b], env)
    return (session or default_session()).check_implies(a, b)


def qelim(term: Term, env: VarEnv | None = None, session: SmtSession | None = None) -> Term:
    """Quantifier-free equivalent of ``term``, or ``term`` itself when the
    backend cannot eliminate (see :func:`qelim_checked`)."""
    return qelim_checked(term, env, session)[0]


def qelim_checked(term: Term, env: VarEnv | None = None, session: SmtSession | None = None):
    _check_env([term], env)
    return (session or default_session()).qelim(term)
