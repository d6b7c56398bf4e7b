"""HOA v1 reader for deterministic parity and Buechi automata.

Acceptance marks are normalized to a single max-odd color per edge: the run
is accepting iff the largest color seen infinitely often is odd.
"""

from __future__ import annotations

import itertools
import re
import shlex
from dataclasses import dataclass, field

from ..errors import HoaSyntaxError, NondeterministicAutomaton, UnsupportedAcceptance

# propositional labels: ("t",) ("f",) ("ap", i) ("not", x) ("and", a, b) ("or", a, b)
Label = tuple

TRUE_LABEL: Label = ("t",)


@dataclass(frozen=True)
class Acceptance:
    kind: str  # "parity" | "buchi" | "cobuchi" | "all" | "none"
    max: bool = True
    odd: bool = True
    sets: int = 0

    def color(self, marks: frozenset[int]) -> int:
        """Max-odd color for an edge carrying acceptance ``marks``."""
        if self.kind == "all":
            return 1
        if self.kind == "none":
            return 0
        if self.kind == "buchi":
            return 1 if 0 in marks else 0
        if self.kind == "cobuchi":
            return 2 if 0 in marks else 1
        if not marks:
            return 0
        if self.max:
            c = max(marks)
            return c if self.odd else c + 1
        # min parity: invert the order, keeping the accepting parity odd
        c = min(marks)
        k = self.sets
        base = k + (k % 2 if self.odd else 1 - k % 2)
        return base - c


@dataclass(frozen=True)
class Edge:
    label: Label
    target: int
    marks: frozenset[int] = frozenset()
    color: int = 0


@dataclass
class Automaton:
    states: int
    initial: int
    aps: list[str]
    edges: dict[int, list[Edge]]
    acceptance: Acceptance
    state_names: dict[int, str] = field(default_factory=dict)

    @property
    def ap_count(self) -> int:
        return len(self.aps)

    @property
    def max_color(self) -> int:
        return max((e.color for es in self.edges.values() for e in es), default=0)

    def step(self, state: int, valuation: dict[int, bool]) -> Edge:
        for e in self.edges[state]:
            if eval_label(e.label, valuation):
                return e
        raise NondeterministicAutomaton(f"state {state} has no edge for {valuation}")

    def accepts_lasso(self, letters: list[dict[int, bool]], loop_start: int) -> bool:
        """Acceptance of ``letters[:loop_start] (letters[loop_start:])^ω``."""
        n = len(letters)
        q = self.initial
        for i in range(loop_start):
            q = self.step(q, letters[i]).target
        # iterate the loop until (position, state) repeats
        seen: dict[tuple[int, int], int] = {}
        colors: list[int] = []
        i = loop_start
        while (i, q) not in seen:
            seen[(i, q)] = len(colors)
            e = self.step(q, letters[i])
            colors.append(e.color)
            q = e.target
            i = i + 1 if i + 1 < n else loop_start
        cycle = colors[seen[(i, q)]:]
        return max(cycle) % 2 == 1

    def nonempty_states(self) -> set[int]:
        """States with a propositionally non-empty language: some reachable
        cycle has an odd maximal color."""
        succ = {q: [(e.target, e.color) for e in self.edges[q] if label_satisfiable(e.label, self.ap_count)]
                for q in range(self.states)}
        good: set[int] = set()
        colors = sorted({c for es in succ.values() for _, c in es}, reverse=True)
        for c in colors:
            if c % 2 == 0:
                continue
            # cycles using only edges with color <= c through at least one c-edge
            sub = {q: [(t, d) for t, d in succ[q] if d <= c] for q in succ}
            for q in range(self.states):
                for t, d in sub[q]:
                    if d == c and q in _reach(sub, t):
                        good.add(q)
        # anything that can reach a good cycle
        return {q for q in range(self.states) if _reach(succ, q) & good}


def _reach(succ, q) -> set[int]:
    seen, todo = {q}, [q]
    while todo:
        for t, _ in succ[todo.pop()]:
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return seen


# --------------------------------------------------------------------------
# labels


def eval_label(lab: Label, val: dict[int, bool]) -> bool:
    k = lab[0]
    if k == "t":
        return True
    if k == "f":
        return False
    if k == "ap":
        return bool(val.get(lab[1], False))
    if k == "not":
        return not eval_label(lab[1], val)
    if k == "and":
        return eval_label(lab[1], val) and eval_label(lab[2], val)
    if k == "or":
        return eval_label(lab[1], val) or eval_label(lab[2], val)
    raise ValueError(lab)


def label_aps(lab: Label) -> set[int]:
    if lab[0] == "ap":
        return {lab[1]}
    out: set[int] = set()
    for x in lab[1:]:
        if isinstance(x, tuple):
            out |= label_aps(x)
    return out


def _valuations(aps: list[int]):
    for bits in itertools.product((False, True), repeat=len(aps)):
        yield dict(zip(aps, bits))


def label_satisfiable(lab: Label, ap_count: int) -> bool:
    aps = sorted(label_aps(lab))
    return any(eval_label(lab, v) for v in _valuations(aps))


_LABEL_TOKEN = re.compile(r"\s*(?:(\d+)|(t|f)\b|(@[\w-]+)|([!&|()]))")


def parse_label(text: str, aliases: dict[str, Label] | None = None) -> Label:
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _LABEL_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise HoaSyntaxError(f"bad label syntax near '{text[pos:pos + 10]}'")
        toks.append(m.group(m.lastindex))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    k = 0

    def peek():
        return toks[k] if k < len(toks) else None

    def take():
        nonlocal k
        if k >= len(toks):
            return None
        k += 1
        return toks[k - 1]

    def disj():
        a = conj()
        while peek() == "|":
            take()
            a = ("or", a, conj())
        return a

    def conj():
        a = neg()
        while peek() == "&":
            take()
            a = ("and", a, neg())
        return a

    def neg():
        t = peek()
        if t == "!":
            take()
            return ("not", neg())
        if t == "(":
            take()
            a = disj()
            if take() != ")":
                raise HoaSyntaxError("missing ')' in label")
            return a
        if t is None:
            raise HoaSyntaxError("truncated label")
        take()
        if t == "t":
            return ("t",)
        if t == "f":
            return ("f",)
        if t.startswith("@"):
            if not aliases or t not in aliases:
                raise HoaSyntaxError(f"undefined alias {t}")
            return aliases[t]
        if t.isdigit():
            return ("ap", int(t))
        raise HoaSyntaxError(f"unexpected '{t}' in label")

    lab = disj()
    if k != len(toks):
        raise HoaSyntaxError(f"trailing tokens in label '{text}'")
    return lab


def render_label(lab: Label) -> str:
    k = lab[0]
    if k in ("t", "f"):
        return k
    if k == "ap":
        return str(lab[1])
    if k == "not":
        return "!" + render_label(lab[1])
    op = " & " if k == "and" else " | "
    return "(" + render_label(lab[1]) + op + render_label(lab[2]) + ")"


# --------------------------------------------------------------------------
# reader


def _acceptance(acc_name: str | None, acc_cond: str | None, nsets: int) -> Acceptance:
    if acc_name:
        parts = acc_name.split()
        name = parts[0]
        if name == "parity" and len(parts) >= 3:
            if parts[1] not in ("max", "min") or parts[2] not in ("odd", "even"):
                raise UnsupportedAcceptance(f"unsupported parity flavour '{acc_name}'")
            return Acceptance("parity", parts[1] == "max", parts[2] == "odd", nsets)
        if name == "Buchi":
            return Acceptance("buchi", sets=nsets)
        if name == "co-Buchi":
            return Acceptance("cobuchi", sets=nsets)
        if name == "all":
            return Acceptance("all")
        if name == "none":
            return Acceptance("none")
    cond = re.sub(r"\s+", "", acc_cond or "")
    if cond == "t":
        return Acceptance("all")
    if cond == "f":
        return Acceptance("none")
    if cond == "Inf(0)":
        return Acceptance("buchi", sets=nsets)
    if cond == "Fin(0)":
        return Acceptance("cobuchi", sets=nsets)
    raise UnsupportedAcceptance(f"unsupported acceptance '{acc_name or ''}' / '{acc_cond or ''}'")


def _marks(text: str | None) -> frozenset[int]:
    if not text:
        return frozenset()
    try:
        return frozenset(int(x) for x in text.split())
    except ValueError:
        raise HoaSyntaxError(f"bad acceptance marks '{{{text}}}'") from None


_STATE = re.compile(r'State:\s*(\[[^\]]*\])?\s*(\d+)\s*("(?:[^"\\]|\\.)*")?\s*(\{[^}]*\})?\s*$')
_EDGE = re.compile(r'(\[[^\]]*\])?\s*(\d+(?:\s*&\s*\d+)*)\s*(\{[^}]*\})?\s*$')


def parse_hoa(text: str) -> Automaton:
    """Read one HOA automaton, check determinism and make it complete."""
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    try:
        body_at = next(i for i, l in enumerate(lines) if l.strip() == "--BODY--")
    except StopIteration:
        raise HoaSyntaxError("missing --BODY--") from None
    header: dict[str, list[str]] = {}
    for l in lines[:body_at]:
        l = l.strip()
        if not l:
            continue
        m = re.match(r"([A-Za-z][\w-]*):\s*(.*)$", l)
        if not m:
            raise HoaSyntaxError(f"bad header line '{l}'")
        header.setdefault(m.group(1), []).append(m.group(2))
    if header.get("HOA", [""])[0].strip() != "v1":
        raise HoaSyntaxError("not an HOA v1 automaton")
    if "States" not in header:
        raise HoaSyntaxError("missing States: header")
    nstates = int(header["States"][0])
    starts = header.get("Start", [])
    if len(starts) != 1 or not starts[0].strip().isdigit():
        raise HoaSyntaxError("exactly one single-state Start: header is required")
    initial = int(starts[0])
    aps: list[str] = []
    if "AP" in header:
        parts = shlex.split(header["AP"][0])
        n = int(parts[0])
        aps = parts[1:]
        if len(aps) != n:
            raise HoaSyntaxError("AP: count does not match the names")
    acc_line = header.get("Acceptance", ["0 t"])[0].split(None, 1)
    nsets = int(acc_line[0])
    acc = _acceptance(header.get("acc-name", [None])[0], acc_line[1] if len(acc_line) > 1 else "t", nsets)
    aliases = {}
    for a in header.get("Alias", []):
        name, lab = a.split(None, 1)
        aliases[name] = parse_label(lab, aliases)

    edges: dict[int, list[Edge]] = {q: [] for q in range(nstates)}
    names: dict[int, str] = {}
    cur = None
    state_marks: frozenset[int] = frozenset()
    state_label = None
    ended = False
    for l in lines[body_at + 1:]:
        s = l.strip()
        if not s:
            continue
        if s == "--END--":
            ended = True
            break
        if s.startswith("State:"):
            m = _STATE.match(s)
            if not m:
                raise HoaSyntaxError(f"bad state line '{s}'")
            cur = int(m.group(2))
            if cur >= nstates:
                raise HoaSyntaxError(f"state {cur} out of range")
            state_label = parse_label(m.group(1)[1:-1], aliases) if m.group(1) else None
            if m.group(3):
                names[cur] = m.group(3)[1:-1]
            state_marks = _marks(m.group(4)[1:-1] if m.group(4) else None)
            continue
        if cur is None:
            raise HoaSyntaxError("edge before the first State:")
        m = _EDGE.match(s)
        if not m:
            raise HoaSyntaxError(f"bad edge line '{s}'")
        if m.group(1) is None and state_label is None:
            raise HoaSyntaxError("implicit edge labels are not supported")
        if "&" in m.group(2):
            raise HoaSyntaxError("universal branching is not supported")
        lab = parse_label(m.group(1)[1:-1], aliases) if m.group(1) else state_label
        if any(i >= len(aps) for i in label_aps(lab)):
            raise HoaSyntaxError(f"label [{render_label(lab)}] uses an undeclared AP index")
        target = int(m.group(2))
        if target >= nstates:
            raise HoaSyntaxError(f"edge target {target} out of range")
        marks = _marks(m.group(3)[1:-1] if m.group(3) else None) | state_marks
        if any(x >= max(nsets, 1) for x in marks) and acc.kind not in ("all", "none"):
            raise HoaSyntaxError(f"acceptance mark out of range in '{s}'")
        edges[cur].append(Edge(lab, target, marks, acc.color(marks)))
    if not ended:
        raise HoaSyntaxError("missing --END--")
    aut = Automaton(nstates, initial, aps, edges, acc, names)
    check_deterministic(aut)
    complete(aut)
    return aut


def check_deterministic(aut: Automaton) -> None:
    for q, es in aut.edges.items():
        for a, b in itertools.combinations(es, 2):
            both = ("and", a.label, b.label)
            if label_satisfiable(both, aut.ap_count):
                raise NondeterministicAutomaton(
                    f"state {q}: labels [{render_label(a.label)}] and [{render_label(b.label)}] overlap")


def complete(aut: Automaton) -> bool:
    """Route missing letters to a fresh rejecting sink. Returns True if the
    automaton had to be completed."""
    missing = {}
    for q, es in aut.edges.items():
        rest: Label = ("t",)
        for e in es:
            rest = ("and", rest, ("not", e.label))
        if label_satisfiable(rest, aut.ap_count):
            missing[q] = rest
    if not missing:
        return False
    sink = aut.states
    aut.states += 1
    aut.edges[sink] = [Edge(TRUE_LABEL, sink, frozenset(), 0)]
    for q, rest in missing.items():
        aut.edges[q].append(Edge(rest, sink, frozenset(), 0))
    return True
