"""C source for abstract programs.

Protocol of the generated program: the first stdin line holds the initial
values of the state variables in declaration order, every further line the
inputs of one step in declaration order. After each step the program prints
the location and the state values on one line. Exit code 0 on end of input,
3 when no branch applies, 4 on malformed input.
"""

from __future__ import annotations

import re
from fractions import Fraction

from ..llissy import _decimal
from ..terms import App, Const, Sort, Term, Var, infer
from .program import AbstractProgram, Branch, RankedLoop

_CTYPE = {Sort.INT: "long long", Sort.REAL: "double", Sort.BOOL: "int"}
_FMT = {Sort.INT: "%lld", Sort.REAL: "%.17g", Sort.BOOL: "%d"}

PRELUDE = r"""#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <errno.h>

static inline long long issy_mod(long long a, long long b) {
    long long m;
    if (b == 0) return 0;
    m = a % b;
    if (m < 0) m += (b < 0 ? -b : b);
    return m;
}
static inline long long issy_iabs(long long a) { return a < 0 ? -a : a; }
static inline double issy_rabs(double a) { return a < 0 ? -a : a; }
static inline double issy_rdiv(double a, double b) { return b == 0 ? 0.0 : a / b; }

static inline void issy_stuck(void) {
    fprintf(stderr, "STUCK\n");
    exit(3);
}
static inline void issy_malformed(const char *what) {
    fprintf(stderr, "malformed input: %s\n", what);
    exit(4);
}

/* Reads one line into buf; 0 on end of input. */
static inline int issy_line(char *buf, size_t n) {
    size_t len;
    if (!fgets(buf, (int)n, stdin)) return 0;
    len = strlen(buf);
    if (len == n - 1 && buf[len - 1] != '\n') issy_malformed("line too long");
    return 1;
}
static inline char *issy_ll(char *p, long long *out) {
    char *end;
    errno = 0;
    *out = strtoll(p, &end, 10);
    if (end == p || errno) issy_malformed("expected an integer");
    return end;
}
static inline char *issy_dbl(char *p, double *out) {
    char *end;
    errno = 0;
    *out = strtod(p, &end);
    if (end == p || errno) issy_malformed("expected a number");
    return end;
}
static inline char *issy_bool(char *p, int *out) {
    long long v;
    p = issy_ll(p, &v);
    if (v != 0 && v != 1) issy_malformed("expected 0 or 1");
    *out = (int)v;
    return p;
}
static inline void issy_eol(char *p) {
    while (*p == ' ' || *p == '\t' || *p == '\r' || *p == '\n') p++;
    if (*p) issy_malformed("unexpected trailing text");
}
"""


def _ident(name: str) -> str:
    return "v_" + re.sub(r"[^A-Za-z0-9_]", "_", name)


def _loc(name: str, index: int) -> str:
    return f"L{index}_" + re.sub(r"[^A-Za-z0-9_]", "_", name)


def _real_literal(v: Fraction) -> str:
    a = abs(v)
    s = _decimal(a) or f"({a.numerator}.0 / {a.denominator}.0)"
    return f"(-{s})" if v < 0 else s


def _sort_of(t: Term, env) -> Sort:
    try:
        s = infer(t, env)
    except Exception:
        return Sort.INT
    return s if isinstance(s, Sort) else Sort.INT


class _Expr:
    def __init__(self, env):
        self.env = env

    def __call__(self, t: Term) -> str:
        if isinstance(t, Const):
            v = t.value
            if isinstance(v, bool):
                return "1" if v else "0"
            if t.sort is Sort.REAL or v.denominator != 1:
                return _real_literal(v)
            return f"{int(v)}LL" if v >= 0 else f"(-{-int(v)}LL)"
        if isinstance(t, Var):
            if t.primed:
                raise ValueError("primed variable in program expression")
            return _ident(t.name)
        if not isinstance(t, App):
            raise ValueError(f"cannot emit {t}")
        op, args = t.op, t.args
        a = [self(x) for x in args]
        if op == "and":
            return "(" + " && ".join(a) + ")" if a else "1"
        if op == "or":
            return "(" + " || ".join(a) + ")" if a else "0"
        if op == "not":
            return f"(!{a[0]})"
        if op == "=>":
            r = a[-1]
            for x in reversed(a[:-1]):
                r = f"(!{x} || {r})"
            return r
        if op == "ite":
            return f"({a[0]} ? {a[1]} : {a[2]})"
        if op in ("<", "<=", ">", ">="):
            return "(" + " && ".join(f"({a[i]} {op} {a[i + 1]})" for i in range(len(a) - 1)) + ")"
        if op == "=":
            return "(" + " && ".join(f"({a[i]} == {a[i + 1]})" for i in range(len(a) - 1)) + ")"
        if op == "distinct":
            return "(" + " && ".join(f"({a[i]} != {a[j]})" for i in range(len(a)) for j in range(i + 1, len(a))) + ")"
        if op == "+":
            return "(" + " + ".join(a) + ")"
        if op == "*":
            return "(" + " * ".join(a) + ")"
        if op == "-":
            return f"(-{a[0]})" if len(a) == 1 else "(" + " - ".join(a) + ")"
        if op == "/":
            r = f"((double){a[0]})"
            for x in a[1:]:
                r = f"issy_rdiv({r}, (double){x})"
            return r
        if op == "mod":
            return f"issy_mod({a[0]}, {a[1]})"
        if op == "abs":
            return f"issy_rabs({a[0]})" if _sort_of(args[0], self.env) is Sort.REAL else f"issy_iabs({a[0]})"
        if op == "to_real":
            return f"((double){a[0]})"
        raise ValueError(f"operator {op} has no C rendering")


def emit_c(p: AbstractProgram) -> str:
    env = p.env
    expr = _Expr(env)
    states = list(env.states)
    inputs = list(env.inputs)
    locs = {name: _loc(name, k) for k, name in enumerate(p.locations)}
    out = [PRELUDE]
    out.append("enum issy_loc { " + ", ".join(locs[n] for n in p.locations) + " };")
    out.append("static const char *const issy_loc_names[] = { "
               + ", ".join('"' + n.replace("\\", "\\\\").replace('"', '\\"') + '"' for n in p.locations) + " };")
    out.append("static enum issy_loc loc = " + locs[p.initial] + ";")
    for d in states + inputs:
        out.append(f"static {_CTYPE[d.sort]} {_ident(d.name)};")
    out.append("")

    def reader(name: str, decls) -> list[str]:
        body = [f"static int {name}(void) {{", "    char buf[4096];", "    char *p = buf;",
                "    if (!issy_line(buf, sizeof buf)) return 0;"]
        for d in decls:
            fn = {Sort.INT: "issy_ll", Sort.REAL: "issy_dbl", Sort.BOOL: "issy_bool"}[d.sort]
            body.append(f"    p = {fn}(p, &{_ident(d.name)});")
        body += ["    issy_eol(p);", "    return 1;", "}"]
        return body

    out += reader("issy_read_state", states)
    out += reader("issy_read_inputs", inputs)
    fmt = " ".join(["%s"] + [_FMT[d.sort] for d in states])
    args = ", ".join(["issy_loc_names[loc]"] + [_ident(d.name) for d in states])
    out += ["static void issy_print(void) {", f'    printf("{fmt}\\n", {args});', "    fflush(stdout);", "}", ""]

    def action(br: Branch, indent: str) -> list[str]:
        lines = []
        for k, asg in enumerate(br.action.assignments):
            d = env.lookup(asg.var)
            lines.append(f"{indent}{_CTYPE[d.sort]} n{k} = {expr(asg.expr)};")
        for k, asg in enumerate(br.action.assignments):
            lines.append(f"{indent}{_ident(asg.var)} = n{k};")
        lines.append(f"{indent}loc = {locs[br.action.target]};")
        return lines

    out += ["int main(void) {", "    if (!issy_read_state()) issy_malformed(\"missing initial state\");",
            "    while (1) {", "        if (!issy_read_inputs()) return 0;", "        switch (loc) {"]
    for name in p.locations:
        code = p.location_code(name)
        out.append(f"        case {locs[name]}:")
        for step in code.steps:
            if isinstance(step, Branch):
                out.append(f"            if ({expr(step.condition)}) {{")
                out += action(step, " " * 16)
                out.append("                break;")
                out.append("            }")
            elif isinstance(step, RankedLoop):
                inside = f"(loc == {locs[name]} && {expr(step.invariant)} && !{expr(step.base)})"
                out.append(f"            if ({inside}) {{")
                out.append(f"                /* ranked loop, rank {expr(step.rank)} */")
                out.append("                while (1) {")
                for k, br in enumerate(step.branches):
                    kw = "if" if k == 0 else "} else if"
                    out.append(f"                    {kw} ({expr(br.condition)}) {{")
                    out += action(br, " " * 24)
                if step.branches:
                    out.append("                    } else {")
                    out.append("                        issy_stuck();")
                    out.append("                    }")
                else:
                    out.append("                    issy_stuck();")
                out.append(f"                    if (!{inside}) break;")
                out.append("                    issy_print();")
                out.append("                    if (!issy_read_inputs()) return 0;")
                out.append("                }")
                out.append("                break;")
                out.append("            }")
        out.append("            issy_stuck();")
        out.append("            break;")
    out += ["        }", "        issy_print();", "    }", "}", ""]
    return "\n".join(out)
