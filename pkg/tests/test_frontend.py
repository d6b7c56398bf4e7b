from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from issy.frontend import (IssyDiagnostics, Severity, check_global, elaborate, expand_macros,
                           load_issy, parse_issy)
from issy.frontend.syntax import FBinary, FIdent, FKeep, FPred, FUnary, PBinary, PIdent, PNum, PUnary
from issy.logic.rpltl import Op
from issy.spec import WinCond
from issy.terms import TRUE, App, Sort, Var, mk_and

from conftest import DATA, load_text

CORPUS = sorted((DATA / "corpus").glob("*.issy"))
MALFORMED = sorted((DATA / "malformed").glob("*.issy"))


def read_raw(path: Path) -> str:
    with open(path, encoding="utf-8", newline="") as fh:
        return fh.read()


def formula_of(text: str):
    ast = parse_issy("input bool a\ninput bool b\ninput bool c\nformula { assert " + text + " }")
    assert not isinstance(ast, list), ast
    return ast.formula_blocks[0].stmts[0].formula


def pred_of(text: str):
    f = formula_of("[" + text + "]")
    assert isinstance(f, FPred)
    return f.pred


def shape(node):
    """Operator tree of a formula or predicate, for precedence checks."""
    if isinstance(node, (FBinary, PBinary)):
        return (node.op, shape(node.left), shape(node.right))
    if isinstance(node, (FUnary, PUnary)):
        return (node.op, shape(node.arg))
    if isinstance(node, (FIdent, PIdent)):
        return node.name
    if isinstance(node, PNum):
        return int(node.value)
    if isinstance(node, FPred):
        return shape(node.pred)
    return node


class TestBalancer:
    def test_surface_counts(self):
        ast = parse_issy(load_text("balancer.issy"))
        assert len(ast.vardecls) == 6
        assert len(ast.formula_blocks) == 1
        assert len(ast.macros) == 4
        assert len(ast.game_blocks) == 1

    def test_elaborated_counts(self):
        spec, warnings = load_issy(load_text("balancer.issy"))
        assert len(spec.env.inputs) == 2 and len(spec.env.states) == 4
        (fb,) = spec.formulas
        assert len(fb.assumes) == 1 and len(fb.asserts) == 1
        (g,) = spec.games
        assert g.wincond is WinCond.SAFETY and g.initial == "init"
        assert len(g.locations) == 5 and len(g.transitions) == 9
        assert {loc.name: loc.color for loc in g.locations} == {"init": 1, "lbal": 1, "lrem": 1, "done": 1, "err": 0}
        assert not [d for d in warnings if d.is_error]

    def test_negated_macro(self):
        ast = expand_macros(parse_issy(load_text("balancer.issy")))
        (g,) = ast.game_blocks
        t = next(t for t in g.transitions if t.dst == "err")
        assert isinstance(t.guard, FUnary) and t.guard.op == "!"
        assert isinstance(t.guard.arg, FBinary) and t.guard.arg.op == "||"

    def test_one_nonsafety_component(self):
        spec, diags = load_issy(load_text("balancer.issy"))
        assert not any(d.is_error for d in check_global(spec))


class TestPrecedence:
    def test_and_over_or(self):
        assert shape(formula_of("a && b || c")) == ("||", ("&&", "a", "b"), "c")
        assert shape(formula_of("a || b && c")) == ("||", "a", ("&&", "b", "c"))

    def test_implication_right_assoc(self):
        assert shape(formula_of("a -> b -> c")) == ("->", "a", ("->", "b", "c"))

    def test_iff_weakest(self):
        assert shape(formula_of("a -> b <-> c")) == ("<->", ("->", "a", "b"), "c")
        assert shape(formula_of("a <-> b <-> c")) == ("<->", "a", ("<->", "b", "c"))

    def test_or_over_implies(self):
        assert shape(formula_of("a || b -> c")) == ("->", ("||", "a", "b"), "c")

    def test_binary_temporal(self):
        assert shape(formula_of("a U b && c")) == ("&&", ("U", "a", "b"), "c")
        assert shape(formula_of("a U b W c")) == ("U", "a", ("W", "b", "c"))
        assert shape(formula_of("a R !b")) == ("R", "a", ("!", "b"))

    def test_unary_binds_tightest(self):
        assert shape(formula_of("! a && b")) == ("&&", ("!", "a"), "b")
        assert shape(formula_of("G a U b")) == ("U", ("G", "a"), "b")
        assert shape(formula_of("X F G ! a")) == ("X", ("F", ("G", ("!", "a"))))

    def test_parentheses(self):
        assert shape(formula_of("a && (b || c)")) == ("&&", "a", ("||", "b", "c"))

    def test_predicate_levels(self):
        assert shape(pred_of("1 + 2 * 3 = 7")) == ("=", ("+", 1, ("*", 2, 3)), 7)
        assert shape(pred_of("1 - 2 - 3 < 0")) == ("<", ("-", ("-", 1, 2), 3), 0)
        assert shape(pred_of("abs 1 * 2 >= 0")) == (">=", ("*", ("abs", 1), 2), 0)
        assert shape(pred_of("-1 mod 3 <= 2")) == ("<=", ("mod", ("-", 1), 3), 2)
        assert shape(pred_of("(1 + 2) / 3 > 0")) == (">", ("/", ("+", 1, 2), 3), 0)


class TestParser:
    def test_empty(self):
        assert parse_issy("").items == ()

    def test_missing_identifier(self):
        diags = parse_issy("input real")
        assert isinstance(diags, list) and diags[0].is_error and diags[0].span.line == 1

    def test_newline_forms_agree(self):
        text = load_text("games/g_dec.issy")
        base = parse_issy(text)
        assert parse_issy(text.replace("\n", "\r\n")) == base
        assert parse_issy(text.replace("\n", "\r")) == base

    def test_crlf_positions(self):
        diags = parse_issy("state int x\r\nstate int $")
        assert diags[0].span.line == 2 and diags[0].span.col == 11

    def test_keep_names(self):
        f = formula_of("keep(a b)")
        assert isinstance(f, FKeep) and f.names == ("a", "b")


class TestMacros:
    def test_no_macros_is_identity(self):
        ast = parse_issy(load_text("games/g_dec.issy"))
        assert expand_macros(ast) == ast

    def test_idempotent(self):
        for path in CORPUS:
            once = expand_macros(parse_issy(read_raw(path)))
            assert expand_macros(once) == once

    def test_self_reference(self):
        diags = expand_macros(parse_issy("state int x\ndef a = a\n"))
        assert [d.code for d in diags] == ["CYCLIC_MACRO"]

    def test_forward_reference(self):
        diags = expand_macros(parse_issy("state int x\ndef a = b\ndef b = [x > 0]\n"))
        assert [d.code for d in diags] == ["CYCLIC_MACRO"]

    def test_undefined(self):
        diags = expand_macros(parse_issy("state int x\nformula { assert q }"))
        assert [d.code for d in diags] == ["UNDEFINED_MACRO"]

    def test_predicate_macro(self):
        ast = expand_macros(parse_issy("state int x\ndef k = [x + 1]\nformula { assert [k > 0] }"))
        f = ast.formula_blocks[0].stmts[0].formula
        assert shape(f) == (">", ("+", "x", 1), 0)

    def test_non_atomic_in_predicate(self):
        diags = expand_macros(parse_issy("state int x\ndef k = [x > 1] || [x < 0]\nformula { assert [k] }"))
        assert [d.code for d in diags] == ["MACRO_IN_PRED_NOT_ATOMIC"]


def _elab(text: str):
    return elaborate(expand_macros(parse_issy(text)))


class TestElaborate:
    def test_keep(self):
        spec, _ = _elab("state real load1\nstate real load2\n"
                        "game Safety from a { loc a 1 from a to a with keep(load1 load2) }")
        guard = spec.games[0].transitions[0].guard
        l1, l2 = Var("load1", Sort.REAL), Var("load2", Sort.REAL)
        expect = mk_and(App("=", (Var("load1", Sort.REAL, True), l1)), App("=", (Var("load2", Sort.REAL, True), l2)))
        assert guard == expect

    def test_havoc(self):
        spec, _ = _elab("state int x\ngame Safety from a { loc a 1 from a to a with havoc(x) }")
        assert spec.games[0].transitions[0].guard == TRUE

    def test_color_default_warns(self):
        spec, warnings = _elab("state int x\ngame Safety from a { loc a from a to a with true }")
        assert spec.games[0].locations[0].color == 1
        assert [w.code for w in warnings] == ["COLOR_DEFAULT"]
        assert all(w.severity is Severity.WARNING for w in warnings)

    def test_domain_default(self):
        spec, _ = _elab("state int x\ngame Safety from a { loc a 1 from a to a with true }")
        assert spec.games[0].locations[0].domain == TRUE

    def test_primed_input(self):
        diags = _elab("input int add\nstate int x\ngame Safety from a { loc a 1 from a to a with [add' = 0] }")
        assert [d.code for d in diags] == ["PRIMED_INPUT"]

    def test_no_surface_sugar_left(self):
        for path in CORPUS:
            spec, _ = _elab(read_raw(path))
            for g in spec.games:
                for t in g.transitions:
                    assert "keep" not in str(t.guard) and "havoc" not in str(t.guard)

    def test_formula_structure(self):
        spec, _ = _elab("input real add\nstate int x\nformula { assume F G [add <= 0] assert G [x = 0] }")
        (fb,) = spec.formulas
        assert isinstance(fb.assumes[0], Op) and fb.assumes[0].op == "F"


class TestCheckGlobal:
    def test_two_buechi_games(self):
        with pytest.raises(IssyDiagnostics) as e:
            load_issy(read_raw(DATA / "malformed" / "multiple_nonsafety.issy"))
        assert "MULTIPLE_NONSAFETY" in {d.code for d in e.value.diagnostics}

    def test_safety_only(self):
        spec, _ = load_issy(load_text("games/g_trap.issy"))
        assert not [d for d in check_global(spec) if d.is_error]

    def test_safety_formula_plus_game(self):
        spec, _ = load_issy("state int x\nformula { assert G [x >= 0] }\n"
                            "game Buechi from a { loc a 1 from a to a with true }")
        assert not [d for d in check_global(spec) if d.is_error]

    def test_liveness_formula_plus_game(self):
        with pytest.raises(IssyDiagnostics):
            load_issy("state int x\nformula { assert F [x >= 0] }\n"
                      "game Buechi from a { loc a 1 from a to a with true }")


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.stem)
def test_corpus_accepted(path):
    spec, diags = load_issy(read_raw(path))
    assert not [d for d in diags if d.is_error]


@pytest.mark.parametrize("path", MALFORMED, ids=lambda p: p.stem)
def test_malformed_rejected(path):
    text = read_raw(path)
    with pytest.raises(IssyDiagnostics) as e:
        load_issy(text)
    errs = [d for d in e.value.diagnostics if d.is_error]
    assert errs
    lines = text.splitlines() or [""]
    for d in errs:
        assert 1 <= d.span.line <= len(lines) + 1
        assert 0 <= d.span.offset <= len(text)


def test_malformed_corpus_size():
    assert len(MALFORMED) >= 25


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_spans_within_input(data):
    """Mutated inputs either load or report positioned errors inside the text."""
    base = load_text("balancer.issy")
    pos = data.draw(st.integers(0, len(base)))
    cut = data.draw(st.integers(0, 12))
    junk = data.draw(st.text(alphabet="[]()!&|-<>=' x0.{}/*", max_size=4))
    text = base[:pos] + junk + base[pos + cut:]
    try:
        load_issy(text)
    except IssyDiagnostics as e:
        for d in e.diagnostics:
            assert 0 <= d.span.offset <= len(text)
            assert d.span.offset + d.span.length <= len(text)
            assert d.span.line >= 1 and d.span.col >= 1
