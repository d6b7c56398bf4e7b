import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from issy.errors import BackendError, PrimedInput, SortError, UnknownVariable
from issy.smt import SmtSession, Verdict, check_sat, qelim
from issy.terms import (FALSE, TRUE, App, Const, Priming, Sort, Var, VarEnv, VarKind, apply_priming, evaluate,
                        free_vars, has_quantifier, mk_exists, mk_forall, normalize, num, serialize_smt2,
                        substitute, typecheck)

from conftest import requires_z3
from helpers import ENV, bool_term, int_term, term

x, y, p = Var("x", Sort.INT), Var("y", Sort.INT), Var("p", Sort.BOOL)
xp = Var("x", Sort.INT, True)


class TestTypecheck:
    def test_input_comparison_is_bool(self):
        assert typecheck(term("(<= add 0)"), ENV) is Sort.BOOL

    def test_constant(self):
        assert typecheck(TRUE, ENV) is Sort.BOOL

    def test_bool_in_arithmetic(self):
        with pytest.raises(SortError):
            typecheck(App("+", (TRUE, num(1))), ENV)

    def test_numerals_follow_real_context(self):
        assert typecheck(App("+", (Var("r", Sort.REAL), num(1))), ENV) is Sort.REAL

    def test_mixed_sorts_rejected(self):
        with pytest.raises(SortError):
            typecheck(App("+", (x, Var("r", Sort.REAL))), ENV)

    def test_mod_needs_int(self):
        with pytest.raises(SortError):
            typecheck(App("mod", (Var("r", Sort.REAL), num(2))), ENV)

    def test_division_needs_real(self):
        with pytest.raises(SortError):
            typecheck(App("/", (x, y)), ENV)

    def test_unknown_variable(self):
        with pytest.raises(UnknownVariable):
            typecheck(Var("nope", Sort.INT), ENV)

    def test_primed_input(self):
        with pytest.raises(PrimedInput):
            typecheck(App("=", (Var("i", Sort.INT, True), num(0))), ENV)


class TestSubstitute:
    def test_prime_to_constant(self):
        t = App("=", (xp, App("-", (x, num(1)))))
        assert substitute(t, {xp: num(0)}) == App("=", (num(0, Sort.INT), App("-", (x, num(1)))))

    def test_identity(self):
        assert substitute(x, {}) == x

    def test_simultaneous(self):
        assert substitute(App("+", (x, y)), {x: y}) == App("+", (y, y))
        assert substitute(App("+", (x, y)), {x: y, y: x}) == App("+", (y, x))

    def test_sort_mismatch(self):
        with pytest.raises(SortError):
            substitute(x, {x: TRUE})

    def test_capture_avoidance(self):
        t = mk_exists([y], App("<", (x, y)))
        out = substitute(t, {x: y})
        (v,) = out.vars
        assert v.name != "y"
        assert y in free_vars(out)

    @given(st.integers(0, 10_000))
    def test_preserves_sort(self, seed):
        rng = random.Random(seed)
        t = bool_term(rng, 3)
        m = {x: int_term(rng, 2), y: int_term(rng, 2)}
        assert typecheck(substitute(t, m), ENV) is typecheck(t, ENV)


class TestPriming:
    def test_prime_state(self):
        env = VarEnv.of(("load1", VarKind.STATE, Sort.REAL))
        t = App("=", (Var("load1", Sort.REAL), num(0)))
        out = apply_priming(t, Priming.PRIME_ALL, env)
        assert out == App("=", (Var("load1", Sort.REAL, True), num(0)))

    def test_unprime(self):
        assert apply_priming(App(">=", (xp, num(3))), Priming.UNPRIME_ALL, ENV) == App(">=", (x, num(3)))

    def test_inputs_untouched(self):
        t = term("(<= add 0)")
        assert apply_priming(t, Priming.PRIME_ALL, ENV) == t

    def test_primed_input_rejected(self):
        with pytest.raises(PrimedInput):
            apply_priming(App("=", (Var("i", Sort.INT, True), num(0))), Priming.UNPRIME_ALL, ENV)

    @given(st.integers(0, 10_000))
    def test_roundtrip(self, seed):
        t = bool_term(random.Random(seed), 3, names=("x", "y"))
        primed = apply_priming(t, Priming.PRIME_ALL, ENV)
        assert all(v.primed for v in free_vars(primed) if v.name in ("x", "y"))
        assert apply_priming(primed, Priming.UNPRIME_ALL, ENV) == t


class TestNormalize:
    def test_unit_absorption(self):
        assert normalize(App("and", (TRUE, App(">=", (x, num(0)))))) == App(">=", (x, num(0)))

    def test_double_negation(self):
        assert normalize(App("not", (App("not", (p,)),))) == p

    def test_constant_folding(self):
        t = App("<=", (App("+", (num(1), num(2))), x))
        assert normalize(t) == App("<=", (num(3), x))

    def test_flattening(self):
        a, b, c = (App(">", (x, num(k))) for k in range(3))
        assert normalize(App("and", (a, App("and", (b, c))))) == App("and", (a, b, c))

    def test_euclidean_mod(self):
        assert normalize(App("mod", (num(-7), num(3)))) == Const(Fraction(2), Sort.INT)


@requires_z3
class TestSmt:
    def test_unsat(self, smt):
        assert smt.check_sat([App(">=", (x, num(3))), App("<=", (x, num(1)))]).verdict is Verdict.UNSAT

    def test_model_satisfies_assertions(self, smt):
        a = [App(">=", (x, num(3))), App("<", (App("+", (x, y)), num(0)))]
        res = smt.check_sat(a)
        assert res.sat
        assert all(evaluate(t, res.model) for t in a)

    def test_empty_is_sat(self, smt):
        assert smt.check_sat([]).sat

    def test_module_level_check_sat(self):
        assert check_sat([App(">=", (x, num(3)))], ENV).sat

    def test_implies(self, smt):
        assert smt.check_implies(App(">=", (x, num(3))), App(">=", (x, num(0)))) is True
        assert smt.check_implies(App(">=", (x, num(0))), App(">=", (x, num(3)))) is False
        assert smt.check_implies(p, p) is True

    def test_qelim_one_point(self, smt):
        t = mk_exists([xp], App("and", (App("=", (xp, App("+", (x, num(1))))), App(">=", (xp, num(0))))))
        out, ok = smt.qelim(t)
        assert ok and not has_quantifier(out)
        assert smt.check_implies(out, App(">=", (x, num(-1)))) and smt.check_implies(App(">=", (x, num(-1))), out)

    def test_qelim_vacuous(self, smt):
        body = App(">=", (x, num(3)))
        out, ok = smt.qelim(mk_forall([Var("i", Sort.INT)], body))
        assert ok and smt.check_implies(out, body) and smt.check_implies(body, out)

    def test_qelim_trivial(self, smt):
        out, ok = smt.qelim(mk_exists([xp], App(">=", (xp, x))))
        assert ok and smt.is_valid(out)

    def test_serialization(self):
        assert serialize_smt2(term("(<= add 0)"), ENV) == "(<= add 0)"
        assert serialize_smt2(App("=", (xp, App("+", (x, num(1))))), ENV) == "(= x__p (+ x 1))"
        assert serialize_smt2(TRUE, ENV) == "true"

    def test_bad_command(self):
        with pytest.raises(BackendError):
            with SmtSession("/nonexistent/solver -in") as s:
                s.check_sat([p])

    def test_normalize_equivalence(self, smt):
        rng = random.Random(7)
        for _ in range(1000):
            t = bool_term(rng, 4)
            n = normalize(t)
            assert smt.check_sat([App("not", (App("=", (t, n)),))], want_model=False).verdict is Verdict.UNSAT, t

    def test_serialized_terms_parse(self, smt):
        rng = random.Random(11)
        for _ in range(200):
            smt.check_sat([bool_term(rng, 4), App(">", (Var("r", Sort.REAL), Const(Fraction(1, 3), Sort.REAL)))])

    def test_qelim_matches_enumeration(self, smt):
        rng = random.Random(3)
        box = lambda v: App("and", (App(">=", (v, num(-4))), App("<=", (v, num(4)))))
        checked = 0
        while checked < 40:
            body = bool_term(rng, 3, names=("x", "y"), with_p=False)
            if y not in free_vars(body):
                continue
            q = mk_exists([y], App("and", (box(y), body)))
            out, ok = smt.qelim(q)
            if not ok:
                continue
            checked += 1
            for xv in range(-4, 5):
                expect = any(evaluate(body, {("x", False): xv, ("y", False): yv}) for yv in range(-4, 5))
                assert evaluate(out, {("x", False): xv}) == expect, (body, out, xv)
