"""Rewrite engine tests: matching, reduction, normalization, orthogonality."""

import random

import pytest

from resmod.kernel import And, App, Atom, Not, Var, free_names, sort_of
from resmod.rewrite import (
    EMPTY_SYSTEM,
    RewriteRule,
    RewriteSystem,
    RuleClassError,
    check_orthogonal,
    match,
    normalize,
    reduce_once,
)
from resmod.theories import load_preset, russell_theory
from resmod.parser import parse_prop, parse_term, parse_term_or_atom

from helpers import small_signature, random_term


class TestRuleClasses:
    def test_term_rule_is_class_e(self):
        arith = load_preset("arith")
        assert [r.cls for r in arith.system.rules] == ["E"] * 4

    def test_atom_rule_is_class_r(self):
        rings = load_preset("integral-rings")
        assert [r.cls for r in rings.system.rules] == ["R"]

    def test_free_rhs_variable_rejected(self):
        sig = small_signature()
        with pytest.raises(RuleClassError):
            RewriteRule("bad", parse_term("g(x)", sig), parse_term("y", sig))

    def test_variable_lhs_rejected(self):
        sig = small_signature()
        u = sig.sorts["u"]
        with pytest.raises(RuleClassError):
            RewriteRule("bad", Var("x", u), Var("x", u))

    def test_partition_is_exhaustive_and_disjoint(self):
        hol = load_preset("hol-comb")
        assert set(hol.system.e_rules) | set(hol.system.r_rules) == set(hol.system.rules)
        assert not set(hol.system.e_rules) & set(hol.system.r_rules)


class TestMatch:
    def test_combinator_pattern(self):
        hol = load_preset("hol-comb")
        pattern = parse_term("(K x y)", hol.sig)
        subject = parse_term("(K a b)", hol.sig)
        b = match(pattern, subject)
        assert b is not None
        assert b["x"] == parse_term("a", hol.sig)
        assert b["y"] == parse_term("b", hol.sig)

    def test_nonlinear_pattern_mismatch(self):
        hol = load_preset("hol-comb")
        pattern = parse_term("(K x x)", hol.sig)
        subject = parse_term("(K a b)", hol.sig)
        assert match(pattern, subject) is None

    def test_atom_match_against_pair_rule(self):
        st = load_preset("set")
        env = {}
        pattern = parse_term_or_atom("w in {x, y}", st.sig, env)
        subject = parse_term_or_atom("c0 in {a0, b0}", st.sig, env)
        b = match(pattern, subject)
        assert b is not None
        assert sorted(b) == ["w", "x", "y"]
        assert str(b["w"]) == "c0"
        assert str(b["x"]) == "a0"
        assert str(b["y"]) == "b0"

    def test_match_instantiates_pattern_to_subject(self):
        sig = small_signature()
        from resmod.kernel import subst_term

        rng = random.Random(5)
        hits = 0
        for _ in range(300):
            pattern = random_term(rng, sig, 3)
            subject = random_term(rng, sig, 3, var_names=("q", "r"))
            b = match(pattern, subject)
            if b is not None:
                hits += 1
                assert subst_term(pattern, b) == subject
        assert hits > 10


class TestReduceOnce:
    def test_k_redex(self):
        hol = load_preset("hol-comb")
        t = parse_term("(K a b)", hol.sig)
        red = reduce_once(t, hol.system)
        assert red is not None
        assert red[0] == parse_term("a", hol.sig)
        assert red[1] == "k"

    def test_normal_term_with_empty_system(self):
        hol = load_preset("hol-comb")
        assert reduce_once(parse_term("a", hol.sig), EMPTY_SYSTEM) is None

    def test_russell_membership_unfolds_once(self):
        preset, _ = russell_theory()
        a = parse_prop("russell(a) in russell(a)", preset.sig)
        red = reduce_once(a, preset.system)
        assert red is not None
        expected = parse_prop("russell(a) in a /\\ ~(russell(a) in russell(a))",
                              preset.sig)
        assert red[0] == expected

    def test_subject_reduction_preserves_sorts_and_free_variables(self):
        hol = load_preset("hol-comb")
        rng = random.Random(9)
        term = hol.sig.sorts["term"]
        for _ in range(200):
            t = random_comb_term(rng, hol.sig, 4)
            red = reduce_once(t, hol.system)
            if red is not None:
                assert sort_of(red[0], hol.sig) == term
                assert free_names(red[0]) <= free_names(t)


def random_comb_term(rng, sig, depth, with_vars: bool = False):
    app = sig.lookup("app")
    leaves = ["S", "K", "a", "b", "c"]
    if depth == 0 or rng.random() < 0.3:
        if with_vars and rng.random() < 0.3:
            return Var(rng.choice(("x", "y")), sig.sorts["term"])
        return App(sig.lookup(rng.choice(leaves)))
    return App(app, (random_comb_term(rng, sig, depth - 1, with_vars),
                     random_comb_term(rng, sig, depth - 1, with_vars)))


class TestNormalize:
    def test_two_times_two(self):
        arith = load_preset("arith")
        t = parse_term("S(S(0)) * S(S(0))", arith.sig)
        out = normalize(t, arith.system, 100)
        assert out.normal
        assert out.value == arith.sig.numeral(4)

    def test_fuel_one_on_normal_input(self):
        sig = small_signature()
        t = parse_term("a", sig)
        out = normalize(t, EMPTY_SYSTEM, 1)
        assert out.normal and out.steps == 0 and out.value == t

    def test_russell_proposition_has_no_normal_form(self):
        preset, _ = russell_theory()
        a = parse_prop("russell(a) in russell(a)", preset.sig)
        out = normalize(a, preset.system, 50)
        assert not out.normal
        b = parse_prop("russell(a) in a", preset.sig)
        step1 = And(b, Not(a))
        step2 = And(b, Not(step1))
        step3 = And(b, Not(step2))
        assert [v for _, v in out.trace[:3]] == [step1, step2, step3]

    def test_determinism(self):
        arith = load_preset("arith")
        t = parse_term("S(S(S(0))) * S(S(0)) + S(0)", arith.sig)
        out1 = normalize(t, arith.system, 100)
        out2 = normalize(t, arith.system, 100)
        assert out1 == out2

    def test_fuel_must_be_positive(self):
        with pytest.raises(ValueError):
            normalize(parse_term("a", small_signature()), EMPTY_SYSTEM, 0)

    def test_strategies_agree_on_normalizing_combinator_terms(self):
        hol = load_preset("hol-comb")
        rng = random.Random(42)
        agreed = 0
        tries = 0
        while agreed < 1000 and tries < 20_000:
            tries += 1
            t = random_comb_term(rng, hol.sig, rng.randint(1, 5))
            lo = normalize(t, hol.system, 300, strategy="leftmost_outermost")
            ri = normalize(t, hol.system, 300, strategy="rightmost_innermost")
            if lo.normal and ri.normal:
                assert lo.value == ri.value, f"strategies disagree on {t}"
                agreed += 1
        assert agreed >= 1000


class TestOrthogonality:
    def test_set_rules_orthogonal(self):
        st = load_preset("set")
        assert check_orthogonal(st.system, representative_only=("subset_",))

    def test_combinator_rules_orthogonal(self):
        hol = load_preset("hol-comb")
        assert check_orthogonal(hol.system)

    def test_root_overlap_detected(self):
        sig = small_signature()
        r1 = RewriteRule("collapse", parse_term("g(x)", sig), parse_term("x", sig))
        r2 = RewriteRule("tofix", parse_term("g(a)", sig), parse_term("b", sig))
        report = check_orthogonal(RewriteSystem([r1, r2]))
        assert not report.orthogonal
        assert "collapse" in report.diagnostic and "tofix" in report.diagnostic

    def test_nonlinear_rule_detected(self):
        sig = small_signature()
        rule = RewriteRule("diag", parse_term("f(x, x)", sig), parse_term("x", sig))
        report = check_orthogonal(RewriteSystem([rule]))
        assert not report.orthogonal
        assert "left-linear" in report.diagnostic

    def test_inner_overlap_detected(self):
        sig = small_signature()
        r1 = RewriteRule("outer", parse_term("g(g(x))", sig), parse_term("x", sig))
        r2 = RewriteRule("inner", parse_term("g(a)", sig), parse_term("b", sig))
        assert not check_orthogonal(RewriteSystem([r1, r2]))

    def test_explicit_substitution_rules_are_not_orthogonal(self):
        # conditional eta, a non-left-linear rule, and overlapping
        # structural rules: three independent reasons
        hs = load_preset("hol-sigma")
        assert not check_orthogonal(hs.system)
        without_eta = hs.system.without_eta()
        report = check_orthogonal(without_eta)
        assert not report.orthogonal
