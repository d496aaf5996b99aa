"""Kernel tests: sorts, terms, propositions, substitutions, positions."""

import random

import pytest

from resmod.kernel import (
    App,
    ArrowSort,
    Atom,
    BaseSort,
    ContextSort,
    Exists,
    Forall,
    Implies,
    Not,
    Or,
    And,
    RankMismatchError,
    Signature,
    Substitution,
    UnknownSymbolError,
    Var,
    arrow,
    check_prop,
    free_names,
    free_vars,
    positions,
    rename_apart,
    replace_at,
    sort_of,
    subterm_at,
)
from resmod.theories import load_preset
from resmod.parser import parse_prop, parse_term

from helpers import small_signature, random_term


IOTA = BaseSort("iota")
O = BaseSort("o")


def hol_instance_sig() -> Signature:
    """A hand-decorated instance signature for the simply-typed language."""
    sig = Signature()
    sig.sorts["iota"] = IOTA
    sig.sorts["o"] = O
    sig.declare_sort("iota")
    sig.declare_sort("o")
    # K at the instance (iota, o)
    sig.individual("K_io", arrow(IOTA, O, IOTA))
    sig.function("alpha_io", (ArrowSort(IOTA, O), IOTA), O)
    sig.predicate("eps", (O,))
    return sig


class TestSorts:
    def test_arrow_right_associative(self):
        s = arrow(IOTA, O, IOTA)
        assert s == ArrowSort(IOTA, ArrowSort(O, IOTA))
        assert str(s) == "iota -> o -> iota"

    def test_arrow_parenthesizes_left_nesting(self):
        s = ArrowSort(ArrowSort(IOTA, O), O)
        assert str(s) == "(iota -> o) -> o"

    def test_structural_equality_is_the_only_equality(self):
        assert BaseSort("t") == BaseSort("t")
        assert BaseSort("t") != BaseSort("u")
        assert ArrowSort(IOTA, O) != ArrowSort(O, IOTA)

    def test_context_sort(self):
        ctx = ContextSort((IOTA, O), IOTA)
        assert str(ctx) == "iota o |- iota"
        assert ContextSort((), (IOTA, O)) == ContextSort((), (IOTA, O))


class TestSortOf:
    def test_decorated_constant_has_its_declared_arrow_sort(self):
        sig = hol_instance_sig()
        k = App(sig.lookup("K_io"))
        assert sort_of(k, sig) == arrow(IOTA, O, IOTA)

    def test_variable_case(self):
        sig = hol_instance_sig()
        assert sort_of(Var("x", IOTA), sig) == IOTA

    def test_rank_mismatch_on_wrong_argument_sort(self):
        sig = hol_instance_sig()
        # first argument must have sort iota -> o
        bad = App(sig.lookup("alpha_io"), (App(sig.lookup("K_io")), Var("x", IOTA)))
        with pytest.raises(RankMismatchError):
            sort_of(bad, sig)

    def test_unknown_symbol(self):
        sig = hol_instance_sig()
        other = Signature()
        u = other.declare_sort("u")
        mystery = other.individual("mystery", u)
        with pytest.raises(UnknownSymbolError):
            sort_of(App(mystery), sig)

    def test_arity_mismatch(self):
        sig = small_signature()
        f = sig.lookup("f")
        with pytest.raises(RankMismatchError):
            sort_of(App(f, (App(sig.lookup("a")),)), sig)


class TestSubstitution:
    def test_two_times_x_example(self):
        arith = load_preset("arith")
        p = parse_prop("2 * x = 4", arith.sig)
        s = Substitution({"x": arith.sig.numeral(2)})
        assert s(p) == parse_prop("2 * 2 = 4", arith.sig)

    def test_empty_substitution_is_identity(self):
        arith = load_preset("arith")
        p = parse_prop("forall x:nat (x = x)", arith.sig)
        assert Substitution()(p) == p

    def test_capture_avoidance_renames_the_binder(self):
        sig = small_signature()
        u = sig.sorts["u"]
        x, y = Var("x", u), Var("y", u)
        p = Forall(y, Atom(sig.lookup("p"), (x, y)))
        q = Substitution({"x": y})(p)
        # the result must be alpha-equivalent to forall y' p(y, y')
        fresh = Var("w", u)
        expected = Forall(fresh, Atom(sig.lookup("p"), (y, fresh)))
        assert q == expected
        assert free_vars(q) == frozenset({y})

    def test_idempotent_substitutions_are_enforced(self):
        u = BaseSort("u")
        with pytest.raises(ValueError):
            Substitution({"x": App(small_signature().lookup("g"), (Var("x", u),))})

    def test_application_is_a_homomorphism(self):
        sig = small_signature()
        u = sig.sorts["u"]
        rng = random.Random(7)
        for _ in range(100):
            t1 = random_term(rng, sig, 3)
            t2 = random_term(rng, sig, 3)
            s = Substitution({"x": random_term(rng, sig, 2, var_names=("w",)),
                              "y": App(sig.lookup("b"))})
            f = sig.lookup("f")
            assert s(App(f, (t1, t2))) == App(f, (s(t1), s(t2)))
            a1 = Atom(sig.lookup("p"), (t1, t2))
            a2 = Atom(sig.lookup("p"), (t2, t1))
            assert s(Or(a1, a2)) == Or(s(a1), s(a2))

    def test_applying_twice_equals_once(self):
        sig = small_signature()
        rng = random.Random(11)
        for _ in range(200):
            t = random_term(rng, sig, 4)
            s = Substitution({"x": random_term(rng, sig, 2, var_names=("u", "z")),
                              "y": random_term(rng, sig, 2, var_names=("u",))})
            once = s(t)
            assert s(once) == once

    def test_compose(self):
        sig = small_signature()
        u = sig.sorts["u"]
        a = App(sig.lookup("a"))
        s1 = Substitution({"x": Var("y", u)})
        s2 = Substitution({"y": a})
        composed = s1.compose(s2)
        assert composed(Var("x", u)) == a
        assert composed(Var("y", u)) == a


class TestAlphaEquality:
    def test_bound_names_are_irrelevant(self):
        sig = small_signature()
        u = sig.sorts["u"]
        p = sig.lookup("p")
        one = Forall(Var("x", u), Exists(Var("y", u), Atom(p, (Var("x", u), Var("y", u)))))
        two = Forall(Var("v", u), Exists(Var("w", u), Atom(p, (Var("v", u), Var("w", u)))))
        assert one == two
        assert hash(one) == hash(two)

    def test_different_binding_structure_differs(self):
        sig = small_signature()
        u = sig.sorts["u"]
        p = sig.lookup("p")
        one = Forall(Var("x", u), Forall(Var("y", u), Atom(p, (Var("x", u), Var("y", u)))))
        two = Forall(Var("x", u), Forall(Var("y", u), Atom(p, (Var("y", u), Var("x", u)))))
        assert one != two

    def test_print_parse_round_trip_is_alpha_stable(self):
        arith = load_preset("arith")
        p = parse_prop("forall x:nat (exists y:nat (x + y = x))", arith.sig)
        assert parse_prop(str(p), arith.sig) == p


class TestPositions:
    def test_path_addressing(self):
        sig = small_signature()
        f, g = sig.lookup("f"), sig.lookup("g")
        a, b = App(sig.lookup("a")), App(sig.lookup("b"))
        t = App(f, (a, App(g, (b,))))
        assert subterm_at(t, (2, 1)) == b

    def test_replace_child(self):
        sig = small_signature()
        g = sig.lookup("g")
        a, b = App(sig.lookup("a")), App(sig.lookup("b"))
        assert replace_at(App(g, (a,)), (1,), b) == App(g, (b,))

    def test_replace_atom_at_root_by_disjunction(self):
        rings = load_preset("integral-rings")
        atom = parse_prop("a * a = Y", rings.sig)
        new = parse_prop("x = 0 \\/ y = 0", rings.sig)
        assert replace_at(atom, (), new) == new

    def test_round_trip_identity_on_random_trees(self):
        sig = small_signature()
        rng = random.Random(3)
        for _ in range(300):
            t = random_term(rng, sig, 4)
            for pos in positions(t):
                assert replace_at(t, pos, subterm_at(t, pos)) == t

    def test_invalid_position(self):
        from resmod.kernel import InvalidPositionError

        sig = small_signature()
        with pytest.raises(InvalidPositionError):
            subterm_at(App(sig.lookup("a")), (1,))


class TestFreeVarsAndRenaming:
    def test_quantifier_masks_its_variable(self):
        sig = small_signature()
        u = sig.sorts["u"]
        p = Forall(Var("x", u), Atom(sig.lookup("p"), (Var("x", u), Var("y", u))))
        assert free_names(p) == frozenset({"y"})

    def test_rename_apart_on_disjoint_values_is_identity(self):
        sig = small_signature()
        t = parse_term("f(x, y)", sig)
        renamed, s = rename_apart({"u", "w"}, t)
        assert renamed == t and s.is_empty()

    def test_rename_apart_yields_fresh_variant(self):
        sig = small_signature()
        t = parse_term("f(x, g(y))", sig)
        renamed, s = rename_apart({"x", "y"}, t)
        assert not (free_names(renamed) & {"x", "y"})
        # a variant: renaming back gives the original
        back = {v.name: Var(k, v.sort) for k, v in s.map.items()}
        from resmod.kernel import subst_term

        assert subst_term(renamed, back) == t

    def test_well_sortedness_preserved_by_substitution(self):
        sig = small_signature()
        rng = random.Random(23)
        for _ in range(100):
            t = random_term(rng, sig, 4)
            s = Substitution({"x": random_term(rng, sig, 2, var_names=("w",))})
            sort_of(s(t), sig)  # raises on violation

    def test_check_prop_accepts_preset_axioms(self):
        for name in ("arith", "set-cantor"):
            preset = load_preset(name)
            for ax in preset.axioms:
                check_prop(ax, preset.sig)
