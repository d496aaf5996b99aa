"""Clausal transformation tests: NNF, skolemization, CNF, reclausification."""

import random

import pytest

from resmod.clausal import (
    ClausalResult,
    Constraint,
    ConstrainedClause,
    Literal,
    clausal_form,
    is_nnf,
    nnf,
    reclausify,
    renormalize_clause,
    skolemize,
)
from resmod.kernel import (
    And,
    App,
    Atom,
    Exists,
    Forall,
    FUNCTION,
    INDIVIDUAL,
    Not,
    Or,
    Signature,
    Var,
    free_names,
)
from resmod.rewrite import EMPTY_SYSTEM
from resmod.theories import load_preset
from resmod.parser import parse_prop, parse_term_or_atom

from helpers import (
    all_valuations,
    clause_sets_isomorphic,
    clause_variant,
    eval_clause,
    eval_ground,
    random_ground_prop,
)


class TestNnf:
    def test_de_morgan(self):
        sig = Signature()
        a = Atom(sig.predicate("A", ()), ())
        b = Atom(sig.predicate("B", ()), ())
        assert nnf(Not(Or(a, b))) == And(Not(a), Not(b))

    def test_negated_existential_implication(self):
        rings = load_preset("integral-rings")
        p = parse_prop("~(exists y (a * a = y => a = y))", rings.sig)
        expected = parse_prop("forall y (a * a = y /\\ ~(a = y))", rings.sig)
        assert nnf(p) == expected

    def test_atom_is_a_fixpoint(self):
        sig = Signature()
        a = Atom(sig.predicate("A", ()), ())
        assert nnf(a) == a

    def test_iff_expands_to_both_implications(self):
        sig = Signature()
        a = Atom(sig.predicate("A", ()), ())
        b = Atom(sig.predicate("B", ()), ())
        out = nnf(parse_prop("A <=> B", sig))
        assert out == And(Or(Not(a), b), Or(Not(b), a))

    def test_result_is_in_nnf_and_equivalent(self):
        sig = Signature()
        preds = [sig.predicate(f"P{i}", ()) for i in range(4)]
        names = [p.name for p in preds]
        rng = random.Random(17)
        for _ in range(300):
            p = random_ground_prop(rng, preds, 4)
            q = nnf(p)
            assert is_nnf(q)
            for v in all_valuations(names):
                assert eval_ground(p, v) == eval_ground(q, v)


class TestSkolemize:
    def test_function_symbol_for_existential_under_universal(self):
        sig = Signature()
        t = sig.declare_sort("t")
        u = sig.declare_sort("u")
        p = sig.predicate("p", (t, u))
        x, y = Var("x", t), Var("y", u)
        prop = Forall(x, Exists(y, Atom(p, (x, y))))
        out, _, records = skolemize(prop, sig)
        assert len(records) == 1
        rec = records[0]
        assert rec.symbol.kind == FUNCTION
        assert rec.rank == ((t,), u)
        assert isinstance(out, Forall)
        atom = out.body
        assert isinstance(atom, Atom)
        witness = atom.args[1]
        assert isinstance(witness, App) and witness.sym == rec.symbol
        assert witness.args == (out.var,)

    def test_empty_prefix_gives_individual(self):
        sig = Signature()
        t = sig.declare_sort("t")
        p = sig.predicate("p", (t,))
        prop = Exists(Var("x", t), Atom(p, (Var("x", t),)))
        out, _, records = skolemize(prop, sig)
        assert records[0].symbol.kind == INDIVIDUAL
        assert isinstance(out, Atom)

    def test_skolems_are_never_arrow_sorted_stand_ins(self):
        # every record with a nonempty prefix owns a genuine function rank
        sc = load_preset("set-cantor")
        collected = []
        for ax in sc.axioms:
            res = clausal_form(ax, sc.system, sc.sig)
            collected += res.records
        assert collected
        for rec in collected:
            args, _result = rec.rank
            if args:
                assert rec.symbol.kind == FUNCTION
                assert rec.symbol.arg_sorts == args
            else:
                assert rec.symbol.kind == INDIVIDUAL

    def test_surjectivity_axiom_witnesses_take_the_universal(self):
        sc = load_preset("set-cantor")
        res = clausal_form(sc.axioms[0], sc.system, sc.sig)
        assert len(res.records) == 2
        for rec in res.records:
            assert rec.symbol.kind == FUNCTION
            assert len(rec.symbol.arg_sorts) == 1


class TestClausalForm:
    def test_chain_head_reduces_to_the_empty_clause(self):
        chain = load_preset("chain(3)")
        res = clausal_form(chain.axioms[0], chain.system, chain.sig)
        assert len(res.clauses) == 1
        assert res.clauses[0].is_empty()
        assert res.normalized

    def test_leibniz_surjectivity_yields_the_two_clauses(self):
        theory = load_preset("hol-comb")
        sig = theory.sig
        sig.individual("f", sig.sorts["term"])
        sig.individual("g", sig.sorts["term"])
        p = parse_prop("forall x (forall p (eps((p (f (g x)))) <=> eps((p x))))", sig)
        res = clausal_form(p, theory.system, sig)
        env = {}
        expected = [
            ConstrainedClause([
                Literal(False, parse_term_or_atom("eps((P (f (g X))))", sig, env)),
                Literal(True, parse_term_or_atom("eps((P X))", sig, env)),
            ]),
            ConstrainedClause([
                Literal(True, parse_term_or_atom("eps((Q (f (g Y))))", sig, env)),
                Literal(False, parse_term_or_atom("eps((Q Y))", sig, env)),
            ]),
        ]
        assert clause_sets_isomorphic(res.clauses, expected)

    def test_single_atom(self):
        sig = Signature()
        b = Atom(sig.predicate("B", ()), ())
        res = clausal_form(b, EMPTY_SYSTEM, sig)
        assert len(res.clauses) == 1
        assert res.clauses[0].literals == (Literal(True, b),)

    def test_atoms_in_output_are_normal_when_fuel_sufficed(self):
        sc = load_preset("set-cantor")
        from resmod.rewrite import reduce_once

        for ax in sc.axioms:
            res = clausal_form(ax, sc.system, sc.sig)
            assert res.normalized
            for c in res.clauses:
                for lit in c.literals:
                    assert reduce_once(lit.atom, sc.system) is None

    def test_fuel_exhaustion_is_flagged_not_fatal(self):
        from resmod.theories import russell_theory

        preset, _ = russell_theory()
        p = parse_prop("russell(a) in russell(a)", preset.sig)
        res = clausal_form(p, preset.system, preset.sig, fuel=10)
        assert not res.normalized
        assert res.clauses  # proceeds with the partial form

    def test_ground_equivalence_by_truth_table(self):
        sig = Signature()
        preds = [sig.predicate(f"P{i}", ()) for i in range(4)]
        names = [p.name for p in preds]
        rng = random.Random(29)
        for _ in range(400):
            p = random_ground_prop(rng, preds, 4)
            res = clausal_form(p, EMPTY_SYSTEM, sig)
            for v in all_valuations(names):
                assert eval_ground(p, v) == all(eval_clause(c, v) for c in res.clauses)


class TestReclausify:
    def test_ring_narrowing_shape(self):
        rings = load_preset("integral-rings")
        env = {}
        atom = parse_term_or_atom("a * a = Y", rings.sig, env)
        clause = ConstrainedClause([Literal(True, atom)])
        replacement = parse_prop("x = 0 \\/ y = 0", rings.sig, env=env)
        lhs = parse_term_or_atom("x * y = 0", rings.sig, env)
        res = reclausify(clause, 0, replacement, rings.system, rings.sig,
                         extra_constraints=[Constraint(atom, lhs)])
        assert len(res.clauses) == 1
        out = res.clauses[0]
        assert {str(l) for l in out.literals} == {"x = 0", "y = 0"}
        assert out.constraints == frozenset({Constraint(atom, lhs)})

    def test_negative_literal_splits_by_de_morgan(self):
        hol = load_preset("hol-comb")
        sig = hol.sig
        env = {}
        big = parse_term_or_atom("eps((P X))", sig, env)
        keep = parse_term_or_atom("eps((Q Y))", sig, env)
        clause = ConstrainedClause([Literal(False, big), Literal(True, keep)])
        replacement = parse_prop("eps(A) \\/ eps(B)", sig, env=env)
        res = reclausify(clause, 0, replacement, EMPTY_SYSTEM, sig)
        assert len(res.clauses) == 2
        texts = {c.literal_text() for c in res.clauses}
        assert texts == {"~eps(A), eps((Q Y))", "~eps(B), eps((Q Y))"}

    def test_parent_constraints_are_never_dropped(self):
        rings = load_preset("integral-rings")
        env = {}
        a1 = parse_term_or_atom("a * a = Y", rings.sig, env)
        a2 = parse_term_or_atom("a = Z", rings.sig, env)
        parent_con = Constraint(parse_term_or_atom("Y", rings.sig, env),
                                parse_term_or_atom("Z", rings.sig, env))
        clause = ConstrainedClause([Literal(True, a1), Literal(True, a2)], [parent_con])
        replacement = parse_prop("x = 0 \\/ y = 0", rings.sig, env=env)
        res = reclausify(clause, 0, replacement, rings.system, rings.sig)
        for c in res.clauses:
            assert parent_con in c.constraints

    def test_fresh_skolems_under_a_negative_literal(self):
        sc = load_preset("set-cantor")
        env = {}
        atom = parse_term_or_atom("Z in C", sc.sig, env)
        clause = ConstrainedClause([Literal(False, atom)])
        res, changed = renormalize_clause(clause, sc.system, sc.sig)
        assert changed
        # ~(Z in B /\ forall y (<Z,y> in R => ~(Z in y))) splits into two
        # clauses, one with a skolem witness depending on Z
        assert len(res.clauses) == 2
        deps = [rec for rec in res.records] if hasattr(res, 'records') else []
        new_syms = {a.sym.name
                    for c in res.clauses
                    for l in c.literals
                    for a in _apps_of(l.atom)
                    if a.sym.origin == "skolem"}
        assert len(new_syms) == 1
        sym = sc.sig.lookup(next(iter(new_syms)))
        assert sym.kind == FUNCTION and len(sym.arg_sorts) == 1


def _apps_of(x):
    stack = list(x.args)
    while stack:
        t = stack.pop()
        if isinstance(t, App):
            yield t
            stack.extend(t.args)


class TestClauseBasics:
    def test_duplicate_literals_merge(self):
        sig = Signature()
        a = Atom(sig.predicate("A", ()), ())
        c = ConstrainedClause([Literal(True, a), Literal(True, a)])
        assert len(c.literals) == 1

    def test_clause_equality_ignores_order_and_id(self):
        sig = Signature()
        a = Atom(sig.predicate("A", ()), ())
        b = Atom(sig.predicate("B", ()), ())
        c1 = ConstrainedClause([Literal(True, a), Literal(False, b)], id=1)
        c2 = ConstrainedClause([Literal(False, b), Literal(True, a)], id=9)
        assert c1 == c2 and hash(c1) == hash(c2)

    def test_constraint_is_symmetric(self):
        sig = Signature()
        u = sig.declare_sort("u")
        x, y = Var("x", u), Var("y", u)
        assert Constraint(x, y) == Constraint(y, x)
        assert hash(Constraint(x, y)) == hash(Constraint(y, x))

    def test_constraint_sides_same_kind(self):
        sig = Signature()
        u = sig.declare_sort("u")
        a = Atom(sig.predicate("A", ()), ())
        with pytest.raises(TypeError):
            Constraint(Var("x", u), a)
