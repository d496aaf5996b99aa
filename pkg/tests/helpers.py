"""Shared test utilities: independent oracles and structural comparators."""

from __future__ import annotations

import random

from resmod.kernel import (
    And,
    App,
    Atom,
    Bottom,
    Iff,
    Implies,
    Not,
    Or,
    Prop,
    Signature,
    Term,
    Top,
    Var,
    _Binary,
    _Quant,
)
from resmod.clausal import ConstrainedClause, Literal


# ---------------------------------------------------------------------------
# Truth-table oracle for ground propositional logic
# ---------------------------------------------------------------------------


def eval_ground(p: Prop, valuation: dict[str, bool]) -> bool:
    """Evaluate a quantifier-free proposition whose atoms are nullary."""
    match p:
        case Atom():
            return valuation[p.pred.name]
        case Top():
            return True
        case Bottom():
            return False
        case Not():
            return not eval_ground(p.body, valuation)
        case And():
            return eval_ground(p.left, valuation) and eval_ground(p.right, valuation)
        case Or():
            return eval_ground(p.left, valuation) or eval_ground(p.right, valuation)
        case Implies():
            return (not eval_ground(p.left, valuation)) or eval_ground(p.right, valuation)
        case Iff():
            return eval_ground(p.left, valuation) == eval_ground(p.right, valuation)
    raise TypeError(f"not ground propositional: {p!r}")


def eval_clause(c: ConstrainedClause, valuation: dict[str, bool]) -> bool:
    return any(valuation[l.atom.pred.name] == l.positive for l in c.literals)


def all_valuations(names: list[str]):
    for bits in range(2 ** len(names)):
        yield {n: bool(bits >> i & 1) for i, n in enumerate(names)}


def truth_table(p: Prop, names: list[str]) -> list[bool]:
    return [eval_ground(p, v) for v in all_valuations(names)]


def random_ground_prop(rng: random.Random, preds: list, depth: int) -> Prop:
    if depth == 0 or rng.random() < 0.3:
        roll = rng.random()
        if roll < 0.05:
            return Top()
        if roll < 0.1:
            return Bottom()
        return Atom(rng.choice(preds), ())
    kind = rng.randrange(5)
    if kind == 0:
        return Not(random_ground_prop(rng, preds, depth - 1))
    cls = (And, Or, Implies, Iff)[kind - 1]
    return cls(random_ground_prop(rng, preds, depth - 1),
               random_ground_prop(rng, preds, depth - 1))


# ---------------------------------------------------------------------------
# Alpha-variant and isomorphism checks on clauses
# ---------------------------------------------------------------------------


def _match_tree(a, b, var_map: dict, sym_map: dict, flex: frozenset[str]) -> bool:
    """Structural equality up to a variable bijection and a bijection on
    the symbols named in ``flex``."""
    if isinstance(a, Var) != isinstance(b, Var):
        return False
    if isinstance(a, Var):
        bound = var_map.get(("v", a.name))
        if bound is not None:
            return bound == b.name
        if ("v*", b.name) in var_map:
            return False
        var_map[("v", a.name)] = b.name
        var_map[("v*", b.name)] = a.name
        return True
    names_differ = a.sym.name != b.sym.name
    if a.sym.name in flex or b.sym.name in flex:
        bound = sym_map.get(("s", a.sym.name))
        if bound is not None:
            if bound != b.sym.name:
                return False
        else:
            if ("s*", b.sym.name) in sym_map:
                return False
            sym_map[("s", a.sym.name)] = b.sym.name
            sym_map[("s*", b.sym.name)] = a.sym.name
    elif names_differ:
        return False
    if len(a.args) != len(b.args):
        return False
    return all(_match_tree(x, y, var_map, sym_map, flex) for x, y in zip(a.args, b.args))


def _match_literal(a: Literal, b: Literal, var_map, sym_map, flex) -> bool:
    if a.positive != b.positive or a.atom.pred.name != b.atom.pred.name:
        return False
    if len(a.atom.args) != len(b.atom.args):
        return False
    return all(_match_tree(x, y, var_map, sym_map, flex)
               for x, y in zip(a.atom.args, b.atom.args))


def clauses_isomorphic(c1: ConstrainedClause, c2: ConstrainedClause,
                       flex_symbols: frozenset[str] = frozenset(),
                       var_map: dict | None = None,
                       sym_map: dict | None = None) -> bool:
    """Same clause up to literal order, a variable bijection, and a
    bijection of the ``flex_symbols`` (used for generated skolem names)."""
    if len(c1.literals) != len(c2.literals):
        return False
    base_vars = dict(var_map) if var_map else {}
    base_syms = dict(sym_map) if sym_map else {}

    def go(i: int, used: set[int], vm: dict, sm: dict) -> bool:
        if i == len(c1.literals):
            if var_map is not None:
                var_map.update(vm)
            if sym_map is not None:
                sym_map.update(sm)
            return True
        for j, lb in enumerate(c2.literals):
            if j in used:
                continue
            vm2, sm2 = dict(vm), dict(sm)
            if _match_literal(c1.literals[i], lb, vm2, sm2, flex_symbols):
                if go(i + 1, used | {j}, vm2, sm2):
                    return True
        return False

    return go(0, set(), base_vars, base_syms)


def clause_variant(c1: ConstrainedClause, c2: ConstrainedClause) -> bool:
    return clauses_isomorphic(c1, c2)


def clause_sets_isomorphic(actual: list[ConstrainedClause],
                           expected: list[ConstrainedClause],
                           flex_symbols: frozenset[str] = frozenset()) -> bool:
    """Set-level isomorphism with one shared symbol bijection; variable
    renamings are local to each clause pair."""
    if len(actual) != len(expected):
        return False

    def go(i: int, used: set[int], sym_map: dict) -> bool:
        if i == len(expected):
            return True
        for j, a in enumerate(actual):
            if j in used:
                continue
            sm = dict(sym_map)
            if clauses_isomorphic(expected[i], a, flex_symbols,
                                  var_map={}, sym_map=sm):
                if go(i + 1, used | {j}, sm):
                    return True
        return False

    return go(0, set(), {})


def contains_isomorphic(clauses, expected: ConstrainedClause,
                        flex_symbols: frozenset[str] = frozenset()) -> bool:
    return any(clauses_isomorphic(expected, c, flex_symbols) for c in clauses)


# ---------------------------------------------------------------------------
# Random first-order terms
# ---------------------------------------------------------------------------


def small_signature() -> Signature:
    sig = Signature()
    s = sig.declare_sort("u")
    sig.individual("a", s)
    sig.individual("b", s)
    sig.individual("c", s)
    sig.function("f", (s, s), s)
    sig.function("g", (s,), s)
    sig.predicate("p", (s, s))
    return sig


def random_term(rng: random.Random, sig: Signature, depth: int,
                var_names=("x", "y", "z", "u")) -> Term:
    s = sig.sorts["u"]
    if depth == 0 or rng.random() < 0.35:
        if rng.random() < 0.5:
            return Var(rng.choice(var_names), s)
        return App(sig.lookup(rng.choice("abc")))
    if rng.random() < 0.5:
        return App(sig.lookup("f"), (random_term(rng, sig, depth - 1, var_names),
                                     random_term(rng, sig, depth - 1, var_names)))
    return App(sig.lookup("g"), (random_term(rng, sig, depth - 1, var_names),))


def random_ground_term(rng: random.Random, sig: Signature, depth: int) -> Term:
    if depth == 0 or rng.random() < 0.4:
        return App(sig.lookup(rng.choice("abc")))
    if rng.random() < 0.5:
        return App(sig.lookup("f"), (random_ground_term(rng, sig, depth - 1),
                                     random_ground_term(rng, sig, depth - 1)))
    return App(sig.lookup("g"), (random_ground_term(rng, sig, depth - 1),))
