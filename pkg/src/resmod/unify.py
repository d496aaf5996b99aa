"""Unification: syntactic, equational (by bounded basic narrowing), and
solution checking against a constraint store.

Equational unification explores narrowing steps breadth-first at basic
positions only (never inside substitution-introduced subterms), attempting
plain syntactic unification at every state.  The search is bounded both by
a narrowing depth and a total state budget; truncation yields an Unknown
outcome, never a verdict.  Every substitution returned as a solution has
been re-checked by joining both sides of every equation to a common normal
form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .kernel import (
    App,
    Atom,
    Position,
    Prop,
    SortMismatchError,
    Substitution,
    Symbol,
    Term,
    Var,
    free_names,
    is_term,
    subst_term,
    term_sort,
    term_var_names,
)
from .clausal import Constraint, ConstrainedClause
from .rewrite import E_CLASS, EtaRule, RewriteRule, RewriteSystem, normalize


# ---------------------------------------------------------------------------
# Syntactic unification
# ---------------------------------------------------------------------------


def _bind(sigma: dict[str, Term], name: str, value: Term) -> dict[str, Term] | None:
    if name in term_var_names(value):
        return None  # occurs check
    one = {name: value}
    out = {k: subst_term(v, one) for k, v in sigma.items()}
    out[name] = value
    return out


def unify_terms(t: Term, u: Term, sigma: dict[str, Term] | None = None) -> dict[str, Term] | None:
    """Most general unifier of two terms as a raw binding map, or None."""
    sigma = dict(sigma) if sigma else {}
    stack = [(t, u)]
    while stack:
        a, b = stack.pop()
        a = subst_term(a, sigma)
        b = subst_term(b, sigma)
        if a == b:
            continue
        if isinstance(a, Var):
            if term_sort(b) != a.sort:
                return None
            sigma = _bind(sigma, a.name, b)
            if sigma is None:
                return None
        elif isinstance(b, Var):
            if term_sort(a) != b.sort:
                return None
            sigma = _bind(sigma, b.name, a)
            if sigma is None:
                return None
        elif a.sym.name == b.sym.name and len(a.args) == len(b.args):
            stack.extend(zip(a.args, b.args))
        else:
            return None
    return sigma


def unify_syntactic(t: Term | Atom, u: Term | Atom) -> Substitution | None:
    """Most general unifier (idempotent, occurs-check enforced) or None.

    Accepts two terms of one sort or two atoms; atoms with different
    predicates are simply not unifiable.  Mixing a term with an atom, or
    terms of different sorts, raises SortMismatchError.
    """
    t_atom, u_atom = isinstance(t, Atom), isinstance(u, Atom)
    if t_atom != u_atom:
        raise SortMismatchError("cannot unify a term with an atom")
    if t_atom:
        if t.pred.name != u.pred.name or len(t.args) != len(u.args):
            return None
        sigma: dict[str, Term] | None = {}
        for a, b in zip(t.args, u.args):
            sigma = unify_terms(a, b, sigma)
            if sigma is None:
                return None
        return Substitution(sigma)
    if isinstance(t, Var) or isinstance(u, Var):
        if term_sort(t) != term_sort(u):
            raise SortMismatchError(
                f"cannot unify terms of sorts {term_sort(t)} and {term_sort(u)}")
    sigma = unify_terms(t, u)
    return None if sigma is None else Substitution(sigma)


def unify_many(pairs: Iterable[tuple[Term, Term]]) -> Substitution | None:
    sigma: dict[str, Term] | None = {}
    for a, b in pairs:
        sigma = unify_terms(a, b, sigma)
        if sigma is None:
            return None
    return Substitution(sigma)


# ---------------------------------------------------------------------------
# Constraint store
# ---------------------------------------------------------------------------

UNSOLVED = "unsolved"
SOLVED = "solved"
FAILED = "failed"
UNKNOWN = "unknown"


@dataclass
class ConstraintStore:
    equations: tuple[Constraint, ...]
    status: str = UNSOLVED
    solution: Substitution | None = None

    @classmethod
    def of(cls, constraints: Iterable[Constraint]) -> "ConstraintStore":
        return cls(tuple(constraints))

    def solve_syntactic(self) -> "ConstraintStore":
        """Solve every equation by plain unification, all at once."""
        sigma: dict[str, Term] | None = {}
        for c in self.equations:
            lhs, rhs = c.sides()
            if isinstance(lhs, Atom):
                if lhs.pred.name != rhs.pred.name or len(lhs.args) != len(rhs.args):
                    return ConstraintStore(self.equations, FAILED)
                pairs = zip(lhs.args, rhs.args)
            else:
                pairs = [(lhs, rhs)]
            for a, b in pairs:
                sigma = unify_terms(a, b, sigma)
                if sigma is None:
                    return ConstraintStore(self.equations, FAILED)
        sub = Substitution(sigma)
        return ConstraintStore(self.equations, SOLVED, sub)


def cheap_fail(c: Constraint, system: RewriteSystem) -> bool:
    """Fast sound unsatisfiability test for a single constraint.

    Reports True only when the two sides clash at a rigid position whose
    root symbols no E-rule can ever rewrite.
    """
    roots = system.e_lhs_roots

    def clash(t: Term, u: Term) -> bool:
        if isinstance(t, Var) or isinstance(u, Var):
            return False
        if t.sym.name in roots or u.sym.name in roots:
            return False
        if t.sym.name != u.sym.name or len(t.args) != len(u.args):
            return True
        return any(clash(a, b) for a, b in zip(t.args, u.args))

    lhs, rhs = c.sides()
    if isinstance(lhs, Atom):
        if lhs.pred.name != rhs.pred.name or len(lhs.args) != len(rhs.args):
            return True
        return any(clash(a, b) for a, b in zip(lhs.args, rhs.args))
    return clash(lhs, rhs)


# ---------------------------------------------------------------------------
# Solution checking
# ---------------------------------------------------------------------------

PASS = "pass"
FAIL = "fail"
FUEL = "fuel"


@dataclass(frozen=True)
class EquationVerdict:
    constraint: Constraint
    status: str
    lhs_normal: object = None
    rhs_normal: object = None


@dataclass(frozen=True)
class SolutionCheck:
    verdicts: tuple[EquationVerdict, ...]

    @property
    def ok(self) -> bool:
        return all(v.status == PASS for v in self.verdicts)

    @property
    def fuel_exhausted(self) -> bool:
        return any(v.status == FUEL for v in self.verdicts)

    def __bool__(self) -> bool:
        return self.ok


def _e_only(system: RewriteSystem | Iterable[RewriteRule]) -> RewriteSystem:
    if isinstance(system, RewriteSystem):
        rules = system.rules
    else:
        rules = tuple(system)
    return RewriteSystem(r for r in rules if r.cls == E_CLASS)


def check_solution(s: Substitution, constraints: Iterable[Constraint],
                   e_rules: RewriteSystem | Iterable[RewriteRule],
                   fuel: int = 10_000) -> SolutionCheck:
    """Does ``s`` solve every equation modulo the E-rules?

    Each side is instantiated and normalized; the equation passes when both
    sides reach the same normal form.  Running out of fuel is reported as a
    distinct per-equation status, not as failure.
    """
    system = _e_only(e_rules)
    verdicts: list[EquationVerdict] = []
    for c in constraints:
        lhs, rhs = c.sides()
        if isinstance(lhs, Atom):
            if lhs.pred.name != rhs.pred.name or len(lhs.args) != len(rhs.args):
                verdicts.append(EquationVerdict(c, FAIL))
                continue
            pairs = list(zip(lhs.args, rhs.args))
        else:
            pairs = [(lhs, rhs)]
        status = PASS
        lhs_nf = rhs_nf = None
        for a, b in pairs:
            oa = normalize(s(a), system, fuel)
            ob = normalize(s(b), system, fuel)
            lhs_nf, rhs_nf = oa.value, ob.value
            if not (oa.normal and ob.normal):
                if oa.value != ob.value:
                    status = FUEL
                    break
            elif oa.value != ob.value:
                status = FAIL
                break
        verdicts.append(EquationVerdict(c, status, lhs_nf, rhs_nf))
    return SolutionCheck(tuple(verdicts))


# ---------------------------------------------------------------------------
# Equational unification by basic narrowing
# ---------------------------------------------------------------------------

SOLUTIONS = "solutions"
UNSAT = "unsatisfiable"


@dataclass(frozen=True)
class EUnifyOutcome:
    kind: str
    solutions: tuple[Substitution, ...] = ()
    depth: int | None = None
    reason: str = ""

    @property
    def is_solutions(self) -> bool:
        return self.kind == SOLUTIONS

    @property
    def is_unsat(self) -> bool:
        return self.kind == UNSAT

    @property
    def is_unknown(self) -> bool:
        return self.kind == UNKNOWN


class _Side:
    """One side of an equation with its set of basic (narrowable) positions."""

    __slots__ = ("term", "basic")

    def __init__(self, term: Term, basic: frozenset[Position] | None = None):
        self.term = term
        if basic is None:
            basic = frozenset(_nonvar_positions(term))
        self.basic = basic

    def substituted(self, m: Mapping[str, Term]) -> "_Side":
        # substitution happens below basic positions only, so the set is stable
        return _Side(subst_term(self.term, m), self.basic)


def _nonvar_positions(t: Term, prefix: Position = ()) -> Iterator[Position]:
    if isinstance(t, Var):
        return
    yield prefix
    for i, a in enumerate(t.args, start=1):
        yield from _nonvar_positions(a, prefix + (i,))


def _term_at(t: Term, pos: Position) -> Term:
    for i in pos:
        t = t.args[i - 1]
    return t


def _replace_term(t: Term, pos: Position, new: Term) -> Term:
    if not pos:
        return new
    i = pos[0]
    return App(t.sym, t.args[:i - 1] + (_replace_term(t.args[i - 1], pos[1:], new),) + t.args[i:])


class _Eq:
    __slots__ = ("left", "right")

    def __init__(self, left: _Side, right: _Side):
        self.left = left
        self.right = right

    def substituted(self, m: Mapping[str, Term]) -> "_Eq":
        return _Eq(self.left.substituted(m), self.right.substituted(m))

    def key(self) -> tuple:
        return (self.left.term, self.right.term)


def _spine_head(t: Term, app_symbols: frozenset[str]):
    while isinstance(t, App) and t.sym.name in app_symbols and t.args:
        t = t.args[0]
    return t


def _is_flex(t: Term, app_symbols: frozenset[str]) -> bool:
    return isinstance(_spine_head(t, app_symbols), Var)


def _decompose_constraints(constraints: Iterable[Constraint]) -> list[tuple[Term, Term]] | None:
    pairs: list[tuple[Term, Term]] = []
    for c in constraints:
        lhs, rhs = c.sides()
        if isinstance(lhs, Atom):
            if lhs.pred.name != rhs.pred.name or len(lhs.args) != len(rhs.args):
                return None
            pairs.extend(zip(lhs.args, rhs.args))
        else:
            pairs.append((lhs, rhs))
    return pairs


def e_unify_narrowing(constraints: Iterable[Constraint],
                      e_rules: RewriteSystem | Iterable[RewriteRule],
                      depth: int = 8, *,
                      app_symbols: Iterable[str] = (),
                      max_states: int = 4_000,
                      check_fuel: int = 4_000) -> EUnifyOutcome:
    """Solve a constraint set modulo the E-rules by bounded basic narrowing.

    Breadth-first over narrowing steps; plain unification is attempted at
    every state, and all solutions of the shallowest solving level are
    returned.  With no E-rules this degenerates to syntactic unification.
    Unsatisfiable is reported only when the whole space below the bounds was
    exhausted; hitting the depth bound or the state budget yields Unknown.
    Equations whose two sides are both headed by variables are kept frozen:
    they are never narrowed, only unified.
    """
    system = _e_only(e_rules)
    rules = [r for r in system.e_rules if not isinstance(r, EtaRule)]
    apps = frozenset(app_symbols)
    constraints = tuple(constraints)
    pairs = _decompose_constraints(constraints)
    if pairs is None:
        return EUnifyOutcome(UNSAT)
    original_vars: set[str] = set()
    for a, b in pairs:
        original_vars |= term_var_names(a) | term_var_names(b)

    def finish(sigma: dict[str, Term], acc: Substitution) -> Substitution | None:
        candidate = acc.compose(Substitution(sigma)).restrict(original_vars)
        candidate = _rename_internal(candidate, original_vars)
        if rules and not check_solution(candidate, constraints, system, check_fuel).ok:
            return None
        return candidate

    start = [_Eq(_Side(a), _Side(b)) for a, b in pairs]
    level: list[tuple[list[_Eq], Substitution]] = [(start, Substitution())]
    seen: set[tuple] = set()
    counter = itertools.count(1)
    states_used = 0
    truncated = False

    for current_depth in range(depth + 1):
        solutions: list[Substitution] = []
        next_level: list[tuple[list[_Eq], Substitution]] = []
        for eqs, acc in level:
            states_used += 1
            if states_used > max_states:
                truncated = True
                break
            simplified = _simplify(eqs, system)
            if simplified is None:
                continue  # dead state
            eqs = simplified
            key = tuple(e.key() for e in eqs)
            if key in seen:
                continue
            seen.add(key)
            sigma: dict[str, Term] | None = {}
            for e in eqs:
                sigma = unify_terms(e.left.term, e.right.term, sigma)
                if sigma is None:
                    break
            if sigma is not None:
                sol = finish(sigma, acc)
                if sol is not None:
                    solutions.append(sol)
            if current_depth == depth:
                if any(_expandable(e, rules, apps) for e in eqs):
                    truncated = True
                continue
            for child in _expand(eqs, acc, rules, apps, counter):
                next_level.append(child)
        if solutions:
            return EUnifyOutcome(SOLUTIONS, tuple(solutions), current_depth)
        if truncated:
            break
        level = next_level
        if not level:
            return EUnifyOutcome(UNSAT)
    reason = "states" if states_used > max_states else "depth"
    return EUnifyOutcome(UNKNOWN, reason=reason)


def _simplify(eqs: list[_Eq], system: RewriteSystem) -> list[_Eq] | None:
    """Drop trivial equations, decompose rigid pairs with irreducible roots,
    and signal dead states by returning None."""
    roots = system.e_lhs_roots
    out: list[_Eq] = []
    work = list(eqs)
    while work:
        e = work.pop(0)
        l, r = e.left.term, e.right.term
        if l == r:
            continue
        if isinstance(l, App) and isinstance(r, App):
            l_red = l.sym.name in roots
            r_red = r.sym.name in roots
            if not l_red and not r_red:
                if l.sym.name != r.sym.name or len(l.args) != len(r.args):
                    return None
                for i in range(len(l.args)):
                    work.append(_Eq(_child_side(e.left, i), _child_side(e.right, i)))
                continue
        out.append(e)
    return out


def _child_side(side: _Side, i: int) -> _Side:
    child = side.term.args[i]
    basic = frozenset(p[1:] for p in side.basic if p[:1] == (i + 1,))
    return _Side(child, basic)


def _expandable(e: _Eq, rules: Sequence[RewriteRule], apps: frozenset[str]) -> bool:
    if _is_flex(e.left.term, apps) and _is_flex(e.right.term, apps):
        return False
    return bool(rules) and bool(e.left.basic or e.right.basic)


def _expand(eqs: list[_Eq], acc: Substitution, rules: Sequence[RewriteRule],
            apps: frozenset[str], counter) -> Iterator[tuple[list[_Eq], Substitution]]:
    for idx, e in enumerate(eqs):
        if _is_flex(e.left.term, apps) and _is_flex(e.right.term, apps):
            continue  # frozen flex-flex equation
        for side_ix, side in enumerate((e.left, e.right)):
            for pos in sorted(side.basic):
                sub = _term_at(side.term, pos)
                if isinstance(sub, Var):
                    continue
                for rule in rules:
                    renaming = {v: Var(f"_n{next(counter)}", _var_sort_in(rule.lhs, v))
                                for v in sorted(rule.var_names)}
                    lhs = subst_term(rule.lhs, renaming)
                    rhs = subst_term(rule.rhs, renaming)
                    theta = unify_terms(sub, lhs)
                    if theta is None:
                        continue
                    new_basic = frozenset(p for p in side.basic if p[:len(pos)] != pos)
                    new_basic |= frozenset(pos + q for q in _nonvar_positions(rhs))
                    new_term = _replace_term(side.term, pos, rhs)
                    new_side = _Side(subst_term(new_term, theta), new_basic)
                    new_eqs: list[_Eq] = []
                    for jdx, e2 in enumerate(eqs):
                        if jdx == idx:
                            other = e.right if side_ix == 0 else e.left
                            new_eq = (_Eq(new_side, other.substituted(theta))
                                      if side_ix == 0 else
                                      _Eq(other.substituted(theta), new_side))
                            new_eqs.append(new_eq)
                        else:
                            new_eqs.append(e2.substituted(theta))
                    yield new_eqs, acc.compose(Substitution(theta))


def _rename_internal(s: Substitution, original_vars: set[str]) -> Substitution:
    """Hide the narrowing search's fresh variables from returned solutions.

    A binding ``x := v`` with ``v`` internal is an mgu leaving ``x``
    essentially free: rename ``v`` back to ``x``.  Internal variables left
    inside deeper terms get readable fresh names.
    """
    rho: dict[str, Term] = {}
    internal: list[tuple[str, Var]] = []
    for k, t in sorted(s.map.items()):
        if isinstance(t, Var) and t.name.startswith("_n") and t.name not in rho:
            rho[t.name] = Var(k, t.sort)
    counter = 0
    for k, t in sorted(s.map.items()):
        for v in sorted(term_var_names(t)):
            if v.startswith("_n") and v not in rho:
                internal.append((k, v))
    for k, v in internal:
        counter += 1
        sort = next(w.sort for w in _vars_of(s.map[k]) if w.name == v)
        name = f"v{counter}"
        while name in original_vars:
            counter += 1
            name = f"v{counter}"
        rho[v] = Var(name, sort)
    if not rho:
        return s
    out = {k: subst_term(t, rho) for k, t in s.map.items()}
    return Substitution({k: t for k, t in out.items()
                         if not (isinstance(t, Var) and t.name == k)})


def _vars_of(t: Term):
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            yield x
        else:
            stack.extend(x.args)


def _var_sort_in(t: Term | Atom, name: str):
    stack = list(t.args) if isinstance(t, Atom) else [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            if x.name == name:
                return x.sort
        else:
            stack.extend(x.args)
    raise KeyError(name)


# ---------------------------------------------------------------------------
# On-the-fly propagation
# ---------------------------------------------------------------------------


def propagate_on_the_fly(store: ConstraintStore,
                         clauses: Sequence[ConstrainedClause],
                         system: RewriteSystem,
                         sig, fuel: int = 10_000):
    """Solve the store syntactically and push the substitution through.

    Returns ``(updated clauses, solution, all_normalized)``; returns None
    when the store is unsolvable, in which case the clauses are to be
    discarded as constraint-unsatisfiable.  Instantiation may trigger
    reductions, so every clause is re-normalized (and re-clausified when an
    atom leaves the atom fragment).
    """
    from .clausal import renormalize_clause

    solved = store.solve_syntactic()
    if solved.status == FAILED:
        return None
    assert solved.solution is not None
    out: list[ConstrainedClause] = []
    all_normal = True
    for c in clauses:
        instantiated = c.apply(solved.solution)
        result, _changed = renormalize_clause(instantiated, system, sig, fuel)
        all_normal = all_normal and result.normalized
        out.extend(result.clauses)
    return out, solved.solution, all_normal
