"""Saturation loop: resolution with postponed constraints plus narrowing.

The loop is a deterministic given-clause procedure.  The selected clause is
factored, resolved against every active clause and narrowed with every
R-rule.  What happens to the equality constraints of a new clause depends
on the strategy:

``freeze``      constraints accumulate unsolved; only a cheap root-clash
                test prunes, and the full equational unifier runs when an
                empty clause appears (the refutation gate).
``on_the_fly``  every constraint is solved syntactically at creation, the
                substitution is propagated at once, and the clause is
                re-normalized and re-clausified (instantiation can trigger
                reductions, so one inference may yield several clauses).

A refutation is an empty clause whose constraints pass the solution check;
when the equational unifier cannot decide the constraints within its
bounds, the result is reported as a candidate refutation with unverified
constraints, never as success.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Sequence

from .kernel import (
    Atom,
    Signature,
    Substitution,
    Term,
    Var,
    free_names,
    rename_apart,
    term_size,
    variant_name,
)
from .clausal import (
    ClausalResult,
    Constraint,
    ConstrainedClause,
    Literal,
    Provenance,
    reclausify,
    renormalize_clause,
)
from .rewrite import R_CLASS, RewriteRule, RewriteSystem, match
from .unify import (
    ConstraintStore,
    EUnifyOutcome,
    cheap_fail,
    check_solution,
    e_unify_narrowing,
    propagate_on_the_fly,
    unify_syntactic,
)

FREEZE = "freeze"
ON_THE_FLY = "on_the_fly"


@dataclass(frozen=True)
class ProverConfig:
    strategy: str = FREEZE
    fuel: int = 10_000
    max_clauses: int = 5_000
    narrowing_depth: int = 8
    normalize_clauses: bool = True
    narrow_states: int = 4_000
    # every n-th selection takes the oldest passive clause instead of the
    # smallest one; narrowing can feed small clauses forever, so smallest-
    # first alone would starve the larger ones and break fairness
    age_interval: int = 4

    def __post_init__(self) -> None:
        if self.strategy not in (FREEZE, ON_THE_FLY):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        for name in ("fuel", "max_clauses", "narrowing_depth", "narrow_states"):
            if getattr(self, name) < 0 or (name in ("fuel", "max_clauses") and getattr(self, name) < 1):
                raise ValueError(f"{name} must be positive")
        if self.age_interval < 2:
            raise ValueError("age_interval must be at least 2")


@dataclass(frozen=True)
class ProofStep:
    id: int
    kind: str  # input | resolution | factoring | narrowing | renaming
    parents: tuple[int, ...]
    clause: ConstrainedClause
    aux: str | None = None

    def rule_text(self) -> str:
        inside = ", ".join(str(p) for p in self.parents)
        if self.aux:
            inside = f"{inside}; {self.aux}" if inside else self.aux
        return f"{self.kind}({inside})" if inside else self.kind


@dataclass
class Stats:
    """Search counters.

    ``generated`` counts clauses that actually come into existence: under
    on-the-fly propagation an inference whose constraints are unsolvable
    never yields a clause and lands in ``failed_constraints`` instead (the
    freeze-mode analogue is a clause killed by the cheap root-clash test).
    """

    generated: int = 0
    kept: int = 0
    selected: int = 0
    resolutions: int = 0
    narrowings: int = 0
    factorings: int = 0
    discarded: int = 0
    failed_constraints: int = 0
    gate_calls: int = 0


PROVED = "proved"
SATURATED = "saturated"
RESOURCE_OUT = "resource_out"


@dataclass
class SearchResult:
    status: str
    steps: list[ProofStep]
    stats: Stats
    empty_clause: ConstrainedClause | None = None
    solution: Substitution | None = None
    verified: bool = False
    unnormalized: bool = False
    exhausted: str | None = None
    constraint_names: dict[Constraint, str] = field(default_factory=dict)

    @property
    def proved(self) -> bool:
        return self.status == PROVED

    def proof_steps(self) -> list[ProofStep]:
        """The ancestor slice of the empty clause, in id order."""
        if self.empty_clause is None or self.empty_clause.id is None:
            return []
        by_id = {s.id: s for s in self.steps}
        want = {self.empty_clause.id}
        for s in reversed(self.steps):
            if s.id in want:
                want.update(s.parents)
        return [s for s in self.steps if s.id in want]


# ---------------------------------------------------------------------------
# Inference rules (constraint-postponing form)
# ---------------------------------------------------------------------------


def extended_resolution(c1: ConstrainedClause, c2: ConstrainedClause) -> list[ConstrainedClause]:
    """Binary resolvents of two clauses (which must be renamed apart).

    One positive literal of either clause is cut against one negative
    literal of the other; the resolvent unions the remaining literals and
    both constraint sets, plus the equation between the two atoms.  Paired
    with :func:`factor` this simulates resolution on literal groups.
    """
    out: list[ConstrainedClause] = []
    for pos_clause, neg_clause in ((c1, c2), (c2, c1)):
        for i, lp in enumerate(pos_clause.literals):
            if not lp.positive:
                continue
            for j, ln in enumerate(neg_clause.literals):
                if ln.positive:
                    continue
                if lp.atom.pred.name != ln.atom.pred.name:
                    continue
                if len(lp.atom.args) != len(ln.atom.args):
                    continue
                rest = [l for k, l in enumerate(pos_clause.literals) if k != i]
                rest += [l for k, l in enumerate(neg_clause.literals) if k != j]
                constraints = (tuple(pos_clause.constraints) + tuple(neg_clause.constraints)
                               + (Constraint(lp.atom, ln.atom),))
                out.append(ConstrainedClause(rest, constraints))
    return out


def factor(c: ConstrainedClause) -> list[ConstrainedClause]:
    """Merge two same-polarity literals under a new atom equation."""
    out: list[ConstrainedClause] = []
    for i, li in enumerate(c.literals):
        for j in range(i + 1, len(c.literals)):
            lj = c.literals[j]
            if li.positive != lj.positive:
                continue
            if li.atom.pred.name != lj.atom.pred.name:
                continue
            if len(li.atom.args) != len(lj.atom.args):
                continue
            rest = [l for k, l in enumerate(c.literals) if k != j]
            constraints = tuple(c.constraints) + (Constraint(li.atom, lj.atom),)
            out.append(ConstrainedClause(rest, constraints))
    return out


def _compat(t: Term, l: Term, apps: frozenset[str]) -> bool:
    from .unify import _is_flex, _spine_head

    if isinstance(t, Var) or isinstance(l, Var):
        return True
    if isinstance(_spine_head(t, apps), Var):
        return True
    if t.sym.name != l.sym.name or len(t.args) != len(l.args):
        return False
    return all(_compat(a, b, apps) for a, b in zip(t.args, l.args))


def narrowing_applicable(atom: Atom, rule: RewriteRule, strategy: str,
                         app_symbols: Iterable[str] = (),
                         allow_guessing: bool = True) -> bool:
    """Literal filter for the narrowing inference.

    Under ``on_the_fly`` the atom must unify syntactically with the rule's
    left side.  Under ``freeze`` the test is head compatibility: a rigid
    position must carry the rule's symbol, while a variable-headed position
    accepts anything (a normal literal can only meet the left side of a
    rule once its flexible head gets instantiated).

    With ``allow_guessing`` off (the saturation loop's setting under
    on-the-fly propagation), a narrowing is skipped when it would have to
    instantiate one of the atom's variables with a constructor carrying
    fresh variables: solved constraints are propagated immediately, so a
    later resolution step that makes such a variable concrete triggers the
    same rewriting during re-normalization, and the guessing step only
    floods the search space.
    """
    lhs = rule.lhs
    assert isinstance(lhs, Atom)
    if atom.pred.name != lhs.pred.name or len(atom.args) != len(lhs.args):
        return False
    if strategy == ON_THE_FLY:
        fresh = rule.rename_for(free_names(atom))
        assert isinstance(fresh.lhs, Atom)
        mgu = unify_syntactic(atom, fresh.lhs)
        if mgu is None:
            return False
        if allow_guessing:
            return True
        if atom.args and all(isinstance(a, Var) for a in atom.args):
            return False  # a fully flexible atom gives the step no guidance
        atom_vars = free_names(atom)
        for name in atom_vars:
            t = mgu.get(name)
            if t is not None and not isinstance(t, Var) and (free_names(t) - atom_vars):
                return False
        return True
    apps = frozenset(app_symbols)
    return all(_compat(a, b, apps) for a, b in zip(atom.args, lhs.args))


def extended_narrowing(c: ConstrainedClause, rule: RewriteRule,
                       system: RewriteSystem, sig: Signature,
                       fuel: int = 10_000, strategy: str = FREEZE,
                       app_symbols: Iterable[str] = (),
                       allow_guessing: bool = True) -> list[list[ConstrainedClause]]:
    """Narrow each applicable literal of ``c`` with an R-rule.

    The literal's atom is replaced by the right side of a renamed copy of
    the rule and the clause is re-clausified, carrying the postponed
    equation between the atom and the rule's left side.  One inner list per
    narrowing event (a single event may split into several clauses).
    """
    if rule.cls != R_CLASS:
        raise ValueError("extended narrowing uses R-class rules only")
    events: list[list[ConstrainedClause]] = []
    # smallest atoms first: the least-structured literal is the one the
    # figure-scale searches instantiate, so its clauses get earlier ids
    order = sorted(range(len(c.literals)),
                   key=lambda i: (sum(term_size(a) for a in c.literals[i].atom.args), i))
    for i in order:
        lit = c.literals[i]
        if not narrowing_applicable(lit.atom, rule, strategy, app_symbols,
                                    allow_guessing):
            continue
        fresh = rule.rename_for(c.free_names())
        assert isinstance(fresh.lhs, Atom)
        constraint = Constraint(lit.atom, fresh.lhs)
        result = reclausify(c, i, fresh.rhs, system, sig, fuel,
                            extra_constraints=(constraint,))
        if result.clauses:
            events.append(result.clauses)
    return events


# ---------------------------------------------------------------------------
# Redundancy
# ---------------------------------------------------------------------------


def _blank_skeleton(t: Term) -> str:
    if isinstance(t, Var):
        return "*"
    if not t.args:
        return t.sym.name
    return f"{t.sym.name}({','.join(_blank_skeleton(a) for a in t.args)})"


def _literal_sort_key(lit: Literal) -> tuple:
    return (not lit.positive, lit.atom.pred.name,
            tuple(_blank_skeleton(a) for a in lit.atom.args))


def clause_key(c: ConstrainedClause) -> tuple:
    """Renaming-insensitive fingerprint used for duplicate detection."""
    lits = sorted(c.literals, key=_literal_sort_key)
    mapping: dict[str, str] = {}

    def render(t: Term) -> str:
        if isinstance(t, Var):
            if t.name not in mapping:
                mapping[t.name] = f"v{len(mapping)}"
            return mapping[t.name]
        if not t.args:
            return t.sym.name
        return f"{t.sym.name}({','.join(render(a) for a in t.args)})"

    lit_keys = tuple((l.positive, l.atom.pred.name, tuple(render(a) for a in l.atom.args))
                     for l in lits)

    def render_side(x) -> str:
        if isinstance(x, Atom):
            return f"{x.pred.name}({','.join(render(a) for a in x.args)})"
        return render(x)

    con_keys = tuple(sorted(frozenset((render_side(c2.lhs), render_side(c2.rhs)))
                            for c2 in c.constraints))
    return (lit_keys, con_keys)


def _match_atom(pattern: Atom, subject: Atom, bindings):
    if pattern.pred.name != subject.pred.name or len(pattern.args) != len(subject.args):
        return None
    b = bindings
    for p, s in zip(pattern.args, subject.args):
        b = match(p, s, b)
        if b is None:
            return None
    return b


def _pred_profile(c: ConstrainedClause) -> dict[tuple[bool, str], int]:
    out: dict[tuple[bool, str], int] = {}
    for l in c.literals:
        key = (l.positive, l.atom.pred.name)
        out[key] = out.get(key, 0) + 1
    return out


def subsumes(c: ConstrainedClause, d: ConstrainedClause) -> bool:
    """Does ``c`` (constraint-free) subsume ``d``: some instance of ``c``'s
    literal set is contained in ``d``'s?"""
    if c.constraints or len(c.literals) > len(d.literals):
        return False
    prof_d = _pred_profile(d)
    for key, n in _pred_profile(c).items():
        if prof_d.get(key, 0) < n:
            return False

    def go(i: int, bindings) -> bool:
        if i == len(c.literals):
            return True
        lc = c.literals[i]
        for ld in d.literals:
            if lc.positive != ld.positive:
                continue
            b2 = _match_atom(lc.atom, ld.atom, bindings)
            if b2 is not None and go(i + 1, b2):
                return True
        return False

    return go(0, {})


def is_tautology(c: ConstrainedClause) -> bool:
    if c.constraints:
        return False
    positives = {l.atom for l in c.literals if l.positive}
    return any(not l.positive and l.atom in positives for l in c.literals)


class ClauseIndex:
    """Duplicate keys for all registered clauses plus the constraint-free
    kept clauses used as subsumers."""

    def __init__(self) -> None:
        self.keys: set[tuple] = set()
        self.subsumers: list[ConstrainedClause] = []
        self.dead: set[int] = set()

    def note(self, c: ConstrainedClause) -> None:
        self.keys.add(clause_key(c))

    def note_kept(self, c: ConstrainedClause) -> None:
        if not c.constraints:
            self.subsumers.append(c)

    def live_subsumers(self):
        return (s for s in self.subsumers if s.id not in self.dead)


def redundancy_filter(new: ConstrainedClause, index: ClauseIndex | Iterable[ConstrainedClause]
                      ) -> tuple[bool, str | None]:
    """keep/discard decision for a freshly derived clause.

    Discards exact tautologies with no constraints, variants of already
    registered clauses with identical constraints, and clauses subsumed by
    a constraint-free active clause.  The empty clause is never discarded.
    """
    if isinstance(index, ClauseIndex):
        idx = index
    else:
        idx = ClauseIndex()
        for c in index:
            idx.note(c)
            idx.note_kept(c)
    if new.is_empty():
        return True, None
    if is_tautology(new):
        return False, "tautology"
    if clause_key(new) in idx.keys:
        return False, "duplicate"
    for c in idx.live_subsumers():
        if subsumes(c, new):
            return False, f"subsumed by {c.id}" if c.id else "subsumed"
    return True, None


# ---------------------------------------------------------------------------
# Saturation
# ---------------------------------------------------------------------------


def tidy_clause(c: ConstrainedClause) -> ConstrainedClause:
    """Shorten primed variable names where that causes no collision."""
    names = sorted(c.free_names())
    taken = set(names)
    vars_by_name = {v.name: v for v in c.free_vars()}
    renames: list[tuple[str, str]] = []
    for name in names:
        base = name.rstrip("'")
        if base == name or not base or base.startswith("_"):
            continue
        target = base
        while target in taken:
            target += "'"
        if target != name:
            taken.discard(name)
            taken.add(target)
            renames.append((name, target))
    if not renames:
        return c
    # two phases keep each pass idempotent even when targets overlap sources
    tmp = {old: Var(f"_t{i}", vars_by_name[old].sort) for i, (old, _) in enumerate(renames)}
    fin = {f"_t{i}": Var(new, vars_by_name[old].sort)
           for i, (old, new) in enumerate(renames)}
    return c.apply(Substitution(tmp)).apply(Substitution(fin))


class _Budget(Exception):
    pass


class _Saturation:
    def __init__(self, system: RewriteSystem, sig: Signature, cfg: ProverConfig):
        self.system = system
        self.sig = sig
        self.cfg = cfg
        self.steps: list[ProofStep] = []
        self.stats = Stats()
        self.passive: list[tuple[int, int]] = []  # (literal count, id) min-heap
        self.passive_age: list[int] = []  # id min-heap for the fairness picks
        self.in_passive: set[int] = set()
        self.by_id: dict[int, ConstrainedClause] = {}
        self.active: list[ConstrainedClause] = []
        self.index = ClauseIndex()
        self.names: dict[Constraint, str] = {}
        self.result: SearchResult | None = None
        self.unnormalized = False

    # -- naming ------------------------------------------------------------

    def _name_constraints(self, c: ConstrainedClause) -> None:
        for con in sorted(c.constraints, key=str):
            if con not in self.names:
                self.names[con] = f"c{len(self.names) + 1}"

    # -- the refutation gate -------------------------------------------------

    def _gate(self, c: ConstrainedClause) -> str:
        """'proved' | 'unverified' | 'unsat' for an empty-literal clause."""
        if not c.constraints:
            self.result = SearchResult(PROVED, self.steps, self.stats, c,
                                       Substitution(), True, self.unnormalized,
                                       constraint_names=self.names)
            return "proved"
        self.stats.gate_calls += 1
        outcome = e_unify_narrowing(
            c.constraints, self.system, self.cfg.narrowing_depth,
            app_symbols=self.sig.app_symbols, max_states=self.cfg.narrow_states)
        if outcome.is_solutions:
            self.result = SearchResult(PROVED, self.steps, self.stats, c,
                                       outcome.solutions[0], True, self.unnormalized,
                                       constraint_names=self.names)
            return "proved"
        if outcome.is_unsat:
            return "unsat"
        self.result = SearchResult(PROVED, self.steps, self.stats, c, None, False,
                                   self.unnormalized, constraint_names=self.names)
        return "unverified"

    # -- registration --------------------------------------------------------

    def register(self, c: ConstrainedClause, kind: str, parents: tuple[int, ...],
                 aux: str | None = None) -> bool:
        """Filter, number and enqueue a clause; True when it was kept."""
        self.stats.generated += 1
        if self.stats.generated > self.cfg.max_clauses:
            raise _Budget
        c = tidy_clause(c)
        keep, _reason = redundancy_filter(c, self.index)
        if not keep:
            self.stats.discarded += 1
            return False
        cid = len(self.by_id) + 1
        c = c.with_id(cid, Provenance(kind, parents, aux))
        self.by_id[cid] = c
        self.index.note(c)
        self._name_constraints(c)
        self.steps.append(ProofStep(cid, kind, parents, c, aux))
        self.stats.kept += 1
        if c.is_empty():
            verdict = self._gate(c)
            if verdict in ("proved", "unverified"):
                return True
            # constraint-unsatisfiable refutation candidate: drop it again
            del self.by_id[cid]
            self.steps.pop()
            self.stats.kept -= 1
            self.stats.discarded += 1
            return False
        self.index.note_kept(c)
        # backward subsumption: a new constraint-free clause retires the
        # kept clauses it subsumes
        if not c.constraints:
            for other in list(self.in_passive):
                o = self.by_id[other]
                if len(c.literals) <= len(o.literals) and subsumes(c, o):
                    self.index.dead.add(other)
                    self.in_passive.discard(other)
            for o in self.active:
                if o.id not in self.index.dead and len(c.literals) <= len(o.literals) \
                        and o is not c and subsumes(c, o):
                    self.index.dead.add(o.id)
        heapq.heappush(self.passive, (len(c.literals), cid))
        heapq.heappush(self.passive_age, cid)
        self.in_passive.add(cid)
        # factoring is a cheap single-clause inference: apply it eagerly so
        # the merged clauses race fairly with other descendants
        for fc in factor(c):
            if self.process_new([fc], "factoring", (cid,)):
                self.stats.factorings += 1
            if self.result is not None:
                break
        return True

    # -- strategy post-processing ---------------------------------------------

    def process_new(self, clauses: Sequence[ConstrainedClause], kind: str,
                    parents: tuple[int, ...], aux: str | None = None) -> bool:
        """Run the strategy discipline on an inference's output and register
        the survivors.  True when at least one clause was kept."""
        kept_any = False
        for c in clauses:
            if self.cfg.strategy == ON_THE_FLY:
                outcome = propagate_on_the_fly(
                    ConstraintStore.of(c.constraints), [ConstrainedClause(c.literals)],
                    self.system, self.sig, self.cfg.fuel)
                if outcome is None:
                    self.stats.failed_constraints += 1
                    continue
                propagated, _solution, normal = outcome
                if not normal:
                    self.unnormalized = True
                for p in propagated:
                    if self.register(p, kind, parents, aux):
                        kept_any = True
                    if self.result is not None:
                        return kept_any
            else:
                if any(cheap_fail(con, self.system) for con in c.constraints):
                    self.stats.failed_constraints += 1
                    continue
                if self.register(c, kind, parents, aux):
                    kept_any = True
                if self.result is not None:
                    return kept_any
        return kept_any

    def _select(self) -> int:
        """Pop the next clause id.

        Input clauses go first (the axioms drive everything and the traces
        resolve against them throughout); after that, smallest literal count
        first with ties by id, and every ``age_interval``-th pick takes the
        oldest passive clause so that no kept clause starves.
        """
        for cid in sorted(self.in_passive):
            if self.by_id[cid].provenance.rule == "input":
                self.in_passive.discard(cid)
                return cid
        by_age = self.stats.selected % self.cfg.age_interval == self.cfg.age_interval - 1
        if by_age:
            while True:
                cid = heapq.heappop(self.passive_age)
                if cid in self.in_passive:
                    break
        else:
            while True:
                _, cid = heapq.heappop(self.passive)
                if cid in self.in_passive:
                    break
        self.in_passive.discard(cid)
        return cid

    # -- main loop -------------------------------------------------------------

    def run(self, inputs: Iterable[ConstrainedClause]) -> SearchResult:
        try:
            for c in inputs:
                if self.cfg.normalize_clauses:
                    result, _ = renormalize_clause(c, self.system, self.sig, self.cfg.fuel)
                    if not result.normalized:
                        self.unnormalized = True
                    for piece in result.clauses:
                        self.register(piece, "input", ())
                        if self.result is not None:
                            return self.result
                else:
                    self.register(c, "input", ())
                    if self.result is not None:
                        return self.result
            while self.in_passive:
                cid = self._select()
                sel = self.by_id[cid]
                self.stats.selected += 1
                self.active.append(sel)
                # narrowing with every R-rule; under on-the-fly propagation
                # skip the steps that would guess constructor structure
                for rule in self.system.r_rules:
                    events = extended_narrowing(
                        sel, rule, self.system, self.sig, self.cfg.fuel,
                        self.cfg.strategy, self.sig.app_symbols,
                        allow_guessing=self.cfg.strategy == FREEZE)
                    for event in events:
                        if self.process_new(event, "narrowing", (sel.id,), rule.name):
                            self.stats.narrowings += 1
                        if self.result is not None:
                            return self.result
                # resolution against the active set (the clause itself included)
                for partner in list(self.active):
                    if partner.id in self.index.dead and partner is not sel:
                        continue
                    if min(len(sel.literals), len(partner.literals)) > 2:
                        continue
                    renamed, _ = rename_apart(sel.free_names(), partner)
                    for rc in extended_resolution(sel, renamed):
                        if self.process_new([rc], "resolution", (sel.id, partner.id)):
                            self.stats.resolutions += 1
                        if self.result is not None:
                            return self.result
            return SearchResult(SATURATED, self.steps, self.stats,
                                unnormalized=self.unnormalized,
                                constraint_names=self.names)
        except _Budget:
            return SearchResult(RESOURCE_OUT, self.steps, self.stats,
                                unnormalized=self.unnormalized,
                                exhausted="max_clauses",
                                constraint_names=self.names)


def saturate(inputs: Iterable[ConstrainedClause], system: RewriteSystem,
             sig: Signature, cfg: ProverConfig | None = None) -> SearchResult:
    """Saturate a clause set under the strategy in ``cfg``."""
    return _Saturation(system, sig, cfg or ProverConfig()).run(inputs)


# ---------------------------------------------------------------------------
# Trace serialization
# ---------------------------------------------------------------------------


def format_clause_line(step: ProofStep, names: dict[Constraint, str]) -> str:
    c = step.clause
    text = c.literal_text()
    if c.constraints:
        refs = ", ".join(sorted((names.get(con) or str(con) for con in c.constraints),
                                key=_constraint_sort_key))
        text = f"{text} / {refs}"
    return f"{step.id}. {step.rule_text()} | {text}"


def _constraint_sort_key(name: str):
    return (len(name), name)


def format_trace(result: SearchResult, header: dict[str, str] | None = None,
                 sig: Signature | None = None) -> str:
    """Figure-style trace, one numbered line per kept clause.

    Grammar (one construct per line):
      ``# resmod trace 1``                      header
      ``<key>: <value>``                        run metadata
      ``<id>. <rule>(<parents>[; <aux>]) | <literals>[ / <constraint refs>]``
      ``constraints:`` then ``  <name>: <lhs> = <rhs>``
      ``symbols:`` then signature extension declarations
      ``verdict: PROVED|PROVED_UNVERIFIED|SATURATED|RESOURCE_OUT``
      ``solution:`` then ``  <var> := <term>`` bindings (verified proofs)
    """
    lines = ["# resmod trace 1"]
    for k, v in (header or {}).items():
        lines.append(f"{k}: {v}")
    if sig is not None:
        extensions = [s for s in sig.symbols.values() if s.origin == "skolem"]
        if extensions:
            lines.append("symbols:")
            for s in extensions:
                if s.kind == "individual":
                    lines.append(f"  const {s.name} : {s.result}")
                else:
                    args = ", ".join(str(a) for a in s.arg_sorts)
                    lines.append(f"  fun {s.name} : ({args}) -> {s.result}")
    for step in result.steps:
        lines.append(format_clause_line(step, result.constraint_names))
    if result.constraint_names:
        lines.append("constraints:")
        for con, name in sorted(result.constraint_names.items(),
                                key=lambda kv: _constraint_sort_key(kv[1])):
            lines.append(f"  {name}: {con}")
    lines.append(f"verdict: {verdict_of(result)}")
    if result.proved and result.verified and result.solution is not None:
        if result.solution.is_empty():
            lines.append("solution: identity")
        else:
            lines.append("solution:")
            for k in sorted(result.solution.map):
                lines.append(f"  {k} := {result.solution.map[k]}")
    elif result.proved and not result.verified:
        lines.append("solution: unverified")
    return "\n".join(lines) + "\n"


def verdict_of(result: SearchResult) -> str:
    if result.status == PROVED:
        return "PROVED" if result.verified else "PROVED_UNVERIFIED"
    if result.status == SATURATED:
        return "SATURATED"
    return "RESOURCE_OUT"
