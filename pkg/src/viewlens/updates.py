"""The view-update language (conditional, transactional inserts, deletes and
replacements) and the translatability decision procedures.

Translations are defined on top of invertible views only: the unique new
database state is materialized through the synthesized inverse rewritings and
validated by the chase. Translatability with respect to every view state is
certified by logical implication for the tgd-encodable fragment (insert-only
programs with positive conditions over full-witness views) and refuted by a
bounded search over consistent states; everything else is reported unknown.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping

from .chase import (
    CHASE_BUDGET_EXHAUSTED,
    CHASE_EGD_FAILURE,
    DEFAULT_BUDGET,
    DEFAULT_DOMAIN_BOUND,
    MAX_ENUMERATION_FACTS,
    VALID,
    chase,
    entails_equality,
    implies,
    satisfies_all,
)
from .deps import EGD, TGD, ViewSpec
from .determinacy import InvertibilityReport, Rewriting, is_invertible, synthesize_all
from .errors import (
    NotInvertibleError,
    PreconditionError,
    TranslationUnavailableError,
    UpdateApplicationError,
)
from .model import (
    Atom,
    Const,
    Fact,
    GroundDelta,
    Instance,
    Term,
    Var,
    atoms_variables,
    diff,
    disjoint_union,
    make_instance,
    match_atoms,
)

INSERT = "insert"
DELETE = "delete"
REPLACE = "replace"

TRANSLATABLE = "translatable"
NOT_TRANSLATABLE = "not-translatable"
UNKNOWN = "unknown"

INCONSISTENT_POST_STATE = "inconsistent-post-state"
NO_PREIMAGE = "no-preimage"

YES = "yes"
NO = "no"


# ---------------------------------------------------------------------------
# Update language


@dataclass(frozen=True)
class Condition:
    """A safe conjunction of view atoms and (in)equalities guarding a step."""

    atoms: tuple[Atom, ...] = ()
    equalities: tuple[tuple[Term, Term], ...] = ()
    inequalities: tuple[tuple[Term, Term], ...] = ()

    def is_trivial(self) -> bool:
        return not (self.atoms or self.equalities or self.inequalities)

    def variables(self) -> set[Var]:
        out = set(atoms_variables(self.atoms))
        for pair in self.equalities + self.inequalities:
            out.update(t for t in pair if isinstance(t, Var))
        return out


EMPTY_CONDITION = Condition()


@dataclass(frozen=True)
class UpdateStep:
    kind: str  # INSERT | DELETE | REPLACE
    pattern: Atom
    replacement: Atom | None = None
    condition: Condition = EMPTY_CONDITION

    def __post_init__(self) -> None:
        if self.kind not in (INSERT, DELETE, REPLACE):
            raise ValueError(f"unknown update kind {self.kind!r}")
        if (self.kind == REPLACE) != (self.replacement is not None):
            raise ValueError("replace steps (and only those) carry a replacement atom")
        if self.replacement is not None and (
            self.replacement.symbol != self.pattern.symbol
            or len(self.replacement.args) != len(self.pattern.args)
        ):
            raise ValueError("replacement must use the pattern's symbol and arity")
        # Safety: everything a step computes with must be bound by the
        # pattern or by a positive condition atom.
        bound = set(self.pattern.variables()) | set(atoms_variables(self.condition.atoms))
        loose = set()
        if self.replacement is not None:
            loose |= set(self.replacement.variables()) - bound
        for pair in self.condition.equalities + self.condition.inequalities:
            loose |= {t for t in pair if isinstance(t, Var)} - bound
        if loose:
            names = ", ".join(sorted(v.name for v in loose))
            raise ValueError(f"unsafe update step: unbound variables {names}")


@dataclass(frozen=True)
class UpdateProgram:
    """A transaction: steps execute in order, atomically."""

    steps: tuple[UpdateStep, ...]
    name: str | None = None

    def __post_init__(self) -> None:
        if not self.steps:
            raise ValueError("an update program needs at least one step")

    def constants(self) -> frozenset[Const]:
        out: set[Const] = set()
        for step in self.steps:
            atoms = [step.pattern] + list(step.condition.atoms)
            if step.replacement is not None:
                atoms.append(step.replacement)
            for atom in atoms:
                out.update(t for t in atom.args if isinstance(t, Const))
            for pair in step.condition.equalities + step.condition.inequalities:
                out.update(t for t in pair if isinstance(t, Const))
        return frozenset(out)

    def view_symbols(self) -> frozenset[str]:
        out = {step.pattern.symbol for step in self.steps}
        for step in self.steps:
            out.update(a.symbol for a in step.condition.atoms)
        return frozenset(out)


# ---------------------------------------------------------------------------
# Applying updates to view states


def _value(term: Term, binding: Mapping[Var, Term]) -> Term:
    return binding.get(term, term) if isinstance(term, Var) else term


def _condition_holds(cond: Condition, binding: Mapping[Var, Term]) -> bool:
    for s, t in cond.equalities:
        if _value(s, binding) != _value(t, binding):
            return False
    for s, t in cond.inequalities:
        if _value(s, binding) == _value(t, binding):
            return False
    return True


def _step_bindings(step: UpdateStep, state: Instance) -> Iterator[dict[Var, Term]]:
    """Bindings of a step against the current state. Deletes and replaces
    match their pattern; inserts bind through the condition only."""
    atoms: tuple[Atom, ...]
    if step.kind == INSERT:
        atoms = step.condition.atoms
    else:
        atoms = (step.pattern,) + step.condition.atoms
    for binding in match_atoms(atoms, state):
        if _condition_holds(step.condition, binding):
            yield binding


def apply_step(step: UpdateStep, state: Instance, index: int = 0) -> Instance:
    insertions: set[Fact] = set()
    deletions: set[Fact] = set()
    for binding in _step_bindings(step, state):
        if step.kind == INSERT:
            fact_atom = step.pattern.substitute(binding)
            if fact_atom.variables():
                raise UpdateApplicationError(
                    f"step {index + 1}: insertion pattern not ground after condition binding"
                )
            insertions.add(fact_atom.to_fact())
        elif step.kind == DELETE:
            deletions.add(step.pattern.substitute(binding).to_fact())
        else:
            deletions.add(step.pattern.substitute(binding).to_fact())
            insertions.add(step.replacement.substitute(binding).to_fact())
    return state.with_facts((state.facts - deletions) | insertions)


def apply_update(program: UpdateProgram, view_state: Instance) -> Instance:
    """Execute the transaction on a ground view state. Each step's matches
    are computed against the state the step starts from, then applied at
    once (order-insensitive within a step)."""
    if not view_state.is_ground():
        raise PreconditionError("updates apply to ground view states only")
    state = view_state
    for i, step in enumerate(program.steps):
        state = apply_step(step, state, i)
    return state


# ---------------------------------------------------------------------------
# Per-instance translatability


@dataclass(frozen=True)
class TranslatabilityVerdict:
    status: str  # TRANSLATABLE | NOT_TRANSLATABLE | UNKNOWN
    translation: GroundDelta | None = None
    reason: str | None = None
    post_view: Instance | None = None
    new_db_state: Instance | None = None


def _require_invertible(spec: ViewSpec, invertibility: InvertibilityReport | None,
                        budget: int, domain_bound: int) -> InvertibilityReport:
    report = invertibility if invertibility is not None else is_invertible(
        spec, budget=budget, domain_bound=domain_bound
    )
    if not report.invertible:
        raise NotInvertibleError(
            f"update translation requires an invertible view (status: {report.status})"
        )
    return report


def _materialize(spec: ViewSpec, rewritings: Mapping[str, Rewriting], view_state: Instance) -> Instance:
    from .model import evaluate_cq

    facts: set[Fact] = set()
    for name in spec.db_schema.names():
        for answer in evaluate_cq(rewritings[name].query, view_state):
            facts.add(Fact(name, answer))
    return make_instance(spec.db_schema, facts)


def _validate_program(spec: ViewSpec, program: UpdateProgram) -> None:
    unknown = sorted(s for s in program.view_symbols() if not spec.view_schema.has(s))
    if unknown:
        raise PreconditionError(f"update mentions non-view symbols: {', '.join(unknown)}")


def translatable_at(
    spec: ViewSpec,
    program: UpdateProgram,
    db_state: Instance,
    budget: int = DEFAULT_BUDGET,
    domain_bound: int = DEFAULT_DOMAIN_BOUND,
    rewritings: Mapping[str, Rewriting | None] | None = None,
    invertibility: InvertibilityReport | None = None,
) -> TranslatabilityVerdict:
    """Decide whether the update translates at the given database state, and
    compute the unique translation when it does.

    The candidate new state is the evaluation of the inverse rewritings on
    the updated view, integrated and validated by the chase: labeled nulls
    produced by backward definition rules must be eliminated by egds,
    otherwise no ground preimage exists.
    """
    _require_invertible(spec, invertibility, budget, domain_bound)
    _validate_program(spec, program)
    if not satisfies_all(db_state, spec.db_constraints()):
        raise PreconditionError("database state violates the database constraints")
    before_view = spec.view_image(db_state)
    if not satisfies_all(before_view, spec.view_constraints()):
        raise PreconditionError("current view state violates the view constraints")

    after_view = apply_update(program, before_view)
    if not satisfies_all(after_view, spec.view_constraints()):
        return TranslatabilityVerdict(
            status=NOT_TRANSLATABLE, reason=INCONSISTENT_POST_STATE, post_view=after_view
        )

    resolved = rewritings if rewritings is not None else synthesize_all(spec, budget=budget)
    missing = sorted(n for n in spec.db_schema.names() if resolved.get(n) is None)
    if missing:
        return TranslatabilityVerdict(
            status=UNKNOWN,
            reason=f"no inverse rewriting available for: {', '.join(missing)}",
            post_view=after_view,
        )

    candidate = _materialize(spec, resolved, after_view)
    combined = disjoint_union(candidate, after_view)
    result = chase(combined, spec.full_constraints, budget=budget)
    if result.status == CHASE_EGD_FAILURE:
        return TranslatabilityVerdict(status=NOT_TRANSLATABLE, reason=NO_PREIMAGE, post_view=after_view)
    if result.status == CHASE_BUDGET_EXHAUSTED:
        return TranslatabilityVerdict(
            status=UNKNOWN, reason=f"integration chase exhausted budget ({budget})", post_view=after_view
        )

    closed = result.instance
    if not closed.is_ground():
        return TranslatabilityVerdict(status=NOT_TRANSLATABLE, reason=NO_PREIMAGE, post_view=after_view)
    new_db = make_instance(spec.db_schema, closed.restrict(set(spec.db_schema.names())))
    if spec.view_image(new_db) != after_view:
        return TranslatabilityVerdict(status=NOT_TRANSLATABLE, reason=NO_PREIMAGE, post_view=after_view)
    return TranslatabilityVerdict(
        status=TRANSLATABLE,
        translation=diff(db_state, new_db),
        post_view=after_view,
        new_db_state=new_db,
    )


def translate(
    spec: ViewSpec,
    program: UpdateProgram,
    db_state: Instance,
    budget: int = DEFAULT_BUDGET,
    domain_bound: int = DEFAULT_DOMAIN_BOUND,
    rewritings: Mapping[str, Rewriting | None] | None = None,
    invertibility: InvertibilityReport | None = None,
) -> GroundDelta:
    """The translation of a translatable update; raises
    TranslationUnavailableError otherwise."""
    verdict = translatable_at(
        spec, program, db_state,
        budget=budget, domain_bound=domain_bound,
        rewritings=rewritings, invertibility=invertibility,
    )
    if verdict.status != TRANSLATABLE:
        raise TranslationUnavailableError(
            f"update is not translatable at this state ({verdict.status}: {verdict.reason})"
        )
    return verdict.translation


# ---------------------------------------------------------------------------
# Translatability with respect to every view state
#
# Insert-only programs whose conditions are positive atoms plus equalities,
# over view symbols whose definitions have no existential body variables,
# admit an exact symbolic post-state: every post-state symbol (view and
# database) is a union of conjunctive queries over the pre-state symbols.
# All post-state requirements then reduce to implication checks against the
# pre-state constraints.


@dataclass(frozen=True)
class EverywhereVerdict:
    status: str  # YES | NO | UNKNOWN
    counterexample_state: Instance | None = None
    counterexample_db: Instance | None = None
    reason: str | None = None


@dataclass(frozen=True)
class _Disjunct:
    """One case of a post-state symbol: head argument pattern plus a body of
    pre-state atoms that makes the case fire."""

    head_args: tuple[Term, ...]
    body: tuple[Atom, ...]


class _FreshNames:
    def __init__(self) -> None:
        self._counter = itertools.count(1)

    def var(self) -> Var:
        return Var(f"u{next(self._counter)}")

    def rename(self, disjunct: _Disjunct) -> _Disjunct:
        mapping = {v: self.var() for v in _disjunct_vars(disjunct)}
        return _Disjunct(
            head_args=tuple(mapping.get(t, t) if isinstance(t, Var) else t for t in disjunct.head_args),
            body=tuple(a.substitute(mapping) for a in disjunct.body),
        )


def _disjunct_vars(d: _Disjunct) -> tuple[Var, ...]:
    seen: dict[Var, None] = {}
    for t in d.head_args:
        if isinstance(t, Var):
            seen.setdefault(t)
    for v in atoms_variables(d.body):
        seen.setdefault(v)
    return tuple(seen)


def _walk(term: Term, subst: dict[Var, Term]) -> Term:
    while isinstance(term, Var) and term in subst:
        term = subst[term]
    return term


def _unify_terms(a: Term, b: Term, subst: dict[Var, Term]) -> dict[Var, Term] | None:
    a, b = _walk(a, subst), _walk(b, subst)
    if a == b:
        return subst
    if isinstance(a, Var):
        out = dict(subst)
        out[a] = b
        return out
    if isinstance(b, Var):
        out = dict(subst)
        out[b] = a
        return out
    return None


def _unify_tuples(xs, ys, subst: dict[Var, Term]) -> dict[Var, Term] | None:
    out = subst
    for x, y in zip(xs, ys):
        out = _unify_terms(x, y, out)
        if out is None:
            return None
    return out


def _apply_subst_term(term: Term, subst: dict[Var, Term]) -> Term:
    return _walk(term, subst)


def _apply_subst_atom(atom: Atom, subst: dict[Var, Term]) -> Atom:
    return Atom(atom.symbol, tuple(_walk(t, subst) for t in atom.args))


def _subsume(pattern: tuple[Term, ...], target: tuple[Term, ...]) -> dict[Var, Term] | None:
    """One-way matching: bind the pattern's variables so it equals the
    target; pattern constants must match the target exactly."""
    out: dict[Var, Term] = {}
    for p, t in zip(pattern, target):
        if isinstance(p, Var):
            if p in out and out[p] != t:
                return None
            out[p] = t
        elif p != t:
            return None
    return out


def _encodable(spec: ViewSpec, program: UpdateProgram) -> str | None:
    """None when the program is in the implication-encodable fragment,
    otherwise a human-readable reason."""
    for step in program.steps:
        if step.kind != INSERT:
            return f"{step.kind} steps are outside the implication-encodable fragment"
        if step.condition.inequalities:
            return "inequality guards are outside the implication-encodable fragment"
        definition = spec.definition_of(step.pattern.symbol)
        head = definition.head
        if not all(isinstance(t, Var) for t in head.args) or len(set(head.args)) != len(head.args):
            return "inserted symbol's definition head is not a sequence of distinct variables"
        head_vars = set(head.args)
        if not set(atoms_variables(definition.body)) <= head_vars:
            return (
                f"definition of {head.symbol} has existential body variables; "
                "insertions would require invented database values"
            )
    return None


def _fold_program(spec: ViewSpec, program: UpdateProgram) -> dict[str, list[_Disjunct]] | None:
    """Symbolic post-state view definitions after the whole transaction, as
    unions of conjunctive cases over the pre-state view symbols. Returns None
    when some step can never fire (contradictory equality guard)."""
    fresh = _FreshNames()
    defs: dict[str, list[_Disjunct]] = {}
    for name in spec.view_schema.names():
        args = tuple(fresh.var() for _ in range(spec.view_schema.arity(name)))
        defs[name] = [_Disjunct(head_args=args, body=(Atom(name, args),))]

    for step in program.steps:
        subst: dict[Var, Term] | None = {}
        for s, t in step.condition.equalities:
            subst = _unify_terms(s, t, subst)
            if subst is None:
                break
        if subst is None:
            continue  # guard can never hold; the step is a no-op
        pattern = _apply_subst_atom(step.pattern, subst)
        cond_atoms = tuple(_apply_subst_atom(a, subst) for a in step.condition.atoms)

        new_disjuncts: list[_Disjunct] = []
        snapshot = {name: list(ds) for name, ds in defs.items()}

        def expand(i: int, binding: dict[Var, Term], collected: tuple[Atom, ...]) -> None:
            if i == len(cond_atoms):
                head = tuple(_walk(t, binding) for t in pattern.args)
                body = tuple(_apply_subst_atom(a, binding) for a in collected)
                new_disjuncts.append(fresh.rename(_Disjunct(head_args=head, body=body)))
                return
            atom = cond_atoms[i]
            for disjunct in snapshot[atom.symbol]:
                renamed = fresh.rename(disjunct)
                extended = _unify_tuples(atom.args, renamed.head_args, binding)
                if extended is not None:
                    expand(i + 1, extended, collected + renamed.body)

        expand(0, dict(subst), ())
        defs[pattern.symbol] = defs[pattern.symbol] + new_disjuncts
    return defs


def _witness_cases(spec: ViewSpec, post_view: dict[str, list[_Disjunct]]) -> dict[str, list[_Disjunct]]:
    """Post-state database definitions: the pre-state rows plus, for every
    inserted view case, the ground witness rows of its definition body."""
    fresh = _FreshNames()
    post_db: dict[str, list[_Disjunct]] = {}
    for name in spec.db_schema.names():
        args = tuple(fresh.var() for _ in range(spec.db_schema.arity(name)))
        post_db[name] = [_Disjunct(head_args=args, body=(Atom(name, args),))]
    for view_name, disjuncts in post_view.items():
        definition = spec.definition_of(view_name)
        identity_count = 1
        for disjunct in disjuncts[identity_count:]:
            mapping = dict(zip(definition.head.args, disjunct.head_args))
            for atom in definition.body:
                row = tuple(mapping[t] if isinstance(t, Var) else t for t in atom.args)
                post_db[atom.symbol].append(_Disjunct(head_args=row, body=disjunct.body))
    return post_db


def _unfold_body(
    atoms: tuple[Atom, ...], defs: dict[str, list[_Disjunct]], fresh: _FreshNames
) -> Iterator[tuple[tuple[Atom, ...], dict[Var, Term]]]:
    """All case splits of a body over post-state definitions: each atom is
    replaced by one case, with the unification that makes it apply."""

    def expand(i: int, binding: dict[Var, Term], collected: tuple[Atom, ...]):
        if i == len(atoms):
            yield tuple(_apply_subst_atom(a, binding) for a in collected), binding
            return
        atom = atoms[i]
        for disjunct in defs[atom.symbol]:
            renamed = fresh.rename(disjunct)
            extended = _unify_tuples(atom.args, renamed.head_args, binding)
            if extended is not None:
                yield from expand(i + 1, extended, collected + renamed.body)

    yield from expand(0, {}, ())


def _coverage_goal_valid(
    spec: ViewSpec,
    premise: tuple[Atom, ...],
    targets: tuple[Atom, ...],
    defs: dict[str, list[_Disjunct]],
    fresh: _FreshNames,
    budget: int,
) -> bool:
    """Does some choice of post-state cases cover every target atom, with the
    combined case bodies implied by the premise?"""

    def attempt(i: int, head_atoms: tuple[Atom, ...]) -> bool:
        if i == len(targets):
            if not head_atoms:
                return True
            goal = TGD(body=premise, head=head_atoms)
            return implies(
                spec.full_constraints, goal, budget=budget,
                domain_bound=0, schema=spec.combined_schema,
            ).status == VALID
        target = targets[i]
        for disjunct in defs[target.symbol]:
            renamed = fresh.rename(disjunct)
            match = _subsume(renamed.head_args, target.args)
            if match is None:
                continue
            case_body = tuple(a.substitute(match) for a in renamed.body)
            if attempt(i + 1, head_atoms + case_body):
                return True
        return False

    return attempt(0, ())


def _certify_everywhere(
    spec: ViewSpec, program: UpdateProgram, budget: int
) -> tuple[bool, str | None]:
    """Implication-based certificate that the update translates at every
    consistent view state. Sound; incompleteness surfaces as a failed check
    (never as a wrong yes)."""
    post_view = _fold_program(spec, program)
    if post_view is None:
        return False, "could not fold the transaction"
    post_db = _witness_cases(spec, post_view)
    fresh = _FreshNames()
    cs = spec.full_constraints
    schema = spec.combined_schema

    def check_dep(dep, defs) -> bool:
        if isinstance(dep, EGD):
            for premise, binding in _unfold_body(dep.body, defs, fresh):
                lhs = _walk(binding.get(dep.lhs, dep.lhs), binding)
                rhs = _walk(binding.get(dep.rhs, dep.rhs), binding)
                verdict = entails_equality(cs, premise, lhs, rhs, budget=budget, schema=schema)
                if verdict.status != VALID:
                    return False
            return True
        for premise, binding in _unfold_body(dep.body, defs, fresh):
            targets = tuple(_apply_subst_atom(a, binding) for a in dep.head)
            if not _coverage_goal_valid(spec, premise, targets, defs, fresh, budget):
                return False
        return True

    # Post-state view constraints.
    for dep in spec.view_constraints():
        if not check_dep(dep, post_view):
            return False, "a view constraint is not preserved by the update"
    # Post-state database constraints on the rewritten database.
    for dep in spec.db_constraints():
        if not check_dep(dep, post_db):
            return False, "a database constraint is not preserved by the witness rows"
    # Exactness, forward: every post-database match of a definition body is a
    # post-view fact.
    for definition in spec.definitions:
        for premise, binding in _unfold_body(definition.body, post_db, fresh):
            derived = _apply_subst_atom(definition.head, binding)
            if not _coverage_goal_valid(spec, premise, (derived,), post_view, fresh, budget):
                return False, f"inserted rows would leak new {definition.head.symbol} facts"
    # Exactness, backward: every post-view fact has a full post-database
    # witness.
    for name in spec.view_schema.names():
        definition = spec.definition_of(name)
        for disjunct in post_view[name]:
            renamed = fresh.rename(disjunct)
            mapping = dict(zip(definition.head.args, renamed.head_args))
            targets = tuple(
                Atom(a.symbol, tuple(mapping.get(t, t) if isinstance(t, Var) else t for t in a.args))
                for a in definition.body
            )
            if not _coverage_goal_valid(spec, renamed.body, targets, post_db, fresh, budget):
                return False, f"a new {name} fact can lack a database witness"
    return True, None


def _state_space(spec: ViewSpec, constants: tuple[Const, ...]) -> list[Fact] | None:
    facts: list[Fact] = []
    for decl in spec.db_schema.symbols:
        count = len(constants) ** decl.arity
        if len(facts) + count > MAX_ENUMERATION_FACTS:
            return None
        for args in itertools.product(constants, repeat=decl.arity):
            facts.append(Fact(decl.name, args))
    return facts


def _counterexample_state_search(
    spec: ViewSpec,
    program: UpdateProgram,
    budget: int,
    domain_bound: int,
    rewritings,
    invertibility,
) -> tuple[EverywhereVerdict | None, bool]:
    """Bounded sweep over consistent states; returns (verdict, exhaustive).
    The sweep is exhaustive when no domain size was skipped and no state
    returned unknown."""
    update_consts = tuple(sorted(program.constants(), key=lambda c: c.name))
    exhaustive = True
    seen_images: set[tuple] = set()
    for extra in range(domain_bound + 1):
        fresh = tuple(Const(f"c{i + 1}") for i in range(extra))
        constants = tuple(dict.fromkeys(update_consts + fresh))
        if not constants:
            continue
        space = _state_space(spec, constants)
        if space is None:
            exhaustive = False
            break
        for mask in range(1 << len(space)):
            facts = frozenset(f for i, f in enumerate(space) if mask >> i & 1)
            db = make_instance(spec.db_schema, facts)
            if not spec.is_consistent(db):
                continue
            image = spec.view_image(db)
            key = tuple(f.sort_key() for f in image.sorted_facts)
            if key in seen_images:
                continue
            seen_images.add(key)
            verdict = translatable_at(
                spec, program, db,
                budget=budget, domain_bound=domain_bound,
                rewritings=rewritings, invertibility=invertibility,
            )
            if verdict.status == NOT_TRANSLATABLE:
                return (
                    EverywhereVerdict(
                        status=NO,
                        counterexample_state=image,
                        counterexample_db=db,
                        reason=verdict.reason,
                    ),
                    exhaustive,
                )
            if verdict.status == UNKNOWN:
                exhaustive = False
    return None, exhaustive


def translatable_everywhere(
    spec: ViewSpec,
    program: UpdateProgram,
    budget: int = DEFAULT_BUDGET,
    domain_bound: int = DEFAULT_DOMAIN_BOUND,
    invertibility: InvertibilityReport | None = None,
) -> EverywhereVerdict:
    """Decide whether the update translates at every consistent view state.

    A yes is certified by implication checks on the symbolic post-state (the
    encodable fragment); a no carries a consistent counterexample state. For
    updates outside the fragment the answer degrades to a bounded search for
    counterexamples, and unknown when none is found.
    """
    report = _require_invertible(spec, invertibility, budget, domain_bound)
    _validate_program(spec, program)
    rewritings = synthesize_all(spec, budget=budget)

    fragment_gap = _encodable(spec, program)
    if fragment_gap is None:
        certified, failure = _certify_everywhere(spec, program, budget)
        if certified:
            return EverywhereVerdict(status=YES)
    else:
        failure = fragment_gap

    verdict, exhaustive = _counterexample_state_search(
        spec, program, budget, domain_bound, rewritings, report
    )
    if verdict is not None:
        return verdict
    return EverywhereVerdict(
        status=UNKNOWN,
        reason=f"{failure}; bounded search over consistent states found no counterexample",
    )
