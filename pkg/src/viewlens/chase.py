"""The chase engine, chase-based logical implication, and a brute-force
finite-model enumerator used as an independent oracle.

The chase is the standard (non-oblivious) variant: a tgd trigger fires only
when its head has no extension into the current instance, egd triggers unify
nulls or fail on distinct constants. Trigger selection is deterministic
(lexicographic by dependency index, then by fact order), so identical inputs
always produce identical results.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

from .deps import ConstraintSet, Dependency, EGD, TGD
from .model import (
    Atom,
    Const,
    Fact,
    Instance,
    Null,
    Schema,
    SymbolDecl,
    DATABASE,
    Term,
    Var,
    _match_args,
    holds,
    make_instance,
    match_atoms,
)

DEFAULT_BUDGET = 10_000
DEFAULT_DOMAIN_BOUND = 3
# Bounded countermodel searches skip any domain size whose full fact space
# exceeds this many facts (the subset lattice is 2**n).
MAX_ENUMERATION_FACTS = 14

CHASE_SUCCESS = "success"
CHASE_EGD_FAILURE = "egd-failure"
CHASE_BUDGET_EXHAUSTED = "budget-exhausted"

VALID = "valid"
INVALID = "invalid"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class ChaseResult:
    status: str
    instance: Instance
    steps: int
    # Term substitutions applied by egd firings, in order.
    unifications: tuple[tuple[Term, Term], ...] = ()
    failed_egd: EGD | None = None
    failed_binding: tuple[tuple[Var, Term], ...] = ()

    @cached_property
    def _resolution(self) -> dict[Term, Term]:
        resolved: dict[Term, Term] = {}
        for old, new in self.unifications:
            resolved[old] = new
        return resolved

    def resolve(self, term: Term) -> Term:
        """Follow egd unifications to a term's final representative."""
        seen = set()
        while term in self._resolution and term not in seen:
            seen.add(term)
            term = self._resolution[term]
        return term


@dataclass(frozen=True)
class ImplicationVerdict:
    status: str  # VALID | INVALID | UNKNOWN
    countermodel: Instance | None = None
    reason: str | None = None


# ---------------------------------------------------------------------------
# Dependency satisfaction


def satisfies(instance: Instance, dep: Dependency) -> bool:
    if isinstance(dep, EGD):
        for binding in match_atoms(dep.body, instance):
            if binding[dep.lhs] != binding[dep.rhs]:
                return False
        return True
    for binding in match_atoms(dep.body, instance):
        universal = {v: binding[v] for v in dep.body_vars if v in binding}
        head = tuple(atom.substitute(universal) for atom in dep.head)
        if not holds(head, instance):
            return False
    return True


def satisfies_all(instance: Instance, deps) -> bool:
    deps = deps.dependencies() if isinstance(deps, ConstraintSet) else deps
    return all(satisfies(instance, dep) for dep in deps)


def violates(instance: Instance, dep: Dependency) -> bool:
    return not satisfies(instance, dep)


# ---------------------------------------------------------------------------
# The chase


def _orient(a: Term, b: Term) -> tuple[Term, Term] | None:
    """(keep, drop) for an egd unification; None means failure on two
    distinct constants. Constants win over nulls, lower null index wins
    otherwise."""
    if isinstance(a, Const) and isinstance(b, Const):
        return None
    if isinstance(a, Const):
        return a, b
    if isinstance(b, Const):
        return b, a
    return (a, b) if a.index < b.index else (b, a)


class _ChaseEngine:
    """Semi-naive trigger management behind the standard chase.

    Candidate triggers are discovered incrementally from newly added facts
    and kept in one heap per dependency, ordered by the sort keys of the
    matched facts. Firing order is therefore exactly lexicographic by
    dependency index, then by fact order, and each candidate's head check
    runs once (tgd heads stay satisfied and egd equalities stay settled as
    long as facts are only added; an egd firing rewrites terms, so it resets
    the discovery state).
    """

    def __init__(self, instance: Instance, deps: tuple[Dependency, ...]) -> None:
        self.deps = deps
        self.facts: set[Fact] = set(instance.facts)
        self.next_null = instance.max_null_index() + 1
        self.unifications: list[tuple[Term, Term]] = []
        self._reset()

    # -- fact storage and positional indexes --

    def _reset(self) -> None:
        self.fact_lists: dict[str, list[Fact]] = {}
        for fact in sorted(self.facts, key=Fact.sort_key):
            self.fact_lists.setdefault(fact.symbol, []).append(fact)
        self.indexes: dict[tuple[str, tuple[int, ...]], dict[tuple, list[Fact]]] = {}
        self.heaps: list[list[tuple[tuple, dict]]] = [[] for _ in self.deps]
        self.known: list[set[tuple]] = [set() for _ in self.deps]
        for d, dep in enumerate(self.deps):
            for facts, binding in self._matches(dep.body, {}):
                self._offer(d, facts, binding)

    def _lookup(self, symbol: str, bound: dict[int, Term]) -> list[Fact]:
        rows = self.fact_lists.get(symbol, [])
        if not bound or not rows:
            return rows
        positions = tuple(sorted(bound))
        index_key = (symbol, positions)
        index = self.indexes.get(index_key)
        if index is None:
            index = {}
            for fact in rows:
                index.setdefault(tuple(fact.args[p] for p in positions), []).append(fact)
            self.indexes[index_key] = index
        return index.get(tuple(bound[p] for p in positions), [])

    def _insert(self, fact: Fact) -> bool:
        if fact in self.facts:
            return False
        self.facts.add(fact)
        self.fact_lists.setdefault(fact.symbol, []).append(fact)
        for (symbol, positions), index in self.indexes.items():
            if symbol == fact.symbol:
                index.setdefault(tuple(fact.args[p] for p in positions), []).append(fact)
        return True

    # -- matching --

    def _matches(self, atoms, binding: dict, pinned: tuple[int, Fact] | None = None):
        """All (matched facts, binding) pairs extending `binding`; when
        `pinned` is given, atom `pinned[0]` must match exactly that fact."""
        atoms = tuple(atoms)

        def extend(i: int, bound: dict, used: tuple[Fact, ...]):
            if i == len(atoms):
                yield used, bound
                return
            atom = atoms[i]
            if pinned is not None and i == pinned[0]:
                candidates = (pinned[1],) if pinned[1].symbol == atom.symbol else ()
            else:
                fixed = {}
                for p, t in enumerate(atom.args):
                    if isinstance(t, Var):
                        if t in bound:
                            fixed[p] = bound[t]
                    else:
                        fixed[p] = t
                candidates = self._lookup(atom.symbol, fixed)
            for fact in tuple(candidates):
                nxt = _match_args(atom.args, fact.args, bound)
                if nxt is not None:
                    yield from extend(i + 1, dict(nxt), used + (fact,))

        yield from extend(0, dict(binding), ())

    def _satisfied(self, atoms) -> bool:
        return next(self._matches(atoms, {}), None) is not None

    # -- candidate management --

    def _offer(self, d: int, facts: tuple[Fact, ...], binding: dict) -> None:
        key = tuple(f.sort_key() for f in facts)
        if key in self.known[d]:
            return
        self.known[d].add(key)
        heapq.heappush(self.heaps[d], (key, binding))

    def _discover(self, fact: Fact) -> None:
        for d, dep in enumerate(self.deps):
            for i, atom in enumerate(dep.body):
                if atom.symbol != fact.symbol:
                    continue
                for facts, binding in self._matches(dep.body, {}, pinned=(i, fact)):
                    self._offer(d, facts, binding)

    def _active(self, dep: Dependency, binding: dict) -> bool:
        if isinstance(dep, EGD):
            return binding[dep.lhs] != binding[dep.rhs]
        universal = {v: binding[v] for v in dep.body_vars}
        head = tuple(atom.substitute(universal) for atom in dep.head)
        return not self._satisfied(head)

    # -- firing --

    def fire_tgd(self, dep: TGD, binding: dict) -> None:
        assignment = dict(binding)
        for v in dep.existential_vars:
            assignment[v] = Null(self.next_null)
            self.next_null += 1
        for atom in dep.head:
            fact = atom.substitute(assignment).to_fact()
            if self._insert(fact):
                self._discover(fact)

    def fire_egd(self, dep: EGD, binding: dict) -> bool:
        """Unify the trigger's terms; False means failure on two distinct
        constants."""
        oriented = _orient(binding[dep.lhs], binding[dep.rhs])
        if oriented is None:
            return False
        keep, drop = oriented
        self.unifications.append((drop, keep))
        self.facts = {
            Fact(f.symbol, tuple(keep if a == drop else a for a in f.args))
            for f in self.facts
        }
        self._reset()
        return True

    def instance(self, schema) -> Instance:
        return Instance(schema, frozenset(self.facts))


def chase(instance: Instance, cs: ConstraintSet | tuple, budget: int = DEFAULT_BUDGET) -> ChaseResult:
    """Run the standard chase of `instance` with the dependency set.

    Returns a fixpoint instance on success, an egd failure when two distinct
    constants are forced equal, or the partial instance when the step budget
    runs out. Identical inputs always yield identical results: the next
    trigger fired is the least active one, ordered lexicographically by
    dependency index and then by the sort keys of the matched facts.
    """
    deps = cs.dependencies() if isinstance(cs, ConstraintSet) else tuple(cs)
    engine = _ChaseEngine(instance, deps)
    steps = 0

    while True:
        fired = False
        for d, dep in enumerate(deps):
            heap = engine.heaps[d]
            while heap:
                _, binding = heap[0]
                if not engine._active(dep, binding):
                    heapq.heappop(heap)
                    continue
                if steps >= budget:
                    return ChaseResult(
                        status=CHASE_BUDGET_EXHAUSTED,
                        instance=engine.instance(instance.schema),
                        steps=steps,
                        unifications=tuple(engine.unifications),
                    )
                heapq.heappop(heap)
                steps += 1
                if isinstance(dep, TGD):
                    engine.fire_tgd(dep, binding)
                else:
                    if not engine.fire_egd(dep, binding):
                        return ChaseResult(
                            status=CHASE_EGD_FAILURE,
                            instance=engine.instance(instance.schema),
                            steps=steps,
                            unifications=tuple(engine.unifications),
                            failed_egd=dep,
                            failed_binding=tuple(
                                sorted(binding.items(), key=lambda kv: kv[0].name)
                            ),
                        )
                fired = True
                break
            if fired:
                break
        if not fired:
            return ChaseResult(
                status=CHASE_SUCCESS,
                instance=engine.instance(instance.schema),
                steps=steps,
                unifications=tuple(engine.unifications),
            )


# ---------------------------------------------------------------------------
# Freezing and groundification


def freeze_atoms(atoms, start_index: int = 1) -> tuple[frozenset[Fact], dict[Var, Null]]:
    """Instantiate each variable with a fresh labeled null ("soft" frozen
    constant: later egd steps may still unify it)."""
    mapping: dict[Var, Null] = {}
    index = start_index
    facts = set()
    for atom in atoms:
        args = []
        for t in atom.args:
            if isinstance(t, Var):
                if t not in mapping:
                    mapping[t] = Null(index)
                    index += 1
                args.append(mapping[t])
            else:
                args.append(t)
        facts.add(Fact(atom.symbol, tuple(args)))
    return frozenset(facts), mapping


def groundify(instance: Instance, prefix: str = "_n") -> Instance:
    """Rename every labeled null to a fresh constant. Satisfaction of
    dependencies is preserved under the injective renaming."""
    nulls = sorted(
        {a for f in instance.facts for a in f.args if isinstance(a, Null)},
        key=lambda n: n.index,
    )
    renaming: dict[Term, Term] = {n: Const(f"{prefix}{i + 1}") for i, n in enumerate(nulls)}
    facts = {
        Fact(f.symbol, tuple(renaming.get(a, a) for a in f.args)) for f in instance.facts
    }
    return instance.with_facts(facts)


def schema_of_dependencies(deps, goal=None, kind: str = DATABASE) -> Schema:
    """Derive a schema from the symbols mentioned in dependencies (and an
    optional goal). Arities must be used consistently."""
    arities: dict[str, int] = {}

    def visit(atoms):
        for atom in atoms:
            before = arities.get(atom.symbol)
            if before is None:
                arities[atom.symbol] = len(atom.args)
            elif before != len(atom.args):
                raise ValueError(f"symbol {atom.symbol} used with two arities")

    items = deps.dependencies() if isinstance(deps, ConstraintSet) else deps
    for dep in items:
        visit(dep.body)
        if isinstance(dep, TGD):
            visit(dep.head)
    if goal is not None:
        visit(goal.body)
        if isinstance(goal, TGD):
            visit(goal.head)
    return Schema(tuple(SymbolDecl(n, a, kind) for n, a in sorted(arities.items())))


# ---------------------------------------------------------------------------
# Logical implication


def _goal_violation(instance: Instance, goal: Dependency) -> bool:
    return violates(instance, goal)


def _countermodel_search(cs, goal, schema: Schema, domain_bound: int) -> Instance | None:
    deps = cs.dependencies() if isinstance(cs, ConstraintSet) else tuple(cs)
    for k in range(1, domain_bound + 1):
        if _fact_space_size(schema, k) > MAX_ENUMERATION_FACTS:
            break
        for model in enumerate_models(cs, schema, k):
            if _goal_violation(model, goal):
                return model
    return None


def implies(
    cs: ConstraintSet | tuple,
    goal: Dependency,
    budget: int = DEFAULT_BUDGET,
    domain_bound: int = DEFAULT_DOMAIN_BOUND,
    schema: Schema | None = None,
) -> ImplicationVerdict:
    """Decide whether every instance satisfying `cs` satisfies `goal`.

    The goal's body is frozen (variables become fresh labeled nulls) and
    chased with `cs`; the goal holds iff the frozen head is satisfied in the
    fixpoint (for egds: iff the two frozen terms were unified, or the chase
    failed, which makes the premise unsatisfiable). When the chase exhausts
    its budget the decision falls back to a bounded countermodel search;
    `unknown` is returned when neither route resolves.
    """
    deps = cs.dependencies() if isinstance(cs, ConstraintSet) else tuple(cs)
    if schema is None:
        schema = schema_of_dependencies(deps, goal)
    frozen, var_map = freeze_atoms(goal.body)
    start = make_instance(schema, frozen)
    result = chase(start, deps, budget=budget)

    if result.status == CHASE_EGD_FAILURE:
        # The goal's premise cannot be embedded in any model of cs.
        return ImplicationVerdict(status=VALID, reason="premise-unsatisfiable")

    if result.status == CHASE_SUCCESS:
        if isinstance(goal, EGD):
            satisfied = result.resolve(var_map[goal.lhs]) == result.resolve(var_map[goal.rhs])
        else:
            rigid = {v: result.resolve(n) for v, n in var_map.items()}
            head = tuple(atom.substitute(rigid) for atom in goal.head)
            satisfied = holds(head, result.instance)
        if satisfied:
            return ImplicationVerdict(status=VALID)
        return ImplicationVerdict(status=INVALID, countermodel=groundify(result.instance))

    counter = _countermodel_search(cs, goal, schema, domain_bound)
    if counter is not None:
        return ImplicationVerdict(status=INVALID, countermodel=counter)
    return ImplicationVerdict(
        status=UNKNOWN,
        reason=f"chase budget ({budget}) exhausted; bounded search found no countermodel",
    )


def entails_equality(
    cs: ConstraintSet | tuple,
    body: tuple[Atom, ...],
    lhs: Term,
    rhs: Term,
    budget: int = DEFAULT_BUDGET,
    schema: Schema | None = None,
) -> ImplicationVerdict:
    """Like implies() with an egd goal, but the equated sides may be
    variables or constants."""
    deps = cs.dependencies() if isinstance(cs, ConstraintSet) else tuple(cs)
    if lhs == rhs:
        return ImplicationVerdict(status=VALID)
    if schema is None:
        schema = schema_of_dependencies(deps, TGD(body=body, head=body) if body else None)
    frozen, var_map = freeze_atoms(body)
    result = chase(make_instance(schema, frozen), deps, budget=budget)
    if result.status == CHASE_EGD_FAILURE:
        return ImplicationVerdict(status=VALID, reason="premise-unsatisfiable")
    if result.status == CHASE_BUDGET_EXHAUSTED:
        return ImplicationVerdict(status=UNKNOWN, reason=f"chase budget ({budget}) exhausted")

    def image(term: Term) -> Term:
        return result.resolve(var_map.get(term, term) if isinstance(term, Var) else term)

    if image(lhs) == image(rhs):
        return ImplicationVerdict(status=VALID)
    return ImplicationVerdict(status=INVALID, countermodel=groundify(result.instance))


# ---------------------------------------------------------------------------
# Finite-model enumeration


def domain_constants(k: int) -> tuple[Const, ...]:
    return tuple(Const(f"c{i + 1}") for i in range(k))


def _fact_space_size(schema: Schema, k: int) -> int:
    return sum(k ** d.arity for d in schema.symbols)


def all_facts(schema: Schema, k: int) -> tuple[Fact, ...]:
    """The full fact space over constants c1..ck, in canonical order."""
    consts = domain_constants(k)
    facts: list[Fact] = []
    for decl in schema.symbols:  # sorted by name
        for args in itertools.product(consts, repeat=decl.arity):
            facts.append(Fact(decl.name, args))
    return tuple(facts)


def enumerate_models(cs: ConstraintSet | tuple, schema: Schema, k: int) -> Iterator[Instance]:
    """Every instance over constants c1..ck satisfying the dependency set,
    streamed in a canonical order: subsets of the sorted fact space are
    visited in binary-counter order (bit i toggles the i-th fact)."""
    if k < 1:
        raise ValueError("domain size must be at least 1")
    deps = cs.dependencies() if isinstance(cs, ConstraintSet) else tuple(cs)
    space = all_facts(schema, k)
    for mask in range(1 << len(space)):
        facts = frozenset(f for i, f in enumerate(space) if mask >> i & 1)
        candidate = Instance(schema, facts)
        if satisfies_all(candidate, deps):
            yield candidate
