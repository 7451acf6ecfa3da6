"""Determinacy under constraints, invertibility, and synthesis/verification
of inverse rewritings for database symbols.

Positive verdicts come only from a chase certificate over a two-copy
constraint system; negative verdicts only from a verified finite
counterexample pair. Anything else is reported as unknown.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .chase import (
    CHASE_SUCCESS,
    DEFAULT_BUDGET,
    DEFAULT_DOMAIN_BOUND,
    INVALID,
    MAX_ENUMERATION_FACTS,
    UNKNOWN,
    VALID,
    all_facts,
    chase,
    implies,
    satisfies_all,
)
from .deps import (
    ConstraintSet,
    DB_CONSTRAINT,
    DEFINITION_RULE,
    EGD,
    TGD,
    VIEW_CONSTRAINT,
    ViewSpec,
)
from .model import (
    Atom,
    CQ,
    Const,
    DATABASE,
    Fact,
    Instance,
    Null,
    Schema,
    SymbolDecl,
    Var,
    atoms_variables,
    disjoint_union,
    evaluate_cq,
    make_instance,
)

DETERMINED = "determined"
NOT_DETERMINED = "not-determined"

_PRIME = "'"


@dataclass(frozen=True)
class Rewriting:
    """A conjunctive query over view symbols reconstructing a database
    symbol. The head uses pairwise distinct variables."""

    target: str
    query: CQ

    def __post_init__(self) -> None:
        head = self.query.head
        if head.symbol != self.target:
            raise ValueError("rewriting head must use the target symbol")
        if not all(isinstance(t, Var) for t in head.args) or len(set(head.args)) != len(head.args):
            raise ValueError("rewriting head must consist of distinct variables")
        if not self.query.is_safe():
            raise ValueError("rewriting query is unsafe")


@dataclass(frozen=True)
class ChaseWitness:
    """Certificate for a determinacy verdict: the two-copy transfer goal that
    the chase validated."""

    goal: TGD
    description: str


@dataclass(frozen=True)
class DeterminacyVerdict:
    status: str  # DETERMINED | NOT_DETERMINED | UNKNOWN
    certificate: ChaseWitness | Rewriting | None = None
    counterexample: tuple[Instance, Instance] | None = None
    reason: str | None = None


@dataclass(frozen=True)
class InvertibilityReport:
    invertible: bool
    status: str  # "invertible" | "not-invertible" | "unknown"
    verdicts: tuple[tuple[str, DeterminacyVerdict], ...]

    def verdict_for(self, symbol: str) -> DeterminacyVerdict:
        return dict(self.verdicts)[symbol]


# ---------------------------------------------------------------------------
# Two-copy system


def _prime(name: str) -> str:
    return name + _PRIME


def _prime_atom(atom: Atom) -> Atom:
    return Atom(_prime(atom.symbol), atom.args)


def _prime_dep(dep, db_names: set[str]):
    def conv(atoms):
        return tuple(_prime_atom(a) if a.symbol in db_names else a for a in atoms)

    if isinstance(dep, EGD):
        return EGD(body=conv(dep.body), lhs=dep.lhs, rhs=dep.rhs)
    return TGD(body=conv(dep.body), head=conv(dep.head))


def two_copy_system(spec: ViewSpec) -> tuple[tuple, Schema]:
    """Dependencies over two database copies sharing one copy of the view
    symbols: the database constraints and exactness rules are instantiated
    for both copies, the view constraints once."""
    db_names = set(spec.db_schema.names())
    deps: list = []
    for dep, prov in spec.full_constraints:
        if prov == VIEW_CONSTRAINT:
            deps.append(dep)
        else:  # database constraints and definition rules: both copies
            deps.append(dep)
            deps.append(_prime_dep(dep, db_names))
    primed_decls = tuple(
        SymbolDecl(_prime(d.name), d.arity, DATABASE) for d in spec.db_schema.symbols
    )
    schema = Schema(spec.combined_schema.symbols + primed_decls)
    return tuple(deps), schema


def _transfer_goal(spec: ViewSpec, target: str) -> TGD:
    arity = spec.db_schema.arity(target)
    args = tuple(Var(f"x{i + 1}") for i in range(arity))
    return TGD(body=(Atom(target, args),), head=(Atom(_prime(target), args),))


# ---------------------------------------------------------------------------
# Counterexample decoding and search


def _decode_counterexample(
    spec: ViewSpec, countermodel: Instance, target: str
) -> tuple[Instance, Instance] | None:
    """Split a two-copy countermodel into a pair of combined instances that
    satisfy all constraints, share their view part, and differ on the
    target symbol. Returns None if the decoded pair fails verification."""
    db_names = set(spec.db_schema.names())
    view_names = set(spec.view_schema.names())
    view_facts = {f for f in countermodel.facts if f.symbol in view_names}
    first_db = {f for f in countermodel.facts if f.symbol in db_names}
    second_db = {
        Fact(f.symbol[: -len(_PRIME)], f.args)
        for f in countermodel.facts
        if f.symbol.endswith(_PRIME) and f.symbol[: -len(_PRIME)] in db_names
    }
    schema = spec.combined_schema
    first = make_instance(schema, first_db | view_facts)
    second = make_instance(schema, second_db | view_facts)
    deps = spec.full_constraints.dependencies()
    if not satisfies_all(first, deps) or not satisfies_all(second, deps):
        return None
    if first.restrict({target}) == second.restrict({target}):
        return None
    return first, second


def _image_key(spec: ViewSpec, view: Instance) -> tuple:
    return tuple(f.sort_key() for f in view.sorted_facts)


def counterexample_search(
    spec: ViewSpec, target: str, domain_bound: int = DEFAULT_DOMAIN_BOUND
) -> tuple[Instance, Instance] | None:
    """Brute-force search for two consistent database states agreeing on all
    views but not on `target`, over domains of increasing size. Domains whose
    fact space is too large to enumerate are skipped."""
    for k in range(1, domain_bound + 1):
        space = all_facts(spec.db_schema, k)
        if len(space) > MAX_ENUMERATION_FACTS:
            break
        groups: dict[tuple, dict[frozenset, Instance]] = {}
        for mask in range(1 << len(space)):
            facts = frozenset(f for i, f in enumerate(space) if mask >> i & 1)
            db = make_instance(spec.db_schema, facts)
            if not spec.is_consistent(db):
                continue
            image = spec.view_image(db)
            key = _image_key(spec, image)
            bucket = groups.setdefault(key, {})
            restriction = db.restrict({target})
            for other_restriction, other_db in bucket.items():
                if other_restriction != restriction:
                    return (
                        disjoint_union(other_db, spec.view_image(other_db)),
                        disjoint_union(db, image),
                    )
            bucket.setdefault(restriction, db)
    return None


# ---------------------------------------------------------------------------
# Determinacy and invertibility


def determines(
    spec: ViewSpec,
    target: str,
    budget: int = DEFAULT_BUDGET,
    domain_bound: int = DEFAULT_DOMAIN_BOUND,
) -> DeterminacyVerdict:
    """Is the content of `target` fixed by the view symbols under the
    spec's constraints? Decided by a chase over the two-copy system; a
    negative answer always carries a verified counterexample pair."""
    if not spec.db_schema.has(target):
        raise ValueError(f"{target} is not a database symbol")
    deps, schema = two_copy_system(spec)
    goal = _transfer_goal(spec, target)
    verdict = implies(deps, goal, budget=budget, domain_bound=0, schema=schema)
    if verdict.status == VALID:
        witness = ChaseWitness(goal=goal, description="two-copy chase transfer")
        return DeterminacyVerdict(status=DETERMINED, certificate=witness)
    if verdict.status == INVALID and verdict.countermodel is not None:
        pair = _decode_counterexample(spec, verdict.countermodel, target)
        if pair is not None:
            return DeterminacyVerdict(status=NOT_DETERMINED, counterexample=pair)
    pair = counterexample_search(spec, target, domain_bound)
    if pair is not None:
        return DeterminacyVerdict(status=NOT_DETERMINED, counterexample=pair)
    return DeterminacyVerdict(
        status=UNKNOWN,
        reason="two-copy chase did not certify transfer and bounded search found no counterexample",
    )


def is_invertible(
    spec: ViewSpec,
    budget: int = DEFAULT_BUDGET,
    domain_bound: int = DEFAULT_DOMAIN_BOUND,
) -> InvertibilityReport:
    """A view mapping is invertible iff every database symbol is determined.
    Mirrors invertibility relative to each atomic query over the database
    schema."""
    verdicts = []
    for name in spec.db_schema.names():
        verdicts.append((name, determines(spec, name, budget=budget, domain_bound=domain_bound)))
    statuses = {v.status for _, v in verdicts}
    if statuses <= {DETERMINED}:
        status = "invertible"
    elif NOT_DETERMINED in statuses:
        status = "not-invertible"
    else:
        status = UNKNOWN
    return InvertibilityReport(
        invertible=status == "invertible", status=status, verdicts=tuple(verdicts)
    )


# ---------------------------------------------------------------------------
# Rewriting synthesis and verification


def _rewriting_equivalence_goals(spec: ViewSpec, rw: Rewriting) -> tuple[TGD, TGD]:
    head_atom = rw.query.head
    target_atom = Atom(rw.target, head_atom.args)
    completeness = TGD(body=(target_atom,), head=rw.query.body)
    soundness = TGD(body=rw.query.body, head=(target_atom,))
    return completeness, soundness


def verify_rewriting(
    spec: ViewSpec, rw: Rewriting, budget: int = DEFAULT_BUDGET
) -> bool:
    """True iff the rewriting is equivalent to its target symbol under the
    spec's constraints (both implications chase-certified)."""
    if not spec.db_schema.has(rw.target):
        raise ValueError(f"{rw.target} is not a database symbol")
    for atom in rw.query.body:
        if not spec.view_schema.has(atom.symbol):
            raise ValueError(f"rewriting body must mention only view symbols, got {atom.symbol}")
    deps = spec.full_constraints
    schema = spec.combined_schema
    completeness, soundness = _rewriting_equivalence_goals(spec, rw)
    for goal in (completeness, soundness):
        verdict = implies(deps, goal, budget=budget, domain_bound=0, schema=schema)
        if verdict.status != VALID:
            return False
    return True


def synthesize_rewriting(
    spec: ViewSpec,
    target: str,
    max_atoms: int = 4,
    budget: int = DEFAULT_BUDGET,
) -> Rewriting | None:
    """Chase-and-backchase style synthesis: chase a canonical instance of the
    target symbol, collect the view facts of the fixpoint, and return the
    smallest verified conjunctive query over those atoms (None when the
    bounded search is exhausted)."""
    if not spec.db_schema.has(target):
        raise ValueError(f"{target} is not a database symbol")
    arity = spec.db_schema.arity(target)
    head_nulls = tuple(Null(i + 1) for i in range(arity))
    start = make_instance(spec.combined_schema, {Fact(target, head_nulls)})
    result = chase(start, spec.full_constraints, budget=budget)
    if result.status != CHASE_SUCCESS:
        return None

    head_vars = tuple(Var(f"x{i + 1}") for i in range(arity))
    naming: dict = {}
    for null, var in zip(head_nulls, head_vars):
        image = result.resolve(null)
        if image in naming:
            return None  # constraints merge two head positions
        naming[image] = var
    fresh = itertools.count(1)
    view_names = set(spec.view_schema.names())
    atoms: list[Atom] = []
    for fact in result.instance.sorted_facts:
        if fact.symbol not in view_names:
            continue
        args = []
        for term in fact.args:
            if isinstance(term, Null):
                if term not in naming:
                    naming[term] = Var(f"y{next(fresh)}")
                args.append(naming[term])
            else:
                args.append(term)
        atom = Atom(fact.symbol, tuple(args))
        if atom not in atoms:
            atoms.append(atom)

    needed = set(head_vars)
    for size in range(1, min(max_atoms, len(atoms)) + 1):
        for combo in itertools.combinations(range(len(atoms)), size):
            body = tuple(atoms[i] for i in combo)
            if not needed <= set(atoms_variables(body)):
                continue
            candidate = Rewriting(target=target, query=CQ(head=Atom(target, head_vars), body=body))
            if verify_rewriting(spec, candidate, budget=budget):
                return candidate
    return None


def synthesize_all(
    spec: ViewSpec, max_atoms: int = 4, budget: int = DEFAULT_BUDGET
) -> dict[str, Rewriting | None]:
    return {
        name: synthesize_rewriting(spec, name, max_atoms=max_atoms, budget=budget)
        for name in spec.db_schema.names()
    }
