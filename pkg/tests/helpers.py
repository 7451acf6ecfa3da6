"""Shared builders and independent brute-force oracles for the test suite.

The oracles here deliberately avoid the library's chase/implication code
paths: they enumerate instances directly and check dependencies by literal
quantification, so they can serve as an independent second route.
"""

from __future__ import annotations

import itertools

from viewlens import (
    Atom,
    CQ,
    Const,
    EGD,
    Fact,
    Instance,
    Schema,
    TGD,
    Var,
    ViewSpec,
    constraint_set,
    database_schema,
    evaluate_cq,
    fd_egd,
    make_instance,
    view_schema,
)


def c(name: str) -> Const:
    return Const(str(name))


def v(name: str) -> Var:
    return Var(name)


def fact(symbol: str, *args: str) -> Fact:
    return Fact(symbol, tuple(Const(str(a)) for a in args))


_VAR_INITIALS = "xyzuw"


def atom(symbol: str, *args) -> Atom:
    """Terms starting with x/y/z/u/w are variables, everything else is a
    constant (pass Const/Var explicitly to override)."""
    terms = []
    for a in args:
        if isinstance(a, (Const, Var)):
            terms.append(a)
        elif isinstance(a, str) and a[:1] in _VAR_INITIALS:
            terms.append(Var(a))
        else:
            terms.append(Const(str(a)))
    return Atom(symbol, tuple(terms))


def inst(schema: Schema, *facts: Fact) -> Instance:
    return make_instance(schema, facts)


# ---------------------------------------------------------------------------
# Ready-made specs


def copy_spec() -> ViewSpec:
    """One binary view that copies the database relation."""
    db = database_schema(("R", 2))
    views = view_schema(("V", 2))
    defs = (CQ(head=atom("V", "x", "y"), body=(atom("R", "x", "y"),)),)
    return ViewSpec(db, views, defs)


def copy_spec_unary() -> ViewSpec:
    db = database_schema(("R", 1))
    views = view_schema(("V", 1))
    defs = (CQ(head=atom("V", "x"), body=(atom("R", "x"),)),)
    return ViewSpec(db, views, defs)


def lossy_projection_spec() -> ViewSpec:
    """A single projection view over a binary relation, no constraints."""
    db = database_schema(("R", 2))
    views = view_schema(("V", 1))
    defs = (CQ(head=atom("V", "x"), body=(atom("R", "x", "y"),)),)
    return ViewSpec(db, views, defs)


def projection_pair_spec(with_fd: bool = True) -> ViewSpec:
    """Two overlapping projections of a ternary relation; with the functional
    dependency on positions 2 -> 3 the pair is invertible via the join."""
    db = database_schema(("R", 3))
    views = view_schema(("VA", 2), ("VB", 2))
    defs = (
        CQ(head=atom("VA", "x", "y"), body=(atom("R", "x", "y", "z"),)),
        CQ(head=atom("VB", "y", "z"), body=(atom("R", "x", "y", "z"),)),
    )
    constraints = constraint_set(db=[fd_egd("R", 3, determinants=(1,), dependent=2)]) if with_fd else constraint_set()
    return ViewSpec(db, views, defs, constraints)


def fd_view_copy_spec() -> ViewSpec:
    """Copy view with a functional dependency declared on the view symbol."""
    db = database_schema(("R", 2))
    views = view_schema(("V", 2))
    defs = (CQ(head=atom("V", "x", "y"), body=(atom("R", "x", "y"),)),)
    return ViewSpec(db, views, defs, constraint_set(view=[fd_egd("V", 2, determinants=(0,), dependent=1)]))


# ---------------------------------------------------------------------------
# Brute-force satisfaction (independent of the library's matcher)


def _all_assignments(variables, universe):
    names = list(variables)
    for values in itertools.product(universe, repeat=len(names)):
        yield dict(zip(names, values))


def _atom_holds(a: Atom, assignment, facts) -> bool:
    args = tuple(assignment.get(t, t) if isinstance(t, Var) else t for t in a.args)
    return Fact(a.symbol, args) in facts


def brute_satisfies(instance: Instance, dep) -> bool:
    """Literal quantifier semantics over the instance's own terms."""
    universe = sorted({t for f in instance.facts for t in f.args}, key=str)
    if not universe:
        universe = [Const("c1")]
    facts = instance.facts
    body_vars = sorted({vv for a in dep.body for vv in a.variables()}, key=lambda x: x.name)
    for assignment in _all_assignments(body_vars, universe):
        if not all(_atom_holds(a, assignment, facts) for a in dep.body):
            continue
        if isinstance(dep, EGD):
            if assignment[dep.lhs] != assignment[dep.rhs]:
                return False
        else:
            head_only = sorted(
                {vv for a in dep.head for vv in a.variables()} - set(body_vars),
                key=lambda x: x.name,
            )
            witnessed = False
            for extension in _all_assignments(head_only, universe):
                merged = {**assignment, **extension}
                if all(_atom_holds(a, merged, facts) for a in dep.head):
                    witnessed = True
                    break
            if not witnessed:
                return False
    return True


def brute_satisfies_all(instance: Instance, deps) -> bool:
    return all(brute_satisfies(instance, d) for d in deps)


def all_instances(schema: Schema, k: int):
    """Every instance over constants c1..ck (no satisfaction filter)."""
    consts = [Const(f"c{i + 1}") for i in range(k)]
    space = []
    for decl in schema.symbols:
        for args in itertools.product(consts, repeat=decl.arity):
            space.append(Fact(decl.name, args))
    for mask in range(1 << len(space)):
        yield make_instance(schema, frozenset(f for i, f in enumerate(space) if mask >> i & 1))


def brute_models(deps, schema: Schema, k: int):
    for candidate in all_instances(schema, k):
        if brute_satisfies_all(candidate, deps):
            yield candidate


def brute_countermodels(deps, goal, schema: Schema, k: int):
    for model in brute_models(deps, schema, k):
        if not brute_satisfies(model, goal):
            yield model


# ---------------------------------------------------------------------------
# Brute-force determinacy and preimages


def consistent_db_instances(spec: ViewSpec, k: int):
    from viewlens import satisfies_all

    for candidate in all_instances(spec.db_schema, k):
        if not satisfies_all(candidate, spec.db_constraints()):
            continue
        if not satisfies_all(spec.view_image(candidate), spec.view_constraints()):
            continue
        yield candidate


def brute_force_determinacy(spec: ViewSpec, target: str, k: int):
    """('not-determined', pair) when two consistent states share a view image
    but differ on the target; ('no-counterexample', None) after exhausting
    domain size k."""
    groups: dict[tuple, list[Instance]] = {}
    for db in consistent_db_instances(spec, k):
        image = spec.view_image(db)
        key = tuple(sorted(str(f) for f in image.facts))
        for other in groups.get(key, []):
            if other.restrict({target}) != db.restrict({target}):
                return "not-determined", (other, db)
        groups.setdefault(key, []).append(db)
    return "no-counterexample", None


def preimages_within(spec: ViewSpec, view_state: Instance, domain) -> list[Instance]:
    """All consistent database states over the given constants whose view
    image is exactly `view_state`. Candidate facts are pre-filtered by the
    monotonicity of conjunctive queries: a fact whose singleton image leaks
    outside the target state can never participate."""
    from viewlens import satisfies_all

    candidates = []
    for decl in spec.db_schema.symbols:
        for args in itertools.product(sorted(domain, key=str), repeat=decl.arity):
            f = Fact(decl.name, args)
            single = make_instance(spec.db_schema, {f})
            if spec.view_image(single).facts <= view_state.facts:
                candidates.append(f)
    found = []
    for mask in range(1 << len(candidates)):
        facts = frozenset(f for i, f in enumerate(candidates) if mask >> i & 1)
        db = make_instance(spec.db_schema, facts)
        if spec.view_image(db) != view_state:
            continue
        if not satisfies_all(db, spec.db_constraints()):
            continue
        found.append(db)
    return found
