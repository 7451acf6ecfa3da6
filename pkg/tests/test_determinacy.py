"""Determinacy, invertibility, rewriting synthesis and verification."""

from __future__ import annotations

import itertools

import pytest

from viewlens import (
    Atom,
    CQ,
    Const,
    Fact,
    Rewriting,
    Var,
    determines,
    evaluate_cq,
    is_invertible,
    make_instance,
    satisfies_all,
    synthesize_rewriting,
    verify_rewriting,
)
from helpers import (
    atom,
    brute_force_determinacy,
    consistent_db_instances,
    copy_spec,
    fact,
    lossy_projection_spec,
    projection_pair_spec,
)


def _verify_counterexample(spec, pair, target):
    first, second = pair
    deps = spec.full_constraints.dependencies()
    assert satisfies_all(first, deps)
    assert satisfies_all(second, deps)
    views = set(spec.view_schema.names())
    assert first.restrict(views) == second.restrict(views)
    assert first.restrict({target}) != second.restrict({target})


def test_copy_view_is_determined():
    spec = copy_spec()
    verdict = determines(spec, "R")
    assert verdict.status == "determined"
    assert verdict.certificate is not None


def test_lossy_projection_not_determined_with_verified_pair():
    # Oracle first: brute force over two constants already exhibits two
    # states sharing the view image but differing on R.
    spec = lossy_projection_spec()
    status, pair = brute_force_determinacy(spec, "R", k=2)
    assert status == "not-determined"
    verdict = determines(spec, "R", budget=300)
    assert verdict.status == "not-determined"
    _verify_counterexample(spec, verdict.counterexample, "R")


def test_projection_pair_with_fd_determined():
    spec = projection_pair_spec(with_fd=True)
    verdict = determines(spec, "R")
    assert verdict.status == "determined"


def test_projection_pair_with_fd_brute_force_domain_three():
    """Exhaustive oracle at domain size 3: every instance satisfying the
    functional dependency is a subset of the graph of a choice function on
    the middle position, so enumerating those graphs covers all of them."""
    spec = projection_pair_spec(with_fd=True)
    consts = [Const(f"c{i}") for i in (1, 2, 3)]
    seen: set[frozenset] = set()
    groups: dict[tuple, set[frozenset]] = {}
    for choice in itertools.product(consts, repeat=3):  # middle value -> third value
        graph = [
            Fact("R", (a, b, choice[j]))
            for a in consts
            for j, b in enumerate(consts)
        ]
        for mask in range(1 << len(graph)):
            facts = frozenset(f for i, f in enumerate(graph) if mask >> i & 1)
            if facts in seen:
                continue
            seen.add(facts)
            db = make_instance(spec.db_schema, facts)
            image = spec.view_image(db)
            key = tuple(sorted(str(f) for f in image.facts))
            groups.setdefault(key, set()).add(facts)
    # determinacy at domain 3: every view image has exactly one preimage
    assert all(len(bucket) == 1 for bucket in groups.values())


def test_projection_pair_without_fd_not_determined():
    spec = projection_pair_spec(with_fd=False)
    status, pair = brute_force_determinacy(spec, "R", k=2)
    assert status == "not-determined"
    verdict = determines(spec, "R", budget=300)
    assert verdict.status == "not-determined"
    _verify_counterexample(spec, verdict.counterexample, "R")


def test_is_invertible_identity_views():
    assert is_invertible(copy_spec()).invertible


def test_is_invertible_false_for_lossy_projection():
    report = is_invertible(lossy_projection_spec(), budget=300)
    assert not report.invertible
    assert report.status == "not-invertible"


def test_is_invertible_projection_pair():
    assert is_invertible(projection_pair_spec(with_fd=True)).invertible
    report = is_invertible(projection_pair_spec(with_fd=False), budget=300)
    assert report.status == "not-invertible"


# ---------------------------------------------------------------------------
# Rewriting synthesis


def test_synthesize_copy_view():
    spec = copy_spec()
    rw = synthesize_rewriting(spec, "R")
    assert rw is not None
    assert rw.query.body == (Atom("V", (Var("x1"), Var("x2"))),)


def test_synthesize_projection_pair_join():
    spec = projection_pair_spec(with_fd=True)
    rw = synthesize_rewriting(spec, "R")
    assert rw is not None
    assert rw.query.head == Atom("R", (Var("x1"), Var("x2"), Var("x3")))
    assert set(rw.query.body) == {
        Atom("VA", (Var("x1"), Var("x2"))),
        Atom("VB", (Var("x2"), Var("x3"))),
    }


def test_synthesize_returns_none_for_lossy_projection():
    assert synthesize_rewriting(lossy_projection_spec(), "R", budget=300) is None


def test_verify_rewriting_copy_view():
    spec = copy_spec()
    rw = Rewriting(
        target="R",
        query=CQ(head=atom("R", "x", "y"), body=(atom("V", "x", "y"),)),
    )
    assert verify_rewriting(spec, rw)


def test_verify_rewriting_join_requires_fd():
    join = CQ(
        head=atom("R", "x", "y", "z"),
        body=(atom("VA", "x", "y"), atom("VB", "y", "z")),
    )
    rw = Rewriting(target="R", query=join)
    assert verify_rewriting(projection_pair_spec(with_fd=True), rw)
    assert not verify_rewriting(projection_pair_spec(with_fd=False), rw, budget=300)


def test_join_rewriting_fails_on_concrete_instance_without_fd():
    # Oracle: a two-constant instance on which the join over-produces.
    spec = projection_pair_spec(with_fd=False)
    db = make_instance(
        spec.db_schema,
        {fact("R", "a", "a", "b"), fact("R", "b", "a", "a")},
    )
    image = spec.view_image(db)
    join = CQ(
        head=atom("R", "x", "y", "z"),
        body=(atom("VA", "x", "y"), atom("VB", "y", "z")),
    )
    reconstructed = {Fact("R", args) for args in evaluate_cq(join, image)}
    assert reconstructed != db.facts
    assert reconstructed > db.facts  # the join strictly over-approximates


def test_rewriting_reconstructs_on_consistent_instances():
    """Soundness on instances: evaluating the synthesized rewriting on the
    view image reproduces the target relation, for every consistent state
    over two constants."""
    spec = projection_pair_spec(with_fd=True)
    rw = synthesize_rewriting(spec, "R")
    for db in consistent_db_instances(spec, k=2):
        image = spec.view_image(db)
        reconstructed = {Fact("R", args) for args in evaluate_cq(rw.query, image)}
        assert reconstructed == db.restrict({"R"})


def test_determines_rejects_unknown_symbol():
    with pytest.raises(ValueError):
        determines(copy_spec(), "NOPE")
