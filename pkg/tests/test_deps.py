"""Dependency classification, exactness rules, weak acyclicity."""

from __future__ import annotations

import random

import pytest

from viewlens import (
    CQ,
    Var,
    EGD,
    TGD,
    ViewSpec,
    chase,
    classify,
    constraint_set,
    database_schema,
    evaluate_cq,
    exact_view_rules,
    fd_egd,
    is_weakly_acyclic,
    make_instance,
    view_schema,
)
from viewlens.deps import position_graph
from helpers import atom, fact, inst, projection_pair_spec


def test_classify_full_tgd():
    dep = TGD(body=(atom("R", "x", "y"),), head=(atom("S", "x", "y"),))
    result = classify(dep)
    assert (result.kind, result.full) == ("tgd", True)
    assert not result.functional and not result.join


def test_classify_embedded_tgd():
    dep = TGD(body=(atom("R", "x", "y"),), head=(atom("S", "y", "z"),))
    result = classify(dep)
    assert (result.kind, result.full) == ("tgd", False)


def test_classify_fd_prefix_key():
    dep = EGD(body=(atom("R", "x", "y"), atom("R", "x", "z")), lhs=Var("y"), rhs=Var("z"))
    result = classify(dep)
    assert (result.kind, result.full, result.functional) == ("egd", True, True)


def test_classify_fd_non_prefix_determinant():
    # determinant in the middle position (2nd of 3) still counts as an fd
    dep = fd_egd("R", 3, determinants=(1,), dependent=2)
    assert classify(dep).functional


def test_classify_non_fd_egd():
    # three body atoms: not the two-atom fd shape
    dep = EGD(
        body=(atom("R", "x", "y"), atom("R", "x", "z"), atom("R", "z", "w")),
        lhs=Var("y"),
        rhs=Var("z"),
    )
    assert not classify(dep).functional


def test_classify_join_dependency():
    dep = TGD(
        body=(atom("R", "x", "y", "w1"), atom("R", "x", "w2", "z")),
        head=(atom("R", "x", "y", "z"),),
    )
    result = classify(dep)
    assert result.join and result.full


def test_classify_join_dependency_rejects_cross_sharing():
    dep = TGD(
        body=(atom("R", "x", "y", "w"), atom("R", "x", "w", "z")),
        head=(atom("R", "x", "y", "z"),),
    )
    assert not classify(dep).join


# ---------------------------------------------------------------------------
# Weak acyclicity


def test_weak_acyclicity_empty_set():
    assert is_weakly_acyclic(()).weakly_acyclic


def test_weak_acyclicity_full_tgd():
    dep = TGD(body=(atom("R", "x", "y"),), head=(atom("S", "x", "y"),))
    assert is_weakly_acyclic((dep,)).weakly_acyclic


def test_weak_acyclicity_special_self_loop():
    # Oracle first: build the expected position graph by hand. The lone rule
    # R(x) -> exists y R(y) has x only in the body, so the only edge is a
    # special edge from R#1 into the existential position R#1 itself.
    dep = TGD(body=(atom("R", "x"),), head=(atom("R", "y"),))
    graph = position_graph((dep,))
    assert graph.nodes == (("R", 0),)
    assert graph.regular_edges == ()
    assert graph.special_edges == ((("R", 0), ("R", 0)),)
    report = is_weakly_acyclic((dep,))
    assert not report.weakly_acyclic


def test_weak_acyclicity_two_rule_cycle():
    a = TGD(body=(atom("R", "x"),), head=(atom("S", "x", "y"),))  # exists y
    b = TGD(body=(atom("S", "x", "y"),), head=(atom("R", "y"),))
    assert not is_weakly_acyclic((a, b)).weakly_acyclic


def test_weak_acyclicity_chain_without_cycle():
    a = TGD(body=(atom("R", "x"),), head=(atom("S", "x", "y"),))
    b = TGD(body=(atom("S", "x", "y"),), head=(atom("T", "y"),))
    assert is_weakly_acyclic((a, b)).weakly_acyclic


def test_egds_do_not_affect_weak_acyclicity():
    dep = fd_egd("R", 2, determinants=(0,), dependent=1)
    assert is_weakly_acyclic((dep,)).weakly_acyclic


# ---------------------------------------------------------------------------
# Exact view rules


def test_exact_rules_copy_view():
    db = database_schema(("R", 1))
    views = view_schema(("V", 1))
    spec = ViewSpec(db, views, (CQ(head=atom("V", "x"), body=(atom("R", "x"),)),))
    rules = exact_view_rules(spec)
    assert rules == [
        TGD(body=(atom("R", "x"),), head=(atom("V", "x"),)),
        TGD(body=(atom("V", "x"),), head=(atom("R", "x"),)),
    ]


def test_exact_rules_projection_has_backward_existential():
    db = database_schema(("R", 3))
    views = view_schema(("V", 2))
    spec = ViewSpec(db, views, (CQ(head=atom("V", "x", "y"), body=(atom("R", "x", "y", "z"),)),))
    forward, backward = exact_view_rules(spec)
    assert forward.is_full()
    assert backward.existential_vars == (Var("z"),)


def test_exact_rules_join_view():
    db = database_schema(("R", 2), ("S", 2))
    views = view_schema(("V", 2))
    spec = ViewSpec(
        db, views,
        (CQ(head=atom("V", "x", "z"), body=(atom("R", "x", "y"), atom("S", "y", "z"))),),
    )
    forward, backward = exact_view_rules(spec)
    assert forward.is_full() and len(forward.body) == 2
    assert [v.name for v in backward.existential_vars] == ["y"]


def test_forward_rule_closure_matches_query_evaluation():
    """Chasing a database instance with the forward rules only must produce
    exactly the view image computed by query evaluation."""
    rng = random.Random(7)
    spec = projection_pair_spec(with_fd=False)
    consts = ["a", "b", "c"]
    for _ in range(25):
        facts = {
            fact("R", rng.choice(consts), rng.choice(consts), rng.choice(consts))
            for _ in range(rng.randint(0, 4))
        }
        db_inst = make_instance(spec.db_schema, facts)
        combined = make_instance(
            spec.combined_schema, facts
        )
        forward_only = [r for r in exact_view_rules(spec) if r.is_full()]
        result = chase(combined, tuple(forward_only))
        assert result.status == "success"
        view_part = result.instance.restrict(set(spec.view_schema.names()))
        assert view_part == spec.view_image(db_inst).facts


def test_full_dependencies_add_no_nulls():
    """classify(full) implies chasing with that dependency alone never
    introduces labeled nulls."""
    rng = random.Random(11)
    schema = database_schema(("R", 2), ("S", 2))
    full_dep = TGD(body=(atom("R", "x", "y"),), head=(atom("S", "y", "x"),))
    assert classify(full_dep).full
    consts = ["a", "b"]
    for _ in range(20):
        facts = {
            fact(rng.choice(["R", "S"]), rng.choice(consts), rng.choice(consts))
            for _ in range(rng.randint(0, 4))
        }
        result = chase(make_instance(schema, facts), (full_dep,))
        assert result.status == "success"
        assert result.instance.is_ground()
