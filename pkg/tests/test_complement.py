"""View complements and the constant-complement discipline."""

from __future__ import annotations

import pytest

from viewlens import (
    CQ,
    ComplementPreconditionError,
    Condition,
    PreconditionError,
    SchemaCollisionError,
    TranslationUnavailableError,
    UpdateProgram,
    UpdateStep,
    ViewSpec,
    combine_specs,
    constraint_set,
    database_schema,
    fd_egd,
    is_complement,
    make_instance,
    respects_constant_complement,
    view_schema,
)
from helpers import atom, consistent_db_instances, fact


def _projection(name: str, positions: tuple[int, int], with_fd: bool) -> ViewSpec:
    db = database_schema(("R", 3))
    views = view_schema((name, 2))
    variables = ("x", "y", "z")
    head = atom(name, variables[positions[0]], variables[positions[1]])
    defs = (CQ(head=head, body=(atom("R", "x", "y", "z"),)),)
    constraints = (
        constraint_set(db=[fd_egd("R", 3, determinants=(1,), dependent=2)])
        if with_fd
        else constraint_set()
    )
    return ViewSpec(db, views, defs, constraints)


def left_view(with_fd=True):
    return _projection("VA", (0, 1), with_fd)


def right_view(with_fd=True):
    return _projection("VB", (1, 2), with_fd)


def copy_view():
    db = database_schema(("R", 2))
    views = view_schema(("V", 2))
    return ViewSpec(db, views, (CQ(head=atom("V", "x", "y"), body=(atom("R", "x", "y"),)),))


def empty_view(db_schema):
    return ViewSpec(db_schema, view_schema(), ())


def test_projection_pair_is_complement():
    check = is_complement(left_view(), right_view())
    assert check.status == "yes"


def test_empty_view_complements_copy():
    spec = copy_view()
    check = is_complement(spec, empty_view(spec.db_schema))
    assert check.status == "yes"


def test_duplicate_projection_is_not_a_complement():
    left = _projection("VA", (0, 1), with_fd=False)
    twin = _projection("VC", (0, 1), with_fd=False)
    check = is_complement(left, twin, budget=300)
    assert check.status == "no"


def test_combine_rejects_shared_view_names():
    with pytest.raises(SchemaCollisionError):
        combine_specs(left_view(), left_view())


def test_combine_rejects_different_db_constraints():
    with pytest.raises(PreconditionError):
        combine_specs(left_view(with_fd=True), right_view(with_fd=False))


def test_constant_complement_reusing_insertion():
    first, second = left_view(), right_view()
    state = make_instance(first.db_schema, {fact("R", "a", "b", "c")})
    prog = UpdateProgram(steps=(UpdateStep(kind="insert", pattern=atom("VA", "d", "b")),))
    assert respects_constant_complement(first, second, prog, state) is True


def test_constant_complement_fresh_insertion_is_not_translatable():
    # the fresh second component forces a new witness row; the combined view
    # has no preimage for it, so the definite outcome is not-translatable
    first, second = left_view(), right_view()
    state = make_instance(first.db_schema, {fact("R", "a", "b", "c")})
    prog = UpdateProgram(steps=(UpdateStep(kind="insert", pattern=atom("VA", "d", "e")),))
    with pytest.raises(TranslationUnavailableError):
        respects_constant_complement(first, second, prog, state)


def test_constant_complement_empty_complement_is_always_constant():
    spec = copy_view()
    state = make_instance(spec.db_schema, {fact("R", "a", "b")})
    prog = UpdateProgram(steps=(UpdateStep(kind="insert", pattern=atom("V", "c", "d")),))
    assert respects_constant_complement(spec, empty_view(spec.db_schema), prog, state) is True


def test_constant_complement_requires_certified_pair():
    left = _projection("VA", (0, 1), with_fd=False)
    twin = _projection("VC", (0, 1), with_fd=False)
    state = make_instance(left.db_schema)
    prog = UpdateProgram(steps=(UpdateStep(kind="insert", pattern=atom("VA", "a", "b")),))
    with pytest.raises(ComplementPreconditionError):
        respects_constant_complement(left, twin, prog, state, budget=300)


def test_complement_verified_by_before_after_evaluation():
    """Direct oracle for the reusing insertion: evaluate the complement's
    image before and after applying the translation."""
    first, second = left_view(), right_view()
    from viewlens import translatable_at

    combined = combine_specs(first, second)
    state = make_instance(first.db_schema, {fact("R", "a", "b", "c")})
    prog = UpdateProgram(steps=(UpdateStep(kind="insert", pattern=atom("VA", "d", "b")),))
    verdict = translatable_at(combined, prog, state)
    assert verdict.status == "translatable"
    after = verdict.translation.apply_to(state)
    assert second.view_image(after) == second.view_image(state)


def test_losslessness_of_certified_complement_pair():
    """is_complement = yes implies pairwise injectivity of the combined
    mapping on consistent states (checked exhaustively over two constants)."""
    first, second = left_view(), right_view()
    combined = combine_specs(first, second)
    seen = {}
    for db in consistent_db_instances(combined, k=2):
        key = tuple(sorted(str(f) for f in combined.view_image(db).facts))
        assert key not in seen or seen[key] == db.facts, "two states share a combined image"
        seen[key] = db.facts


def test_complement_invariant_under_renaming():
    first = left_view()
    renamed = _projection("VR", (1, 2), with_fd=True)
    state = make_instance(first.db_schema, {fact("R", "a", "b", "c")})
    prog = UpdateProgram(steps=(UpdateStep(kind="insert", pattern=atom("VA", "d", "b")),))
    assert respects_constant_complement(first, right_view(), prog, state) == \
        respects_constant_complement(first, renamed, prog, state)
