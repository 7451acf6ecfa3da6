"""Grammar, diagnostics and source spans."""

from __future__ import annotations

import pytest

from viewlens import Const, EGD, TGD, Var, database_schema, view_schema
from viewlens.parser import ParseError, parse_dependency, parse_facts, parse_spec, parse_update
from helpers import atom, fact


def diag_of(exc_info, code=None):
    diags = exc_info.value.diagnostics
    if code is not None:
        diags = [d for d in diags if d.code == code]
    assert diags, f"expected a {code} diagnostic, got {exc_info.value.diagnostics}"
    return diags[0]


# ---------------------------------------------------------------------------
# Specs


def test_parse_copy_view_spec():
    spec = parse_spec("schema R/1. view V/1. def V(x) :- R(x).")
    assert spec.db_schema.names() == ("R",)
    assert spec.view_schema.names() == ("V",)
    assert spec.definitions[0].head == atom("V", "x")
    assert spec.definitions[0].body == (atom("R", "x"),)


def test_parse_unsafe_definition_reports_head_variable():
    text = "schema R/1. view V/1. def V(x) :- R(y)."
    with pytest.raises(ParseError) as exc_info:
        parse_spec(text)
    diag = diag_of(exc_info, "unsafe-rule")
    # the span points at the head variable token
    assert diag.span.line == 1
    assert diag.span.column == text.index("V(x)") + 3
    assert diag.span.length == 1


def test_parse_embedded_tgd():
    spec = parse_spec(
        "schema R/2. schema S/2. view V/2. def V(x, y) :- R(x, y).\n"
        "tgd R(x, y) -> exists z: S(y, z)."
    )
    (dep, provenance), = spec.constraints.entries
    assert provenance == "db"
    assert isinstance(dep, TGD)
    assert dep.existential_vars == (Var("z"),)


def test_parse_egd_and_provenance_prefix():
    spec = parse_spec(
        "schema R/2. view V/2. def V(x, y) :- R(x, y).\n"
        "@view egd V(x, y), V(x, z) -> y = z."
    )
    (dep, provenance), = spec.constraints.entries
    assert provenance == "view"
    assert isinstance(dep, EGD)


def test_parse_spec_constants_in_rules_are_quoted_or_numeric():
    spec = parse_spec(
        'schema R/2. view V/1. def V(x) :- R(x, "a").\n'
        "tgd R(x, 1b) -> R(x, x)."
    )
    assert spec.definitions[0].body[0].args[1] == Const("a")
    (dep, _), = spec.constraints.entries
    assert dep.body[0].args[1] == Const("1b")


def test_parse_spec_rejects_bare_uppercase_argument():
    with pytest.raises(ParseError) as exc_info:
        parse_spec("schema R/1. view V/1. def V(x) :- R(A).")
    diag = diag_of(exc_info, "syntax")
    assert "quote constants" in diag.message


def test_parse_unknown_symbol_diagnostic():
    text = "schema R/1. view V/1. def V(x) :- R(x). tgd S(x) -> R(x)."
    with pytest.raises(ParseError) as exc_info:
        parse_spec(text)
    diag = diag_of(exc_info, "unknown-symbol")
    assert diag.span.column == text.index("S(x)") + 1


def test_parse_arity_mismatch_diagnostic():
    with pytest.raises(ParseError) as exc_info:
        parse_spec("schema R/2. view V/1. def V(x) :- R(x).")
    assert diag_of(exc_info, "arity-mismatch").span.line == 1


def test_parse_duplicate_definition_diagnostic():
    with pytest.raises(ParseError) as exc_info:
        parse_spec("schema R/1. view V/1. def V(x) :- R(x). def V(y) :- R(y).")
    diag_of(exc_info, "duplicate-definition")


def test_parse_missing_definition_diagnostic():
    with pytest.raises(ParseError) as exc_info:
        parse_spec("schema R/1. view V/1. view W/1. def V(x) :- R(x).")
    diag = diag_of(exc_info, "missing-definition")
    assert "W" in diag.message


def test_parse_mixed_provenance_diagnostic():
    with pytest.raises(ParseError) as exc_info:
        parse_spec("schema R/1. view V/1. def V(x) :- R(x). tgd R(x) -> V(x).")
    diag_of(exc_info, "mixed-provenance")


def test_parse_recovers_and_reports_multiple_diagnostics():
    text = "schema R/1. view V/1.\ndef V(x) :- R(x, y).\ntgd R(x) -> Q(x).\n"
    with pytest.raises(ParseError) as exc_info:
        parse_spec(text)
    codes = {d.code for d in exc_info.value.diagnostics}
    assert "arity-mismatch" in codes  # from the definition body
    assert "unknown-symbol" in codes  # from the later constraint


def test_parse_comments_and_empty_body_tgd():
    spec = parse_spec(
        "# a nonempty requirement\nschema R/1. view V/1. def V(x) :- R(x).\n"
        "tgd -> exists x: R(x)."
    )
    (dep, _), = spec.constraints.entries
    assert dep.body == ()


def test_diagnostic_points_inside_offending_token_on_later_line():
    text = "schema R/1.\nview V/1.\ndef V(x) :- R(x).\ntgd R(x) -> Miss(x)."
    with pytest.raises(ParseError) as exc_info:
        parse_spec(text)
    diag = diag_of(exc_info, "unknown-symbol")
    assert diag.span.line == 4
    assert diag.span.length == len("R")  # span of the first body atom token


# ---------------------------------------------------------------------------
# Facts


DB = database_schema(("R", 2))


def test_parse_facts_bare_identifiers_are_constants():
    instance = parse_facts("R(a, b).\nR(B, 2x).", DB)
    assert instance.facts == {fact("R", "a", "b"), fact("R", "B", "2x")}


def test_parse_facts_arity_diagnostic():
    with pytest.raises(ParseError) as exc_info:
        parse_facts("R(a).", DB)
    diag = diag_of(exc_info, "arity-mismatch")
    assert (diag.span.line, diag.span.column) == (1, 1)


def test_parse_facts_unknown_symbol():
    with pytest.raises(ParseError) as exc_info:
        parse_facts("S(a, b).", DB)
    diag_of(exc_info, "unknown-symbol")


def test_parse_facts_quoted_strings():
    instance = parse_facts('R("hello world", "x").', DB)
    assert instance.facts == {fact("R", "hello world", "x")}


# ---------------------------------------------------------------------------
# Updates


VIEWS = view_schema(("V", 2))


def test_parse_update_two_step_transaction():
    program = parse_update("update { insert V(a, b); delete V(x, b) where V(x, b); }", VIEWS)
    assert len(program.steps) == 2
    first, second = program.steps
    assert first.kind == "insert"
    # bare lowercase identifiers in updates are variables
    assert first.pattern == atom("V", Var("a"), Var("b"))
    assert second.kind == "delete"
    assert second.condition.atoms == (atom("V", Var("x"), Var("b")),)


def test_parse_update_named_block_and_constants():
    program = parse_update('update load { insert V("a", "b"); }', VIEWS)
    assert program.name == "load"
    assert program.steps[0].pattern == atom("V", "a", "b")


def test_parse_update_replace_with_condition():
    program = parse_update(
        'update { replace V(x, y) with V(x, "q") where V(x, y), y != "q"; }', VIEWS
    )
    step = program.steps[0]
    assert step.kind == "replace"
    assert step.replacement.args[1] == Const("q")
    assert step.condition.inequalities == ((Var("y"), Const("q")),)


def test_parse_update_rejects_database_symbols():
    with pytest.raises(ParseError) as exc_info:
        parse_update("update { insert R(a, b); }", VIEWS)
    diag_of(exc_info, "unknown-symbol")


def test_parse_update_rejects_unsafe_replacement():
    with pytest.raises(ParseError) as exc_info:
        parse_update("update { replace V(x, y) with V(x, w); }", VIEWS)
    diag_of(exc_info, "unsafe-step")


def test_parse_update_requires_single_block():
    with pytest.raises(ParseError):
        parse_update("update { insert V(a, b); } update { insert V(a, b); }", VIEWS)
    with pytest.raises(ParseError) as exc_info:
        parse_update("", VIEWS)
    diag_of(exc_info, "empty-update")


# ---------------------------------------------------------------------------
# Goals


def test_parse_dependency_goal():
    schema = database_schema(("R", 2), ("S", 2))
    dep = parse_dependency("tgd R(x, y) -> S(y, x).", schema)
    assert isinstance(dep, TGD)
    dep = parse_dependency("egd R(x, y), R(x, z) -> y = z.", schema)
    assert isinstance(dep, EGD)


def test_parse_dependency_checks_schema():
    schema = database_schema(("R", 2))
    with pytest.raises(ParseError):
        parse_dependency("tgd R(x, y) -> S(y, x).", schema)
