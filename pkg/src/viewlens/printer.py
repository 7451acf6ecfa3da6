"""Canonical printers for every parsed value.

Printing normalizes first: facts are sorted, variables are renamed to
x1, x2, ... in order of first occurrence, and spec statements appear in a
fixed order. parse(print(x)) therefore returns the normalized form of x, and
printing is idempotent.
"""

from __future__ import annotations

import re

from .deps import ConstraintSet, DB_CONSTRAINT, EGD, TGD, VIEW_CONSTRAINT, ViewSpec
from .model import (
    Atom,
    CQ,
    Const,
    Fact,
    Instance,
    Null,
    Term,
    Var,
    atoms_variables,
)
from .updates import Condition, REPLACE, UpdateProgram, UpdateStep

_BARE_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_BARE_NUMBER = re.compile(r"[0-9][A-Za-z0-9_]*\Z")


# ---------------------------------------------------------------------------
# Terms and atoms


def print_term(term: Term, facts_context: bool = False) -> str:
    """Render a term. In fact files bare identifiers already read as
    constants, so identifier-shaped constants print bare there; inside rules
    they must be quoted to avoid reading back as variables."""
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Null):
        return f"?{term.index}"
    if _BARE_NUMBER.match(term.name):
        return term.name
    if facts_context and _BARE_IDENT.match(term.name):
        return term.name
    return '"' + term.name + '"'


def print_atom(atom: Atom, facts_context: bool = False) -> str:
    return f"{atom.symbol}({', '.join(print_term(t, facts_context) for t in atom.args)})"


def print_fact(fact: Fact) -> str:
    return print_atom(Atom(fact.symbol, fact.args), facts_context=True)


# ---------------------------------------------------------------------------
# Variable normalization


class _Renamer:
    def __init__(self) -> None:
        self.mapping: dict[Var, Var] = {}

    def rename(self, term: Term) -> Term:
        if not isinstance(term, Var):
            return term
        if term not in self.mapping:
            self.mapping[term] = Var(f"x{len(self.mapping) + 1}")
        return self.mapping[term]

    def rename_atom(self, atom: Atom) -> Atom:
        return Atom(atom.symbol, tuple(self.rename(t) for t in atom.args))


def normalize_cq(cq: CQ) -> CQ:
    renamer = _Renamer()
    head = renamer.rename_atom(cq.head)
    return CQ(head=head, body=tuple(renamer.rename_atom(a) for a in cq.body))


def normalize_dependency(dep: TGD | EGD) -> TGD | EGD:
    renamer = _Renamer()
    body = tuple(renamer.rename_atom(a) for a in dep.body)
    if isinstance(dep, EGD):
        return EGD(body=body, lhs=renamer.rename(dep.lhs), rhs=renamer.rename(dep.rhs))
    return TGD(body=body, head=tuple(renamer.rename_atom(a) for a in dep.head))


def normalize_spec(spec: ViewSpec) -> ViewSpec:
    entries = tuple(
        sorted(
            ((normalize_dependency(dep), prov) for dep, prov in spec.constraints),
            key=lambda e: (e[1], print_dependency(e[0], normalize=False)),
        )
    )
    return ViewSpec(
        db_schema=spec.db_schema,
        view_schema=spec.view_schema,
        definitions=tuple(normalize_cq(cq) for cq in spec.definitions),
        constraints=ConstraintSet(entries),
    )


def normalize_step(step: UpdateStep) -> UpdateStep:
    renamer = _Renamer()
    pattern = renamer.rename_atom(step.pattern)
    replacement = renamer.rename_atom(step.replacement) if step.replacement else None
    condition = Condition(
        atoms=tuple(renamer.rename_atom(a) for a in step.condition.atoms),
        equalities=tuple(
            (renamer.rename(s), renamer.rename(t)) for s, t in step.condition.equalities
        ),
        inequalities=tuple(
            (renamer.rename(s), renamer.rename(t)) for s, t in step.condition.inequalities
        ),
    )
    return UpdateStep(kind=step.kind, pattern=pattern, replacement=replacement, condition=condition)


def normalize_update(program: UpdateProgram) -> UpdateProgram:
    return UpdateProgram(steps=tuple(normalize_step(s) for s in program.steps), name=program.name)


# ---------------------------------------------------------------------------
# Statements


def print_cq(cq: CQ, normalize: bool = True) -> str:
    if normalize:
        cq = normalize_cq(cq)
    body = ", ".join(print_atom(a) for a in cq.body)
    return f"def {print_atom(cq.head)} :- {body}."


def print_dependency(dep: TGD | EGD, provenance: str | None = None, normalize: bool = True) -> str:
    if normalize:
        dep = normalize_dependency(dep)
    prefix = ""
    if provenance == DB_CONSTRAINT:
        prefix = "@db "
    elif provenance == VIEW_CONSTRAINT:
        prefix = "@view "
    body = ", ".join(print_atom(a) for a in dep.body)
    if isinstance(dep, EGD):
        return f"{prefix}egd {body} -> {dep.lhs.name} = {dep.rhs.name}."
    head = ", ".join(print_atom(a) for a in dep.head)
    existentials = dep.existential_vars
    if existentials:
        names = ", ".join(v.name for v in existentials)
        return f"{prefix}tgd {body} -> exists {names}: {head}."
    return f"{prefix}tgd {body} -> {head}."


def print_instance(instance: Instance) -> str:
    """One fact statement per line, sorted canonically."""
    return "\n".join(f"{print_fact(f)}." for f in instance.sorted_facts) + ("\n" if instance.facts else "")


def print_spec(spec: ViewSpec) -> str:
    spec = normalize_spec(spec)
    lines: list[str] = []
    for decl in spec.db_schema.symbols:
        lines.append(f"schema {decl.name}/{decl.arity}.")
    for decl in spec.view_schema.symbols:
        lines.append(f"view {decl.name}/{decl.arity}.")
    for cq in spec.definitions:
        lines.append(print_cq(cq, normalize=False))
    for dep, prov in spec.constraints:
        lines.append(print_dependency(dep, provenance=None, normalize=False))
    return "\n".join(lines) + "\n"


def print_condition(cond: Condition) -> str:
    parts = [print_atom(a) for a in cond.atoms]
    parts += [f"{print_term(s)} = {print_term(t)}" for s, t in cond.equalities]
    parts += [f"{print_term(s)} != {print_term(t)}" for s, t in cond.inequalities]
    return ", ".join(parts)


def print_step(step: UpdateStep, normalize: bool = True) -> str:
    if normalize:
        step = normalize_step(step)
    out = f"{step.kind} {print_atom(step.pattern)}"
    if step.kind == REPLACE:
        out += f" with {print_atom(step.replacement)}"
    if not step.condition.is_trivial():
        out += f" where {print_condition(step.condition)}"
    return out


def print_update(program: UpdateProgram) -> str:
    program = normalize_update(program)
    name = f"{program.name} " if program.name else ""
    steps = " ".join(f"{print_step(s, normalize=False)};" for s in program.steps)
    return f"update {name}{{ {steps} }}\n"
