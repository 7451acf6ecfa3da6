"""Relational vocabulary and matching primitives.

Schemas, terms, facts and instances, plus the two workhorses everything else
is built on: homomorphism search between instances and conjunctive-query
evaluation. All values are immutable and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Mapping

from .errors import SchemaCollisionError


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Const:
    """An opaque constant. No attribute types, no arithmetic."""

    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Null:
    """A labeled null. Nulls exist only as chase artifacts and never appear
    in user-supplied fact files."""

    index: int

    def __str__(self) -> str:
        return f"?{self.index}"


@dataclass(frozen=True)
class Var:
    """A variable. Appears only in rules, queries and updates, never in
    stored instances."""

    name: str

    def __str__(self) -> str:
        return self.name


Term = Const | Null | Var


def term_key(term: Term) -> tuple:
    """Total order on terms: constants < nulls < variables."""
    if isinstance(term, Const):
        return (0, term.name)
    if isinstance(term, Null):
        return (1, term.index)
    return (2, term.name)


# ---------------------------------------------------------------------------
# Schemas


DATABASE = "database"
VIEW = "view"


@dataclass(frozen=True)
class SymbolDecl:
    name: str
    arity: int
    kind: str  # DATABASE or VIEW

    def __post_init__(self) -> None:
        if self.arity < 0:
            raise ValueError(f"negative arity for {self.name}")
        if self.kind not in (DATABASE, VIEW):
            raise ValueError(f"unknown symbol kind {self.kind!r}")


@dataclass(frozen=True)
class Schema:
    """A set of relation symbols. A schema may mix database and view symbols;
    symbol names are unique across kinds."""

    symbols: tuple[SymbolDecl, ...]

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.symbols, key=lambda d: d.name))
        names = [d.name for d in ordered]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise SchemaCollisionError(f"duplicate symbol names: {', '.join(dupes)}")
        object.__setattr__(self, "symbols", ordered)

    @cached_property
    def _by_name(self) -> dict[str, SymbolDecl]:
        return {d.name: d for d in self.symbols}

    def has(self, name: str) -> bool:
        return name in self._by_name

    def decl(self, name: str) -> SymbolDecl:
        return self._by_name[name]

    def arity(self, name: str) -> int:
        return self._by_name[name].arity

    def kind(self, name: str) -> str:
        return self._by_name[name].kind

    def names(self, kind: str | None = None) -> tuple[str, ...]:
        return tuple(d.name for d in self.symbols if kind is None or d.kind == kind)

    def union(self, other: Schema) -> Schema:
        overlap = set(self._by_name) & set(other._by_name)
        if overlap:
            raise SchemaCollisionError(
                f"schemas share symbol names: {', '.join(sorted(overlap))}"
            )
        return Schema(self.symbols + other.symbols)


def database_schema(*decls: tuple[str, int]) -> Schema:
    return Schema(tuple(SymbolDecl(n, a, DATABASE) for n, a in decls))


def view_schema(*decls: tuple[str, int]) -> Schema:
    return Schema(tuple(SymbolDecl(n, a, VIEW) for n, a in decls))


# ---------------------------------------------------------------------------
# Facts, atoms, instances


@dataclass(frozen=True)
class Fact:
    """A ground atomic fact; arguments are constants or labeled nulls."""

    symbol: str
    args: tuple[Term, ...]

    def __post_init__(self) -> None:
        for a in self.args:
            if isinstance(a, Var):
                raise ValueError(f"variable {a} inside a fact of {self.symbol}")

    def sort_key(self) -> tuple:
        return (self.symbol, tuple(term_key(a) for a in self.args))

    def __str__(self) -> str:
        return f"{self.symbol}({', '.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Atom:
    """An atom in a rule or query body; arguments may be variables."""

    symbol: str
    args: tuple[Term, ...]

    def variables(self) -> tuple[Var, ...]:
        seen: dict[Var, None] = {}
        for a in self.args:
            if isinstance(a, Var):
                seen.setdefault(a)
        return tuple(seen)

    def substitute(self, binding: Mapping[Var, Term]) -> Atom:
        return Atom(self.symbol, tuple(binding.get(a, a) if isinstance(a, Var) else a for a in self.args))

    def to_fact(self) -> Fact:
        return Fact(self.symbol, self.args)

    def sort_key(self) -> tuple:
        return (self.symbol, tuple(term_key(a) for a in self.args))

    def __str__(self) -> str:
        return f"{self.symbol}({', '.join(str(a) for a in self.args)})"


def atoms_variables(atoms: tuple[Atom, ...]) -> tuple[Var, ...]:
    seen: dict[Var, None] = {}
    for atom in atoms:
        for v in atom.variables():
            seen.setdefault(v)
    return tuple(seen)


@dataclass(frozen=True)
class CQ:
    """A conjunctive query. The head symbol names the query; safety requires
    every head variable to occur in the body."""

    head: Atom
    body: tuple[Atom, ...]

    def is_safe(self) -> bool:
        body_vars = set(atoms_variables(self.body))
        return all(v in body_vars for v in self.head.variables())

    def variables(self) -> tuple[Var, ...]:
        seen: dict[Var, None] = {}
        for v in self.head.variables():
            seen.setdefault(v)
        for v in atoms_variables(self.body):
            seen.setdefault(v)
        return tuple(seen)


@dataclass(frozen=True)
class Instance:
    """A finite set of facts over a schema. Set semantics throughout."""

    schema: Schema
    facts: frozenset[Fact]

    def __post_init__(self) -> None:
        for f in self.facts:
            if not self.schema.has(f.symbol):
                raise ValueError(f"fact {f} uses a symbol outside the schema")
            if len(f.args) != self.schema.arity(f.symbol):
                raise ValueError(
                    f"fact {f} has arity {len(f.args)}, expected {self.schema.arity(f.symbol)}"
                )

    @cached_property
    def sorted_facts(self) -> tuple[Fact, ...]:
        return tuple(sorted(self.facts, key=Fact.sort_key))

    @cached_property
    def by_symbol(self) -> dict[str, tuple[Fact, ...]]:
        grouped: dict[str, list[Fact]] = {}
        for f in self.sorted_facts:
            grouped.setdefault(f.symbol, []).append(f)
        return {s: tuple(fs) for s, fs in grouped.items()}

    def restrict(self, symbols: set[str] | tuple[str, ...]) -> frozenset[Fact]:
        wanted = set(symbols)
        return frozenset(f for f in self.facts if f.symbol in wanted)

    def is_ground(self) -> bool:
        return all(isinstance(a, Const) for f in self.facts for a in f.args)

    def constants(self) -> frozenset[Const]:
        return frozenset(a for f in self.facts for a in f.args if isinstance(a, Const))

    def max_null_index(self) -> int:
        return max((a.index for f in self.facts for a in f.args if isinstance(a, Null)), default=0)

    def with_facts(self, facts) -> Instance:
        return Instance(self.schema, frozenset(facts))

    def __str__(self) -> str:
        return "{" + ", ".join(str(f) for f in self.sorted_facts) + "}"


def make_instance(schema: Schema, facts=()) -> Instance:
    return Instance(schema, frozenset(facts))


def disjoint_union(left: Instance, right: Instance) -> Instance:
    """Combine two instances over symbol-disjoint schemas into one instance
    over the union schema. Overlapping symbol names raise
    SchemaCollisionError."""
    schema = left.schema.union(right.schema)
    return Instance(schema, left.facts | right.facts)


# ---------------------------------------------------------------------------
# Deltas


@dataclass(frozen=True)
class GroundDelta:
    """A ground update on an instance: facts to insert and facts to delete."""

    insertions: frozenset[Fact]
    deletions: frozenset[Fact]

    def __post_init__(self) -> None:
        if self.insertions & self.deletions:
            raise ValueError("a delta may not insert and delete the same fact")

    def is_empty(self) -> bool:
        return not self.insertions and not self.deletions

    def apply_to(self, instance: Instance) -> Instance:
        return instance.with_facts((instance.facts - self.deletions) | self.insertions)


def diff(before: Instance, after: Instance) -> GroundDelta:
    """The delta turning `before` into `after` (same schema)."""
    if before.schema != after.schema:
        raise ValueError("diff requires two instances over the same schema")
    return GroundDelta(insertions=after.facts - before.facts, deletions=before.facts - after.facts)


# ---------------------------------------------------------------------------
# Matching


def _match_args(pattern: tuple[Term, ...], args: tuple[Term, ...], binding: dict[Var, Term]) -> dict[Var, Term] | None:
    """Extend `binding` so the pattern's terms match `args`; constants and
    nulls in the pattern are rigid."""
    out = binding
    for p, a in zip(pattern, args):
        if isinstance(p, Var):
            bound = out.get(p)
            if bound is None:
                if out is binding:
                    out = dict(binding)
                out[p] = a
            elif bound != a:
                return None
        elif p != a:
            return None
    return out


def match_atoms(atoms, instance: Instance, binding: Mapping[Var, Term] | None = None) -> Iterator[dict[Var, Term]]:
    """All ways of mapping the atoms' variables into `instance` so that each
    atom becomes a fact of it. Deterministic: atoms are processed in order,
    candidate facts in sorted order."""

    atoms = tuple(atoms)
    base = dict(binding) if binding else {}

    def extend(i: int, bound: dict[Var, Term]) -> Iterator[dict[Var, Term]]:
        if i == len(atoms):
            yield bound
            return
        atom = atoms[i]
        for fact in instance.by_symbol.get(atom.symbol, ()):
            nxt = _match_args(atom.args, fact.args, bound)
            if nxt is not None:
                yield from extend(i + 1, nxt if nxt is not bound else dict(bound))

    yield from extend(0, base)


def holds(atoms, instance: Instance, binding: Mapping[Var, Term] | None = None) -> bool:
    """True iff the atoms match into the instance at least once."""
    return next(match_atoms(atoms, instance, binding), None) is not None


def evaluate_cq(query: CQ, instance: Instance) -> frozenset[tuple[Term, ...]]:
    """Standard conjunctive-query semantics: every homomorphism from the body
    into the instance, projected on the head terms. Nulls in the instance are
    treated as ordinary values."""
    answers = set()
    for binding in match_atoms(query.body, instance):
        answers.add(tuple(binding.get(t, t) if isinstance(t, Var) else t for t in query.head.args))
    return frozenset(answers)


# ---------------------------------------------------------------------------
# Homomorphisms between instances


@dataclass(frozen=True)
class Homomorphism:
    """A mapping between instances. Constants map to themselves; only null
    bindings are stored explicitly."""

    mapping: tuple[tuple[Null, Term], ...]

    @cached_property
    def _map(self) -> dict[Null, Term]:
        return dict(self.mapping)

    def apply(self, term: Term) -> Term:
        if isinstance(term, Null):
            return self._map.get(term, term)
        return term

    def apply_fact(self, fact: Fact) -> Fact:
        return Fact(fact.symbol, tuple(self.apply(a) for a in fact.args))


def find_homomorphism(src: Instance, dst: Instance) -> Homomorphism | None:
    """A homomorphism from `src` into `dst`, or None if none exists.
    Constants are rigid; nulls of `src` may map to any term of `dst`.
    Backtracking over null assignments, deterministic order."""
    if src.schema != dst.schema:
        raise ValueError("homomorphism search requires a common schema")
    facts = src.sorted_facts

    def extend(i: int, mapping: dict[Null, Term]) -> dict[Null, Term] | None:
        if i == len(facts):
            return mapping
        fact = facts[i]
        for candidate in dst.by_symbol.get(fact.symbol, ()):
            trial = mapping
            ok = True
            for s, d in zip(fact.args, candidate.args):
                if isinstance(s, Null):
                    bound = trial.get(s)
                    if bound is None:
                        if trial is mapping:
                            trial = dict(mapping)
                        trial[s] = d
                    elif bound != d:
                        ok = False
                        break
                elif s != d:
                    ok = False
                    break
            if ok:
                found = extend(i + 1, trial)
                if found is not None:
                    return found
        return None

    result = extend(0, {})
    if result is None:
        return None
    return Homomorphism(tuple(sorted(result.items(), key=lambda kv: kv[0].index)))
