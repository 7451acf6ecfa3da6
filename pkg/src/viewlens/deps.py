"""Dependencies (tgds and egds), constraint sets with provenance, view
specifications, and the weak-acyclicity termination guard."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .errors import ViewlensError
from .model import (
    Atom,
    CQ,
    Fact,
    Instance,
    Schema,
    Var,
    atoms_variables,
    evaluate_cq,
    make_instance,
)


# Provenance tags for constraint-set entries.
DB_CONSTRAINT = "db"
VIEW_CONSTRAINT = "view"
DEFINITION_RULE = "def"


@dataclass(frozen=True)
class TGD:
    """A tuple-generating dependency body -> exists(Z) head.

    Head variables not occurring in the body are existentially quantified.
    Empty bodies are allowed and read as an unconditional requirement (the
    head must be satisfiable once).
    """

    body: tuple[Atom, ...]
    head: tuple[Atom, ...]

    def __post_init__(self) -> None:
        if not self.head:
            raise ValueError("a tgd needs at least one head atom")

    @cached_property
    def body_vars(self) -> tuple[Var, ...]:
        return atoms_variables(self.body)

    @cached_property
    def existential_vars(self) -> tuple[Var, ...]:
        body = set(self.body_vars)
        return tuple(v for v in atoms_variables(self.head) if v not in body)

    def is_full(self) -> bool:
        return not self.existential_vars

    def symbols(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for atom in self.body + self.head:
            seen.setdefault(atom.symbol)
        return tuple(seen)


@dataclass(frozen=True)
class EGD:
    """An equality-generating dependency body -> lhs = rhs."""

    body: tuple[Atom, ...]
    lhs: Var
    rhs: Var

    def __post_init__(self) -> None:
        if not self.body:
            raise ValueError("an egd needs a nonempty body")
        body_vars = set(atoms_variables(self.body))
        for v in (self.lhs, self.rhs):
            if v not in body_vars:
                raise ValueError(f"equated variable {v} does not occur in the body")

    def symbols(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for atom in self.body:
            seen.setdefault(atom.symbol)
        return tuple(seen)


Dependency = TGD | EGD


@dataclass(frozen=True)
class ConstraintSet:
    """An ordered list of dependencies, each tagged with its provenance:
    database constraint, view constraint, or view-definition rule."""

    entries: tuple[tuple[Dependency, str], ...] = ()

    def __post_init__(self) -> None:
        for _, prov in self.entries:
            if prov not in (DB_CONSTRAINT, VIEW_CONSTRAINT, DEFINITION_RULE):
                raise ValueError(f"unknown provenance {prov!r}")

    def dependencies(self) -> tuple[Dependency, ...]:
        return tuple(dep for dep, _ in self.entries)

    def with_provenance(self, provenance: str) -> tuple[Dependency, ...]:
        return tuple(dep for dep, prov in self.entries if prov == provenance)

    def tgds(self) -> tuple[TGD, ...]:
        return tuple(dep for dep, _ in self.entries if isinstance(dep, TGD))

    def extend(self, entries) -> ConstraintSet:
        return ConstraintSet(self.entries + tuple(entries))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def constraint_set(db=(), view=(), definition=()) -> ConstraintSet:
    entries = [(d, DB_CONSTRAINT) for d in db]
    entries += [(d, VIEW_CONSTRAINT) for d in view]
    entries += [(d, DEFINITION_RULE) for d in definition]
    return ConstraintSet(tuple(entries))


# ---------------------------------------------------------------------------
# View specifications


@dataclass(frozen=True)
class ViewSpec:
    """Database and view schemas, one exact conjunctive-query definition per
    view symbol, and the user-supplied constraints (database and view
    provenance; definition rules are derived, see exact_view_rules)."""

    db_schema: Schema
    view_schema: Schema
    definitions: tuple[CQ, ...]
    constraints: ConstraintSet = field(default_factory=ConstraintSet)

    def __post_init__(self) -> None:
        defined = [d.head.symbol for d in self.definitions]
        if sorted(defined) != sorted(self.view_schema.names()):
            raise ViewlensError(
                "every view symbol needs exactly one definition: "
                f"defined {sorted(defined)}, declared {sorted(self.view_schema.names())}"
            )
        for cq in self.definitions:
            if not cq.is_safe():
                raise ViewlensError(f"unsafe definition for {cq.head.symbol}")
            if len(cq.head.args) != self.view_schema.arity(cq.head.symbol):
                raise ViewlensError(f"definition head arity mismatch for {cq.head.symbol}")
            for atom in cq.body:
                if not self.db_schema.has(atom.symbol):
                    raise ViewlensError(
                        f"definition of {cq.head.symbol} uses non-database symbol {atom.symbol}"
                    )
        for dep, prov in self.constraints:
            names = dep.symbols()
            if prov == DB_CONSTRAINT and not all(self.db_schema.has(n) for n in names):
                raise ViewlensError("database constraint mentions a non-database symbol")
            if prov == VIEW_CONSTRAINT and not all(self.view_schema.has(n) for n in names):
                raise ViewlensError("view constraint mentions a non-view symbol")
        object.__setattr__(self, "definitions", tuple(sorted(self.definitions, key=lambda c: c.head.symbol)))

    @cached_property
    def combined_schema(self) -> Schema:
        return self.db_schema.union(self.view_schema)

    def definition_of(self, view_symbol: str) -> CQ:
        for cq in self.definitions:
            if cq.head.symbol == view_symbol:
                return cq
        raise KeyError(view_symbol)

    @cached_property
    def full_constraints(self) -> ConstraintSet:
        """User constraints plus the exactness rules derived from the
        definitions."""
        return self.constraints.extend((r, DEFINITION_RULE) for r in exact_view_rules(self))

    def db_constraints(self) -> tuple[Dependency, ...]:
        return self.constraints.with_provenance(DB_CONSTRAINT)

    def view_constraints(self) -> tuple[Dependency, ...]:
        return self.constraints.with_provenance(VIEW_CONSTRAINT)

    def view_image(self, db_instance: Instance) -> Instance:
        """The view state induced by a database instance: each view symbol is
        exactly the result of its definition."""
        facts = set()
        for cq in self.definitions:
            for answer in evaluate_cq(cq, db_instance):
                facts.add(Fact(cq.head.symbol, answer))
        return make_instance(self.view_schema, facts)

    def is_consistent(self, db_instance: Instance) -> bool:
        """Admissibility of a database state: it satisfies the database
        constraints and its view image satisfies the view constraints."""
        from .chase import satisfies_all  # local import to avoid a cycle

        if not satisfies_all(db_instance, self.db_constraints()):
            return False
        return satisfies_all(self.view_image(db_instance), self.view_constraints())


def exact_view_rules(spec: ViewSpec) -> list[TGD]:
    """The two containment tgds per view definition V(x) :- body: the forward
    rule body -> V(x) and the backward rule V(x) -> exists(y) body. Together
    they pin the view symbol to exactly the query result."""
    rules: list[TGD] = []
    for cq in spec.definitions:
        rules.append(TGD(body=cq.body, head=(cq.head,)))
        rules.append(TGD(body=(cq.head,), head=cq.body))
    return rules


# ---------------------------------------------------------------------------
# Classification


@dataclass(frozen=True)
class Classification:
    kind: str  # "tgd" | "egd"
    full: bool
    functional: bool  # egd in the two-atom functional-dependency shape
    join: bool  # tgd in the join-dependency shape


def _fd_shape(dep: EGD) -> bool:
    # Two atoms of one symbol, arguments all variables with no repetition
    # inside an atom; the equated pair sits at the same position of the two
    # atoms and the atoms agree exactly on a set of determinant positions.
    if len(dep.body) != 2:
        return False
    a, b = dep.body
    if a.symbol != b.symbol or len(a.args) != len(b.args):
        return False
    for atom in (a, b):
        if not all(isinstance(t, Var) for t in atom.args):
            return False
        if len(set(atom.args)) != len(atom.args):
            return False
    dependent = None
    for i, (s, t) in enumerate(zip(a.args, b.args)):
        if {s, t} == {dep.lhs, dep.rhs} and s != t:
            dependent = i
    if dependent is None:
        return False
    shared = {i for i, (s, t) in enumerate(zip(a.args, b.args)) if s == t}
    if not shared:
        return False
    # Non-determinant positions must not join the two atoms.
    a_rest = {t for i, t in enumerate(a.args) if i not in shared}
    b_rest = {t for i, t in enumerate(b.args) if i not in shared}
    return not (a_rest & b_rest)


def _jd_shape(dep: TGD) -> bool:
    # Single-symbol head over distinct variables, body a join of projections
    # of that symbol whose projected positions cover the head.
    if len(dep.head) != 1 or dep.existential_vars:
        return False
    head = dep.head[0]
    if not dep.body or any(atom.symbol != head.symbol for atom in dep.body):
        return False
    if not all(isinstance(t, Var) for t in head.args) or len(set(head.args)) != len(head.args):
        return False
    head_vars = set(head.args)
    covered: set[int] = set()
    seen_fresh: set[Var] = set()
    for atom in dep.body:
        if len(atom.args) != len(head.args):
            return False
        fresh_here: set[Var] = set()
        for i, t in enumerate(atom.args):
            if not isinstance(t, Var):
                return False
            if t == head.args[i]:
                covered.add(i)
            elif t in head_vars:
                return False  # head variable out of position
            else:
                fresh_here.add(t)
        if fresh_here & seen_fresh:
            return False  # non-projected positions must not join across atoms
        seen_fresh |= fresh_here
    return covered == set(range(len(head.args)))


def classify(dep: Dependency) -> Classification:
    """Syntactic classification: tgd/egd, full/embedded, and whether the
    dependency is in functional-dependency or join-dependency shape."""
    if isinstance(dep, EGD):
        return Classification(kind="egd", full=True, functional=_fd_shape(dep), join=False)
    return Classification(kind="tgd", full=dep.is_full(), functional=False, join=_jd_shape(dep))


def fd_egd(symbol: str, arity: int, determinants: tuple[int, ...], dependent: int) -> EGD:
    """Convenience constructor: the functional dependency
    determinants -> dependent on `symbol`, encoded as an egd (0-based
    positions)."""
    left = tuple(Var(f"u{i}") for i in range(arity))
    right = tuple(
        Var(f"u{i}") if i in determinants else Var(f"w{i}") for i in range(arity)
    )
    return EGD(body=(Atom(symbol, left), Atom(symbol, right)), lhs=left[dependent], rhs=right[dependent])


# ---------------------------------------------------------------------------
# Weak acyclicity


@dataclass(frozen=True)
class PositionGraph:
    """The position dependency graph of a tgd set: nodes are (symbol, index)
    positions; regular edges propagate values body-to-head, special edges
    point at positions that receive fresh existential values."""

    nodes: tuple[tuple[str, int], ...]
    regular_edges: tuple[tuple[tuple[str, int], tuple[str, int]], ...]
    special_edges: tuple[tuple[tuple[str, int], tuple[str, int]], ...]


@dataclass(frozen=True)
class WeakAcyclicityReport:
    weakly_acyclic: bool
    graph: PositionGraph


def position_graph(deps) -> PositionGraph:
    nodes: dict[tuple[str, int], None] = {}
    regular: set[tuple[tuple[str, int], tuple[str, int]]] = set()
    special: set[tuple[tuple[str, int], tuple[str, int]]] = set()
    for dep in deps:
        if not isinstance(dep, TGD):
            continue
        body_positions: dict[Var, list[tuple[str, int]]] = {}
        for atom in dep.body:
            for i, t in enumerate(atom.args):
                nodes.setdefault((atom.symbol, i))
                if isinstance(t, Var):
                    body_positions.setdefault(t, []).append((atom.symbol, i))
        existentials = set(dep.existential_vars)
        head_universal: dict[Var, list[tuple[str, int]]] = {}
        head_existential: list[tuple[str, int]] = []
        for atom in dep.head:
            for i, t in enumerate(atom.args):
                nodes.setdefault((atom.symbol, i))
                if isinstance(t, Var):
                    if t in existentials:
                        head_existential.append((atom.symbol, i))
                    else:
                        head_universal.setdefault(t, []).append((atom.symbol, i))
        for var, sources in body_positions.items():
            for src in sources:
                for dst in head_universal.get(var, ()):
                    regular.add((src, dst))
                for dst in head_existential:
                    special.add((src, dst))
    return PositionGraph(
        nodes=tuple(sorted(nodes)),
        regular_edges=tuple(sorted(regular)),
        special_edges=tuple(sorted(special)),
    )


def _strongly_connected_components(nodes, edges) -> list[set]:
    """Iterative Tarjan over an adjacency mapping."""
    adjacency: dict = {n: [] for n in nodes}
    for src, dst in edges:
        adjacency[src].append(dst)
    index: dict = {}
    lowlink: dict = {}
    on_stack: set = set()
    stack: list = []
    components: list[set] = []
    counter = 0

    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(adjacency[root]))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = lowlink[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(adjacency[nxt])))
                    advanced = True
                    break
                if nxt in on_stack:
                    lowlink[node] = min(lowlink[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index[node]:
                component = set()
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.add(member)
                    if member == node:
                        break
                components.append(component)
    return components


def is_weakly_acyclic(cs: ConstraintSet | tuple) -> WeakAcyclicityReport:
    """Build the position graph of the set's tgds and test that no cycle
    passes through a special edge. A true verdict guarantees chase
    termination; egds never break it."""
    deps = cs.dependencies() if isinstance(cs, ConstraintSet) else tuple(cs)
    graph = position_graph(deps)
    all_edges = graph.regular_edges + graph.special_edges
    components = _strongly_connected_components(graph.nodes, all_edges)
    component_of = {}
    for i, comp in enumerate(components):
        for node in comp:
            component_of[node] = i
    ok = all(component_of[src] != component_of[dst] for src, dst in graph.special_edges)
    return WeakAcyclicityReport(weakly_acyclic=ok, graph=graph)
