"""View complements: checking that a second view restores losslessness, and
the constant-complement discipline for update translation.

Complements are checked, never synthesized.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chase import DEFAULT_BUDGET, DEFAULT_DOMAIN_BOUND, UNKNOWN
from .deps import ConstraintSet, DB_CONSTRAINT, VIEW_CONSTRAINT, ViewSpec
from .determinacy import InvertibilityReport, is_invertible
from .errors import ComplementPreconditionError, PreconditionError
from .model import Instance
from .updates import TRANSLATABLE, TranslatabilityVerdict, UpdateProgram, translatable_at

YES = "yes"
NO = "no"


@dataclass(frozen=True)
class ComplementCheck:
    status: str  # YES | NO | UNKNOWN
    invertibility: InvertibilityReport


def combine_specs(first: ViewSpec, second: ViewSpec) -> ViewSpec:
    """The view publishing both view schemas over one database. The two specs
    must share the database schema and database constraints; their view
    symbol names must be disjoint."""
    if first.db_schema != second.db_schema:
        raise PreconditionError("complement checking requires a shared database schema")
    if first.db_constraints() != second.db_constraints():
        raise PreconditionError("complement checking requires shared database constraints")
    view_schema = first.view_schema.union(second.view_schema)  # raises on overlap
    entries = [(d, DB_CONSTRAINT) for d in first.db_constraints()]
    entries += [(d, VIEW_CONSTRAINT) for d in first.view_constraints()]
    entries += [(d, VIEW_CONSTRAINT) for d in second.view_constraints()]
    return ViewSpec(
        db_schema=first.db_schema,
        view_schema=view_schema,
        definitions=first.definitions + second.definitions,
        constraints=ConstraintSet(tuple(entries)),
    )


def is_complement(
    first: ViewSpec,
    second: ViewSpec,
    budget: int = DEFAULT_BUDGET,
    domain_bound: int = DEFAULT_DOMAIN_BOUND,
) -> ComplementCheck:
    """Does the second view contain enough information to make the combined
    view lossless? Decided as invertibility of the combination; unknown
    propagates from the determinacy checks."""
    combined = combine_specs(first, second)
    report = is_invertible(combined, budget=budget, domain_bound=domain_bound)
    if report.status == "invertible":
        status = YES
    elif report.status == "not-invertible":
        status = NO
    else:
        status = UNKNOWN
    return ComplementCheck(status=status, invertibility=report)


def respects_constant_complement(
    first: ViewSpec,
    second: ViewSpec,
    program: UpdateProgram,
    db_state: Instance,
    budget: int = DEFAULT_BUDGET,
    domain_bound: int = DEFAULT_DOMAIN_BOUND,
    complement: ComplementCheck | None = None,
) -> bool:
    """Does translating the update (through the combined, invertible view)
    leave the complement's content unchanged?

    Precondition failures are reported distinctly:
    ComplementPreconditionError when the pair is not a certified complement,
    TranslationUnavailableError (via translate) when the update does not
    translate at this state.
    """
    check = complement if complement is not None else is_complement(
        first, second, budget=budget, domain_bound=domain_bound
    )
    if check.status != YES:
        raise ComplementPreconditionError(
            f"the pair is not a certified complement (status: {check.status})"
        )
    combined = combine_specs(first, second)
    verdict: TranslatabilityVerdict = translatable_at(
        combined, program, db_state,
        budget=budget, domain_bound=domain_bound,
        invertibility=check.invertibility,
    )
    if verdict.status != TRANSLATABLE:
        from .errors import TranslationUnavailableError

        raise TranslationUnavailableError(
            f"update is not translatable at this state ({verdict.status}: {verdict.reason})"
        )
    before = second.view_image(db_state)
    after = second.view_image(verdict.new_db_state)
    return before == after
