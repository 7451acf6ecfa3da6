"""viewlens: invertibility, inverse rewritings, and update translation for
relational views defined by exact conjunctive queries under embedded
dependencies."""

from .model import (
    Atom,
    CQ,
    Const,
    DATABASE,
    Fact,
    GroundDelta,
    Homomorphism,
    Instance,
    Null,
    Schema,
    SymbolDecl,
    Term,
    VIEW,
    Var,
    database_schema,
    diff,
    disjoint_union,
    evaluate_cq,
    find_homomorphism,
    make_instance,
    view_schema,
)
from .deps import (
    Classification,
    ConstraintSet,
    DB_CONSTRAINT,
    DEFINITION_RULE,
    EGD,
    TGD,
    VIEW_CONSTRAINT,
    ViewSpec,
    WeakAcyclicityReport,
    classify,
    constraint_set,
    exact_view_rules,
    fd_egd,
    is_weakly_acyclic,
)
from .chase import (
    ChaseResult,
    ImplicationVerdict,
    chase,
    enumerate_models,
    entails_equality,
    implies,
    satisfies,
    satisfies_all,
)
from .determinacy import (
    DeterminacyVerdict,
    InvertibilityReport,
    Rewriting,
    determines,
    is_invertible,
    synthesize_all,
    synthesize_rewriting,
    verify_rewriting,
)
from .updates import (
    Condition,
    EverywhereVerdict,
    TranslatabilityVerdict,
    UpdateProgram,
    UpdateStep,
    apply_update,
    translatable_at,
    translatable_everywhere,
    translate,
)
from .complement import (
    ComplementCheck,
    combine_specs,
    is_complement,
    respects_constant_complement,
)
from .errors import (
    ComplementPreconditionError,
    NotInvertibleError,
    PreconditionError,
    SchemaCollisionError,
    TranslationUnavailableError,
    UpdateApplicationError,
    ViewlensError,
)

__version__ = "0.1.0"
