"""Model checker and actual-causality engine for finite component-based systems."""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    AtomDecl,
    CapExceeded,
    ComponentDecl,
    Configuration,
    DEFAULT_OPTIONS,
    InterfaceSplit,
    Intervention,
    ModelError,
    Options,
    PartialConfiguration,
    RuleRow,
    RuleTable,
    SystemModel,
    UnknownNameError,
    Violation,
    apply_intervention,
    check_interface,
    clamping_intervention,
    conjugate_decompose,
    constant_table,
    reachable,
    restrict,
    successors,
    validate_model,
)
from . import formulas  # noqa: F401
from .semantics import evaluate, sat_set  # noqa: F401
from .causality import (  # noqa: F401
    CausalChain,
    CausalProjection,
    CauseCertificate,
    CauseQuery,
    causal_projection,
    check_cause,
    classify_intervention_effect,
    find_causal_chains,
    find_causes,
)
from .hp import HPCauseQuery, HPModel, export_hp, hp_check_actual_cause, solve  # noqa: F401
from .bisim import (  # noqa: F401
    BisimRelation,
    BisimResult,
    PointedModel,
    VariantGraph,
    VocabularyMismatch,
    check_bisim,
    generate_formula_suite,
    intervention_closure,
)
from .dsl import DslError, ModelDocument, parse_model, parse_query_text  # noqa: F401
from .queries import (  # noqa: F401
    QueryReport,
    best_utility,
    min_cost_recovery,
    run_document,
    run_query,
)
