"""pylpstruct - exact presentations of Lebesgue spaces, disintegrations and isometry codes."""

__version__ = "0.1.0"

from pylpstruct.enums import (  # noqa: F401 – re-export for convenience
    AtomVerdict,
    Certainty,
    ExitCode,
    SpaceKind,
    StageVerdict,
)

from pylpstruct.errors import (  # noqa: F401
    AtomCountMismatch,
    BudgetExhausted,
    GridTooSmall,
    LoopDetected,
    MalformedInputError,
    NegativeBase,
    NotIsomorphism,
    PrecisionExhausted,
    PyLpStructError,
    SpaceMismatch,
    UnknownChainLimit,
    UnsupportedSpace,
    ValidationMissing,
)

from pylpstruct.exact import (  # noqa: F401
    DyadicInterval,
    Exponent,
    interval_add,
    interval_div,
    interval_mul,
    interval_sub,
    pow_rational,
    root_p,
)

from pylpstruct.lebesgue import (  # noqa: F401
    LpSpace,
    LpVector,
    SeqVector,
    StepFunction,
    add,
    disjointly_supported,
    distance,
    is_component,
    lp_sum_embed,
    norm,
    norm_p_power,
    scale,
    sub,
)

from pylpstruct.literals import parse_rational, parse_vector  # noqa: F401

from pylpstruct.signature import (  # noqa: F401
    BANACH_SIGNATURE,
    METRIC_SIGNATURE,
    ModulusFunction,
    Signature,
    check_modulus,
)

from pylpstruct.presentation import (  # noqa: F401
    BanachPresentation,
    FiniteMetricPresentation,
    PerturbedPresentation,
    Presentation,
    StandardPresentation,
    Term,
    enumerate_rational_points,
    eval_metric,
    index_of,
    term_of,
)

from pylpstruct.isometry_codes import (  # noqa: F401
    ConditionVerdict,
    IsometryTable,
    SearchResult,
    TermMaps,
    check_conditions,
    compose_tables,
    limit_map_from_table,
    search_tables,
)

from pylpstruct.scramble import HiddenIsometry, ScrambledPresentation  # noqa: F401

from pylpstruct.disintegration import (  # noqa: F401
    ChainLimit,
    ChainPartition,
    DisintegrationReport,
    VectorTree,
    chain_limit,
    chain_limits,
    disintegrate,
    partition_chains,
    standard_disintegration,
    validate_disintegration,
)

from pylpstruct.synthesis import (  # noqa: F401
    StageSetEvaluator,
    SynthesizedIsometry,
    VerificationReport,
    evaluate_a1,
    evaluate_a2,
    recover_projection,
    synthesize_isometry,
    verify_isometry,
)

from pylpstruct.graph_bridge import (  # noqa: F401
    Graph,
    GraphMetricSpace,
    encode,
    isometry_to_isomorphism,
    isomorphism_to_isometry,
)

from pylpstruct.persistence import (  # noqa: F401
    load_presentation,
    read_document,
    save_presentation,
    write_document,
)

from pylpstruct.config import RunConfig  # noqa: F401
