"""Glass-box additive boosting with editable shape functions."""

from .data import (
    CHRISTCHURCH_N,
    DEFAULT_COLUMNS,
    FEATURES,
    UNITS,
    Dataset,
    FeatureSummary,
    IngestError,
    Patch,
    SyntheticSpec,
    christchurch_surrogate,
    generate_synthetic,
    label_from_displacement,
    load_dataset,
    split_dataset,
    summarize_feature,
    write_dataset,
)
from .editor import (
    EditReport,
    EditSpecBundle,
    InteractionEdit,
    ReplacementPolicy,
    SigmoidParams,
    StepFunctionSpec,
    TrustRegion,
    UnivariateEdit,
    apply_domain_edits,
    apply_interaction_edit,
    apply_univariate_edit,
    default_edit_spec,
    discrepancy,
    fit_sigmoid,
    load_edit_spec,
    parse_edit_spec,
    replay_edit_log,
    rescale_to_range,
    sample_curve,
    save_edit_spec,
    select_trusted,
    selective_replace,
    synthesize_interaction,
)
from .explain import (
    ConfusionCounts,
    EvalReport,
    ImportanceRanking,
    LocalExplanation,
    TransitionMap,
    auc_score,
    compare_models,
    confusion,
    evaluate,
    explain_site,
    importance,
    local_explain,
)
from .model import (
    MODEL_SCHEMA_VERSION,
    BinEdges,
    EbmModel,
    InteractionTerm,
    ModelFormatError,
    UnivariateTerm,
    center_terms,
    load_model,
    model_hash,
    model_to_dict,
    save_model,
)
from .trainer import (
    BoostState,
    CandidatePair,
    TrainConfig,
    build_bins,
    early_stop_check,
    fit_stump,
    init_intercept,
    log_loss_from_scores,
    rank_interactions,
    train,
)

__version__ = "0.1.0"
