"""Signal-level fusion of multichannel recordings.

The pipeline reconstructs each channel's phase space by time-delay
embedding, detects pairwise coupling as joint recurrence structure,
merges channels into modality-level weighted graphs per sliding window,
binarizes them into a temporal network, summarizes that network with
temporal graph metrics, and classifies trials with L1-regularized
logistic regression.
"""

from .config import PipelineConfig, load_config
from .embedding import (
    DimensionEstimate,
    EmbeddedTrajectory,
    EmbeddingParams,
    ami_curve,
    embed,
    estimate_delay,
    estimate_dimension,
)
from .errors import (
    DegenerateInputError,
    FormatError,
    InputError,
    JrpnetError,
    NumericError,
    ParseError,
    SchemaError,
)
from .ingest import (
    LabelRecord,
    Recording,
    Window,
    load_labels,
    load_recording,
    segment_windows,
    zscore_channels,
)
from .learn import (
    CLASS_ORDER,
    CrossValResult,
    FeatureTable,
    SparseLinearModel,
    cross_validate,
    discretize_score,
    fit_lasso,
    lambda_grid,
    model_from_dict,
    model_to_dict,
    predict,
)
from .netbuild import (
    ChannelEmbedding,
    TemporalNetwork,
    WeightedGraph,
    assemble_temporal_network,
    channel_graph,
    channel_graphs,
    merge_modalities,
    write_dot,
)
from .pipeline import (
    analyze_recording,
    estimate_trial_embeddings,
    run_pipeline,
    stage_analyze,
    stage_embed_params,
    stage_evaluate,
    stage_features,
    stage_train,
)
from .recurrence import (
    RecurrenceMatrix,
    joint_recurrence_plot,
    recurrence_plot,
    threshold_for_rate,
    write_pbm,
)
from .rqa import (
    RqaSummary,
    determinism,
    laminarity,
    mean_diagonal_length,
    mean_vertical_length,
    recurrence_rate,
    summarize,
)
from .synth import CouplingSpec, generate, three_regime_specs, write_dataset, write_recording
from .tempnet import (
    ReachabilityReport,
    TemporalFeatures,
    count_fastest_paths,
    feature_vector,
    reachability_and_latency,
    temporal_correlation,
    temporal_efficiency,
    temporal_small_worldness,
)

__version__ = "0.1.0"
