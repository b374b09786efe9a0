"""Streaming classification with similarity-based instance selection.

The heavy lifting lives in the compiled extension; this package just
re-exports it.
"""

from ._sistream import (  # noqa: F401
    Adwin,
    Classifier,
    Ddm,
    DdmLevel,
    GaussianConfig,
    GaussianPhase,
    HoeffdingAdaptiveTree,
    HoeffdingTree,
    Instance,
    LeafPrediction,
    MajorityClass,
    PredictionRecord,
    PrequentialReport,
    RunningScaler,
    SisConfig,
    TreeConfig,
    apply_feature_drop,
    hoeffding_bound,
    kappa,
    prequential_run,
    spatial_distance,
    spatio_temporal_distance,
    synth_gaussian_stream,
    time_distance,
)

__all__ = [
    "Adwin",
    "Classifier",
    "Ddm",
    "DdmLevel",
    "GaussianConfig",
    "GaussianPhase",
    "HoeffdingAdaptiveTree",
    "HoeffdingTree",
    "Instance",
    "LeafPrediction",
    "MajorityClass",
    "PredictionRecord",
    "PrequentialReport",
    "RunningScaler",
    "SisConfig",
    "TreeConfig",
    "apply_feature_drop",
    "hoeffding_bound",
    "kappa",
    "prequential_run",
    "spatial_distance",
    "spatio_temporal_distance",
    "synth_gaussian_stream",
    "time_distance",
]
