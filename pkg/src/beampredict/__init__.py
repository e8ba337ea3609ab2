"""Predict user-side AoD beam bins from BS-observable multipath features."""

from .beamspace import (ArrayConfig, BeamspaceCodebook, ComplexChannel, angle_to_bin, assemble_channel,
                        dft_codebook, effective_channel, steering_vector)
from .evaluation import (EvalReport, RocCurve, baseline_deviation, compare_at_pf, nn_deviation, roc_curve,
                         sample_variance)
from .features import (FeatureKind, FeatureNorms, aod_indicator, compute_norms, delay_input,
                       featurize_dataset, rss_input)
from .infometrics import (PatternDistribution, discretize, entropy, mi_sweep, mutual_information)
from .mlp import (MlpArchitecture, MlpParams, TrainConfig, cost, forward, gradients, init_params, train)
from .scene import (ChannelSample, PathRecord, Scene, default_scene, generate_dataset, trace_paths)
from .schemes import (SchemeKind, TrainedScheme, predict, sample_average_baseline, train_scheme)

__version__ = "0.1.0"

__all__ = [
    "ArrayConfig",
    "BeamspaceCodebook",
    "ComplexChannel",
    "angle_to_bin",
    "assemble_channel",
    "dft_codebook",
    "effective_channel",
    "steering_vector",
    "EvalReport",
    "RocCurve",
    "baseline_deviation",
    "compare_at_pf",
    "nn_deviation",
    "roc_curve",
    "sample_variance",
    "FeatureKind",
    "FeatureNorms",
    "aod_indicator",
    "compute_norms",
    "delay_input",
    "featurize_dataset",
    "rss_input",
    "PatternDistribution",
    "discretize",
    "entropy",
    "mi_sweep",
    "mutual_information",
    "MlpArchitecture",
    "MlpParams",
    "TrainConfig",
    "cost",
    "forward",
    "gradients",
    "init_params",
    "train",
    "ChannelSample",
    "PathRecord",
    "Scene",
    "default_scene",
    "generate_dataset",
    "trace_paths",
    "SchemeKind",
    "TrainedScheme",
    "predict",
    "sample_average_baseline",
    "train_scheme",
]
