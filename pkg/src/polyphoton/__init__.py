"""Photonic variational classifier: simulation, training, and pipeline.

Layering, bottom up: `fock` enumerates photon-number states, `circuits`
describes programmable interferometers, `simulate` turns a circuit plus an
input state into output distributions (ideal, partially distinguishable,
or fully classical), `model` wraps circuit + readout weights into a
classifier, `optimize`/`train` implement the seesaw training loop,
`features` handles SMILES encoding and dataset hygiene, and `pipeline`/
`cli` orchestrate end-to-end runs. `estimator` exposes the whole stack as
a scikit-learn classifier.
"""

from .circuits import (
    BeamSplitter,
    CircuitSpec,
    DataBound,
    Fixed,
    PhaseShifter,
    Trainable,
    build_unitary,
    default_ansatz,
)
from .estimator import PhotonicVqcClassifier
from .exceptions import (
    BindingError,
    ConfigurationError,
    CsvFormatError,
    GapRangeError,
    InvalidDatasetError,
    InvalidDimensionError,
    InvalidHistoryError,
    InvalidTransitionError,
    NotInBasisError,
    OptimizationError,
    OverlongSmilesError,
    PipelineStageError,
    PolyphotonError,
    SplitError,
    TokenizationError,
    UnknownTokenError,
    UnsupportedInputError,
)
from .features import (
    ENCODED_LENGTH,
    FeatureSet,
    Standardizer,
    TokenDictionary,
    augment,
    balanced_subsample,
    build_dictionary,
    bundled_dictionary,
    encode_smiles,
    label_gap,
    preprocess_dataset,
    stratified_split,
)
from .fock import FockBasis, FockState, enumerate_basis, to_click_pattern
from .model import (
    VqcModel,
    loss,
    model_eval,
    outcome_space_size,
    predict,
    probability_matrix,
    spectrum_probe,
)
from .optimize import (
    GpProposal,
    NelderMeadResult,
    gp_propose,
    nelder_mead,
    ridge_solve,
)
from .pipeline import (
    RunConfig,
    accuracy,
    confusion,
    evaluate_model,
    ingest_features_csv,
    run_experiment,
    synthetic_blobs,
)
from .simulate import (
    NoiseModel,
    OutputDistribution,
    classical_distribution,
    ideal_distribution,
    noisy_distribution,
    permanent,
    sample_counts,
    transition_amplitude,
)
from .train import TrainConfig, TrainedResult, ridge_lambda, seesaw_train

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BeamSplitter",
    "CircuitSpec",
    "DataBound",
    "Fixed",
    "PhaseShifter",
    "Trainable",
    "build_unitary",
    "default_ansatz",
    "PhotonicVqcClassifier",
    "BindingError",
    "ConfigurationError",
    "CsvFormatError",
    "GapRangeError",
    "InvalidDatasetError",
    "InvalidDimensionError",
    "InvalidHistoryError",
    "InvalidTransitionError",
    "NotInBasisError",
    "OptimizationError",
    "OverlongSmilesError",
    "PipelineStageError",
    "PolyphotonError",
    "SplitError",
    "TokenizationError",
    "UnknownTokenError",
    "UnsupportedInputError",
    "ENCODED_LENGTH",
    "FeatureSet",
    "Standardizer",
    "TokenDictionary",
    "augment",
    "balanced_subsample",
    "build_dictionary",
    "bundled_dictionary",
    "encode_smiles",
    "label_gap",
    "preprocess_dataset",
    "stratified_split",
    "FockBasis",
    "FockState",
    "enumerate_basis",
    "to_click_pattern",
    "VqcModel",
    "loss",
    "model_eval",
    "outcome_space_size",
    "predict",
    "probability_matrix",
    "spectrum_probe",
    "GpProposal",
    "NelderMeadResult",
    "gp_propose",
    "nelder_mead",
    "ridge_solve",
    "RunConfig",
    "accuracy",
    "confusion",
    "evaluate_model",
    "ingest_features_csv",
    "run_experiment",
    "synthetic_blobs",
    "NoiseModel",
    "OutputDistribution",
    "classical_distribution",
    "ideal_distribution",
    "noisy_distribution",
    "permanent",
    "sample_counts",
    "transition_amplitude",
    "TrainConfig",
    "TrainedResult",
    "ridge_lambda",
    "seesaw_train",
]
