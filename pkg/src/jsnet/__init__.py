"""Classifier built on the multivariate Johnson S_U translation system.

The network maps each input through per-class normalizing translations,
scores the translated vectors with log-linearized Gaussian terms and
returns class posteriors. Training is a closed-form percentile fit
followed by a convex Newton solve, so there is nothing to tune.
"""

from .dataset import LabeledDataset, teacher_matrix
from .emg import (
    EmgFeatures,
    RawRecording,
    butter2_design,
    extract,
    filter_apply,
    half_normal_moments,
    normalize_features,
    rectify,
)
from .errors import (
    DegenerateSpacing,
    DomainError,
    FactorizationError,
    FamilyMismatch,
    LabelError,
    NearRestError,
    ParseError,
    RangeError,
    SolveFailure,
)
from .johnson import (
    ClassModel,
    FamilyTag,
    JohnsonParams,
    class_log_density,
    fit_percentile,
    inverse_transform,
    jacobian_logdet,
    normalize_transform,
)
from .llr import LlrModel, llr_fit, llr_predict
from .network import WeightSet, forward, predict, weights_from_models
from .synth import generate, table_preset
from .trainer import TrainConfig, fit

__version__ = "0.1.0"
