"""Binary segmentation loss toolkit.

Fifteen losses across four families (distribution, region, boundary,
compound), each with an analytic gradient verified against central finite
differences, plus exact Euclidean geometry, hard evaluation metrics, and a
gradient-descent harness for synthetic masks.
"""

__version__ = "0.1.0"

from .core import (
    ConfigError,
    DEFAULT_CONFIG,
    LossConfig,
    ShapeError,
    SoftConfusion,
    clamp_prob,
    reduce_mean,
    reduce_sum,
    sigmoid,
    soft_confusion,
)
from .distribution import (
    balanced_bce,
    bce,
    distance_penalized_ce,
    focal,
    weighted_bce,
)
from .region import (
    dice_loss,
    focal_tversky_loss,
    log_cosh_dice_loss,
    sensitivity_specificity_loss,
    tversky_loss,
)
from .boundary import hausdorff_dt_loss, shape_aware_loss
from .compound import combo_loss, exp_log_loss, ssl_loss
from .geometry import (
    LocalStats,
    PixelSet,
    distance_transform,
    extract_boundary,
    hausdorff_distance,
    local_stats,
    mean_point_to_set_distance,
)
from .gradcheck import (
    GradCheckResult,
    LOSS_IDS,
    analytic_gradient,
    finite_diff_gradient,
    loss_value,
    run_gradcheck,
)
from .metrics import binarize, dice_coefficient, sensitivity, specificity
from .harness import FitConfig, FitTrace, SyntheticMaskSpec, fit, generate_mask, run_matrix

__all__ = [
    "ConfigError",
    "DEFAULT_CONFIG",
    "FitConfig",
    "FitTrace",
    "GradCheckResult",
    "LOSS_IDS",
    "LocalStats",
    "LossConfig",
    "PixelSet",
    "ShapeError",
    "SoftConfusion",
    "SyntheticMaskSpec",
    "analytic_gradient",
    "balanced_bce",
    "bce",
    "binarize",
    "clamp_prob",
    "combo_loss",
    "dice_coefficient",
    "dice_loss",
    "distance_penalized_ce",
    "distance_transform",
    "exp_log_loss",
    "extract_boundary",
    "finite_diff_gradient",
    "fit",
    "focal",
    "focal_tversky_loss",
    "generate_mask",
    "hausdorff_distance",
    "hausdorff_dt_loss",
    "local_stats",
    "log_cosh_dice_loss",
    "loss_value",
    "mean_point_to_set_distance",
    "reduce_mean",
    "reduce_sum",
    "run_gradcheck",
    "run_matrix",
    "sensitivity",
    "sensitivity_specificity_loss",
    "shape_aware_loss",
    "sigmoid",
    "soft_confusion",
    "specificity",
    "ssl_loss",
    "tversky_loss",
    "weighted_bce",
]
