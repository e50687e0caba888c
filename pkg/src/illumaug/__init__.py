"""Data-driven color augmentation built on computational color constancy.

Estimate scene illuminants from a training corpus, white-balance images by
von Kries adaptation, keep the empirical illuminant distribution in a bank
file, and synthesize color-casted, gamma-perturbed, geometrically
distorted variants -- plus the matching evaluation metrics and test-time
median aggregation.
"""

from .augment import (
    AugmentationPlan,
    GammaSamplerConfig,
    GeometricConfig,
    apply_plan,
    apply_plan_to_mask,
    crop_bbox,
    derive_seed,
    make_plan,
    mask_bbox_with_margin,
    sample_gamma,
    tta_expand,
    tta_median,
)
from .bank import (
    BankEntry,
    IlluminantBank,
    bank_lab_projection,
    bank_summary,
    build_bank,
    load_bank,
    sample_illuminant,
    save_bank,
)
from .color import (
    Encoding,
    Illuminant,
    ImageBuffer,
    LabPoint,
    apply_gamma,
    linear_to_srgb,
    rgb_to_lab,
    srgb_to_linear,
    von_kries_cast,
    von_kries_correct,
    von_kries_gains,
)
from .constancy import (
    EstimatorConfig,
    angular_error_degrees,
    estimate_illuminant,
    gaussian_derivative,
    gaussian_kernels,
)
from .errors import (
    BankFormatError,
    DomainError,
    ScoreFormatError,
    UnsupportedImageError,
)
from .metrics import (
    accuracy,
    auc,
    average_precision,
    confusion_counts,
    dice,
    jaccard,
    read_score_csv,
    seg_metrics,
    sensitivity,
    specificity,
    threshold_map,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentationPlan",
    "BankEntry",
    "BankFormatError",
    "DomainError",
    "Encoding",
    "EstimatorConfig",
    "GammaSamplerConfig",
    "GeometricConfig",
    "Illuminant",
    "IlluminantBank",
    "ImageBuffer",
    "LabPoint",
    "ScoreFormatError",
    "UnsupportedImageError",
    "accuracy",
    "angular_error_degrees",
    "apply_gamma",
    "apply_plan",
    "apply_plan_to_mask",
    "auc",
    "average_precision",
    "bank_lab_projection",
    "bank_summary",
    "build_bank",
    "confusion_counts",
    "crop_bbox",
    "derive_seed",
    "dice",
    "estimate_illuminant",
    "gaussian_derivative",
    "gaussian_kernels",
    "jaccard",
    "linear_to_srgb",
    "load_bank",
    "make_plan",
    "mask_bbox_with_margin",
    "read_score_csv",
    "rgb_to_lab",
    "sample_gamma",
    "sample_illuminant",
    "save_bank",
    "seg_metrics",
    "sensitivity",
    "specificity",
    "srgb_to_linear",
    "threshold_map",
    "tta_expand",
    "tta_median",
    "von_kries_cast",
    "von_kries_correct",
    "von_kries_gains",
]
