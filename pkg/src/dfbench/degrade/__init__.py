"""Deterministic, seeded image-degradation engine."""

from .profile import (
    PHASES,
    DegradationProfile,
    InvalidProfileError,
    ProfileEntry,
    default_profiles,
    load_profiles,
    parse_profiles,
    sample_recipe,
    save_profiles,
    validate_ladder,
)
from .recipe import DegradationRecipe, apply_recipe
from .steps import (
    KINDS,
    DegradationStep,
    InvalidParameterError,
    PlacementImpossibleError,
    apply_step,
    color_contrast,
    gaussian_blur,
    gaussian_kernel,
    gaussian_noise,
    grayscale,
    jpeg,
    pixelate,
    poisson_noise,
    resize,
    salt_pepper,
    self_overlay,
    speckle_noise,
    text_distractor,
)

__all__ = [
    "PHASES",
    "KINDS",
    "DegradationStep",
    "DegradationRecipe",
    "DegradationProfile",
    "ProfileEntry",
    "InvalidParameterError",
    "InvalidProfileError",
    "PlacementImpossibleError",
    "apply_step",
    "apply_recipe",
    "sample_recipe",
    "default_profiles",
    "load_profiles",
    "parse_profiles",
    "save_profiles",
    "validate_ladder",
    "gaussian_kernel",
    "gaussian_noise",
    "poisson_noise",
    "speckle_noise",
    "salt_pepper",
    "jpeg",
    "gaussian_blur",
    "resize",
    "color_contrast",
    "grayscale",
    "pixelate",
    "self_overlay",
    "text_distractor",
]
