"""Hand-geometry biometric pipeline: normalization, landmarks, 26 geometric
features, minimum-distance matching and FAR/FRR/EER evaluation."""

from handgeom._core import (
    FEATURE_COUNT,
    NORMALIZED_HEIGHT,
    NORMALIZED_WIDTH,
    DistanceKind,
    GrayImage,
    GroundTruth,
    HandType,
    MatchResult,
    NormalizedHand,
    PipelineError,
    PopulationImage,
    SyntheticHand,
    TemplateDB,
    VerifyResult,
    eer,
    extract_features,
    features_of_image,
    generate,
    generate_population,
    identify,
    landmarks,
    load_image_gray,
    load_pgm,
    normalize,
    rates_at,
    row_distance,
    save_pgm,
    verify,
)

__all__ = [
    "FEATURE_COUNT",
    "NORMALIZED_HEIGHT",
    "NORMALIZED_WIDTH",
    "DistanceKind",
    "GrayImage",
    "GroundTruth",
    "HandType",
    "MatchResult",
    "NormalizedHand",
    "PipelineError",
    "PopulationImage",
    "SyntheticHand",
    "TemplateDB",
    "VerifyResult",
    "eer",
    "extract_features",
    "features_of_image",
    "generate",
    "generate_population",
    "identify",
    "landmarks",
    "load_image_gray",
    "load_pgm",
    "normalize",
    "rates_at",
    "row_distance",
    "save_pgm",
    "verify",
]
