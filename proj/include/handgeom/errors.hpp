#pragma once

#include <stdexcept>
#include <string>

namespace handgeom {

// Base class for every error raised by the pipeline.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Raster has non-positive dimensions or mismatched buffer size.
struct DimensionError : Error { using Error::Error; };

// Invalid argument outside the raster itself (window size, fraction, ...).
struct ParameterError : Error { using Error::Error; };

// Histogram admits no split with two non-empty classes.
struct DegenerateHistogramError : Error { using Error::Error; };

// No foreground pixels where a hand silhouette is required.
struct NoHandError : Error { using Error::Error; };

// Silhouette exists but its boundary cannot be walked / guillotined sanely.
struct MalformedSilhouetteError : Error { using Error::Error; };

// No rotation in {0,90,180,270} puts the hand upright unambiguously.
struct AmbiguousOrientationError : Error { using Error::Error; };

// Extreme pixels LM and RM sit on the same row; thumb side undecidable.
struct AmbiguousHandTypeError : Error { using Error::Error; };

// Radial profile lacks five separated maxima.
struct FingersTouchingError : Error { using Error::Error; };

// Contour arc needed by a landmark rule is empty or too short.
struct MalformedContourError : Error { using Error::Error; };

// Finger geometry collapsed (coincident valleys, tip below baseline).
struct DegenerateFingerError : Error { using Error::Error; };

// Width probe line found fewer than two contour crossings.
struct FingerOcclusionError : Error { using Error::Error; };

// Synthetic hand specification violates its invariants.
struct InvalidSpecError : Error { using Error::Error; };

struct EmptyDatabaseError : Error { using Error::Error; };
struct UnknownIdentityError : Error { using Error::Error; };
struct DuplicateIdentityError : Error { using Error::Error; };

// Score set lacks a genuine or an impostor sample.
struct InsufficientSamplesError : Error { using Error::Error; };

// File reading/writing/parsing failure.
struct IoError : Error { using Error::Error; };

} // namespace handgeom
