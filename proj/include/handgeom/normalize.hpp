#pragma once

#include <iosfwd>
#include <string>

#include "handgeom/imaging.hpp"

namespace handgeom {

enum class HandType { Left, Right };

std::string to_string(HandType t);
HandType hand_type_from_string(const std::string& s);

constexpr int kNormalizedWidth = 200;
constexpr int kNormalizedHeight = 300;

// Hand silhouette in the canonical frame: fingers toward row 0, wrist cut
// along the reference line, mask stretched to exactly 200x300.
struct NormalizedHand {
    BinaryImage mask;
    Contour contour;
    Point reference_point; // R, midpoint of AB
    Point line_a;          // leftmost foreground pixel on the reference row
    Point line_b;          // rightmost foreground pixel on the reference row
    HandType hand_type = HandType::Right;
};

struct NormalizeOptions {
    Polarity polarity = Polarity::BrightHand;
    int median_window = 3;
};

// Output of the reference-line step on an upright mask.
struct ReferencePlacement {
    BinaryImage mask; // guillotined: nothing below the reference row
    int reference_row = 0;
    Point line_a;
    Point line_b;
    Point reference_point;
};

// Rotates by the unique multiple of 90 degrees that makes the bounding box
// at least as tall as wide with the sparse (finger) mass toward row 0.
BinaryImage orient_upright(const BinaryImage& mask);

// Places line AB one tenth of the component height above the silhouette
// bottom, erases everything below it, and defines R as the midpoint of AB.
ReferencePlacement place_reference(const BinaryImage& mask);

// Left iff the leftmost remaining pixel sits lower than the rightmost one
// (the lower extreme is the thumb side).
HandType detect_hand_type(const BinaryImage& guillotined, const Point& reference_point);

// round((a+b)/2) with the exact-half tie broken toward the image midline,
// so the reference point mirrors exactly when the image does.
int reference_midpoint_col(int a_col, int b_col, int image_width);

// Full normalization: segmentation, upright orientation, guillotine, crop,
// rescale to 200x300, contour and reference recomputation, hand typing.
// A flat (single-intensity) input is reported as NoHandError.
NormalizedHand normalize(const GrayImage& raw, const NormalizeOptions& options = {});

// Skips segmentation; normalizes an existing silhouette mask.
NormalizedHand normalize_mask(const BinaryImage& mask);

// Debug sidecar: hand_type, R, A, B as `key=value` lines.
void write_normalize_sidecar(const NormalizedHand& hand, std::ostream& out);

} // namespace handgeom
