#pragma once

#include <array>
#include <iosfwd>

#include "handgeom/normalize.hpp"

namespace handgeom {

// Finger index convention used across the pipeline.
enum Finger { kThumb = 0, kIndex = 1, kMiddle = 2, kRing = 3, kLittle = 4 };

// The 12 silhouette key points. Tips run thumb..little; valleys are the
// true inter-finger points [thumb-index, index-middle, middle-ring,
// ring-little]; mirrored valleys sit on the outer side of thumb, index and
// little finger at the tip-to-valley distance of the known valley.
struct LandmarkSet {
    std::array<Point, 5> tips;
    std::array<Point, 4> valleys;
    std::array<Point, 3> mirrored_valleys;
};

std::array<Point, 5> locate_tips(const NormalizedHand& hand);

std::array<Point, 4> locate_valleys(const NormalizedHand& hand, const std::array<Point, 5>& tips);

std::array<Point, 3> mirror_valleys(const NormalizedHand& hand,
                                    const std::array<Point, 5>& tips,
                                    const std::array<Point, 4>& valleys);

LandmarkSet locate_landmarks(const NormalizedHand& hand);

// Debug dump: 12 lines of `name row col`.
void write_landmarks_text(const LandmarkSet& lm, std::ostream& out);

// Normalized mask rendered as PGM gray levels with 3x3 landmark markers.
GrayImage annotate_landmarks(const NormalizedHand& hand, const LandmarkSet& lm);

} // namespace handgeom
