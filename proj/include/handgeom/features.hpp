#pragma once

#include <array>
#include <iosfwd>

#include "handgeom/landmarks.hpp"

namespace handgeom {

constexpr int kFeatureCount = 26;

// Fixed measurement order:
//   f1-f5    finger lengths, thumb..little
//   f6-f15   finger widths at 1/3 then 2/3 of the length, thumb..little
//   f16-f20  finger baseline widths, thumb..little
//   f21-f22  palm widths (upper = across mirrored valleys, lower = |AB|)
//   f23-f26  palm-line midpoint to baseline midpoints, index..little
using FeatureVector = std::array<double, kFeatureCount>;

// One finger's measurement inputs: its tip and the two baseline endpoints
// (true valley plus true-or-mirrored valley).
struct FingerLandmarks {
    Point tip;
    Point valley_a;
    Point valley_b;
};

struct Segment {
    PointF a;
    PointF b;

    double length() const { return distance(a, b); }
    PointF mid() const { return midpoint(a, b); }
};

// Baseline endpoints per finger, assembled from the landmark set.
std::array<FingerLandmarks, 5> finger_landmarks(const LandmarkSet& lm);

// Segment joining the finger's two valley points.
Segment finger_baseline(const FingerLandmarks& finger);

// Tip to baseline midpoint.
double finger_length(const FingerLandmarks& finger);

// Width of the finger measured perpendicular to its axis at the given
// fraction of the length from the baseline midpoint toward the tip; uses
// the contour crossings nearest the axis on either side.
double finger_width_at(const FingerLandmarks& finger, const Contour& contour, double fraction);

// (upper, lower) palm widths: across the outer mirrored valleys, and |AB|.
std::pair<double, double> palm_widths(const NormalizedHand& hand, const LandmarkSet& lm);

// Distances from the upper palm line's midpoint to the baseline midpoints
// of index, middle, ring and little finger.
std::array<double, 4> palm_baseline_distances(const NormalizedHand& hand, const LandmarkSet& lm);

FeatureVector extract_features(const NormalizedHand& hand);
FeatureVector extract_features(const NormalizedHand& hand, const LandmarkSet& lm);

// One CSV line: subject_id,hand_type,f1,...,f26 with 6 decimal places.
void write_feature_row(std::ostream& out, const std::string& subject_id, HandType hand,
                       const FeatureVector& values);

} // namespace handgeom
