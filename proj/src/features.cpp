#include "handgeom/features.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace handgeom {

std::array<FingerLandmarks, 5> finger_landmarks(const LandmarkSet& lm) {
    // Baselines pair the true valley with either the adjacent true valley
    // (middle, ring) or the mirrored valley on the outer side (thumb,
    // index, little).
    return {{
        {lm.tips[kThumb], lm.mirrored_valleys[0], lm.valleys[0]},
        {lm.tips[kIndex], lm.mirrored_valleys[1], lm.valleys[1]},
        {lm.tips[kMiddle], lm.valleys[1], lm.valleys[2]},
        {lm.tips[kRing], lm.valleys[2], lm.valleys[3]},
        {lm.tips[kLittle], lm.valleys[3], lm.mirrored_valleys[2]},
    }};
}

Segment finger_baseline(const FingerLandmarks& finger) {
    if (finger.valley_a == finger.valley_b)
        throw DegenerateFingerError("coincident valley points");
    return {to_f(finger.valley_a), to_f(finger.valley_b)};
}

double finger_length(const FingerLandmarks& finger) {
    Segment base = finger_baseline(finger);
    PointF mid = base.mid();
    if (finger.tip.row > mid.row)
        throw DegenerateFingerError("tip below its baseline midpoint");
    return distance(to_f(finger.tip), mid);
}

double finger_width_at(const FingerLandmarks& finger, const Contour& contour, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw ParameterError("width fraction must lie in (0,1)");

    Segment base = finger_baseline(finger);
    PointF mid = base.mid();
    PointF tip = to_f(finger.tip);
    double axis_len = distance(tip, mid);
    if (axis_len <= 0.0)
        throw DegenerateFingerError("zero-length finger axis");

    PointF u = normalized(tip - mid); // along the axis, baseline -> tip
    PointF nvec = perp(u);            // lateral direction
    PointF q = mid + fraction * (tip - mid);

    // Collect contour crossings of the perpendicular line through q,
    // described by axial coordinate 0.
    double nearest_pos = std::numeric_limits<double>::infinity();
    double nearest_neg = -std::numeric_limits<double>::infinity();
    bool has_pos = false, has_neg = false;

    auto record = [&](double s) {
        if (s >= 0.0 && s < nearest_pos) {
            nearest_pos = s;
            has_pos = true;
        }
        if (s <= 0.0 && s > nearest_neg) {
            nearest_neg = s;
            has_neg = true;
        }
    };

    const std::size_t n = contour.size();
    for (std::size_t i = 0; i < n; ++i) {
        PointF p0 = to_f(contour[i]);
        PointF p1 = to_f(contour[(i + 1) % n]);
        double t0 = dot(p0 - q, u);
        double t1 = dot(p1 - q, u);
        if (t0 == 0.0) {
            record(dot(p0 - q, nvec));
        } else if (t1 != 0.0 && (t0 > 0.0) != (t1 > 0.0)) {
            double alpha = t0 / (t0 - t1);
            double s0 = dot(p0 - q, nvec);
            double s1 = dot(p1 - q, nvec);
            record(s0 + alpha * (s1 - s0));
        }
    }
    if (!has_pos || !has_neg)
        throw FingerOcclusionError("width line does not cross the finger on both sides");
    return nearest_pos - nearest_neg;
}

std::pair<double, double> palm_widths(const NormalizedHand& hand, const LandmarkSet& lm) {
    double upper = distance(lm.mirrored_valleys[0], lm.mirrored_valleys[2]);
    double lower = distance(hand.line_a, hand.line_b);
    return {upper, lower};
}

std::array<double, 4> palm_baseline_distances(const NormalizedHand&, const LandmarkSet& lm) {
    PointF palm_mid = midpoint(to_f(lm.mirrored_valleys[0]), to_f(lm.mirrored_valleys[2]));
    auto fingers = finger_landmarks(lm);
    std::array<double, 4> out{};
    for (int f = kIndex; f <= kLittle; ++f)
        out[f - kIndex] = distance(palm_mid, finger_baseline(fingers[f]).mid());
    return out;
}

FeatureVector extract_features(const NormalizedHand& hand) {
    return extract_features(hand, locate_landmarks(hand));
}

FeatureVector extract_features(const NormalizedHand& hand, const LandmarkSet& lm) {
    auto fingers = finger_landmarks(lm);
    FeatureVector v{};

    for (int f = 0; f < 5; ++f) v[f] = finger_length(fingers[f]);

    for (int f = 0; f < 5; ++f) {
        v[5 + 2 * f] = finger_width_at(fingers[f], hand.contour, 1.0 / 3.0);
        v[5 + 2 * f + 1] = finger_width_at(fingers[f], hand.contour, 2.0 / 3.0);
    }

    for (int f = 0; f < 5; ++f) v[15 + f] = finger_baseline(fingers[f]).length();

    auto [upper, lower] = palm_widths(hand, lm);
    v[20] = upper;
    v[21] = lower;

    auto dists = palm_baseline_distances(hand, lm);
    for (int i = 0; i < 4; ++i) v[22 + i] = dists[i];
    return v;
}

void write_feature_row(std::ostream& out, const std::string& subject_id, HandType hand,
                       const FeatureVector& values) {
    out << subject_id << "," << to_string(hand);
    out << std::fixed << std::setprecision(6);
    for (double v : values) out << "," << v;
    out << "\n";
    out.unsetf(std::ios_base::floatfield);
}

} // namespace handgeom
