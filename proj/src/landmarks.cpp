#include "handgeom/landmarks.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace handgeom {

namespace {

// Open boundary path from A over the fingers to B. Points keep their index
// in the traced contour for tie-breaking.
struct FingerArc {
    std::vector<Point> pts;
    std::vector<double> dist; // Euclidean distance from R
    std::vector<int> orig;
};

int find_point(const Contour& ct, const Point& p) {
    for (std::size_t i = 0; i < ct.size(); ++i)
        if (ct[i] == p) return static_cast<int>(i);
    return -1;
}

FingerArc build_arc(const NormalizedHand& h) {
    const Contour& ct = h.contour;
    const int n = static_cast<int>(ct.size());
    const int ia = find_point(ct, h.line_a);
    const int ib = find_point(ct, h.line_b);
    if (ia < 0 || ib < 0 || ia == ib)
        throw MalformedContourError("reference endpoints not on the contour");

    // Global farthest point from R marks the finger side of the loop.
    int gmax = 0;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
        double d = squared_distance(ct[i], h.reference_point);
        if (d > best) {
            best = d;
            gmax = i;
        }
    }

    auto forward_len = [n](int from, int to) { return (to - from + n) % n; };
    bool forward = forward_len(ia, gmax) <= forward_len(ia, ib);

    FingerArc arc;
    int len = forward ? forward_len(ia, ib) : forward_len(ib, ia);
    arc.pts.reserve(len + 1);
    for (int k = 0, i = ia;; i = forward ? (i + 1) % n : (i - 1 + n) % n, ++k) {
        arc.pts.push_back(ct[i]);
        arc.orig.push_back(i);
        if (i == ib) break;
        if (k > n)
            throw MalformedContourError("contour walk failed to reach B");
    }
    arc.dist.reserve(arc.pts.size());
    for (const auto& p : arc.pts)
        arc.dist.push_back(distance(p, h.reference_point));
    return arc;
}

// Argmax of the radial profile on [lo, hi]; ties go to the smaller traced
// contour index.
int argmax_range(const FingerArc& arc, int lo, int hi) {
    int best = lo;
    for (int i = lo + 1; i <= hi; ++i)
        if (arc.dist[i] > arc.dist[best] ||
            (arc.dist[i] == arc.dist[best] && arc.orig[i] < arc.orig[best]))
            best = i;
    return best;
}

int argmin_range(const FingerArc& arc, int lo, int hi) {
    int best = lo;
    for (int i = lo + 1; i <= hi; ++i)
        if (arc.dist[i] < arc.dist[best] ||
            (arc.dist[i] == arc.dist[best] && arc.orig[i] < arc.orig[best]))
            best = i;
    return best;
}

// Quantization of the boundary makes the profile wiggle by a pixel; the
// lookahead window rides over that.
constexpr int kLookahead = 5;

// Climb to the local maximum of the lobe containing i.
int climb_to_peak(const FingerArc& arc, int i) {
    const int n = static_cast<int>(arc.pts.size());
    for (;;) {
        int best = i;
        for (int d = -kLookahead; d <= kLookahead; ++d) {
            int j = std::clamp(i + d, 0, n - 1);
            if (arc.dist[j] > arc.dist[best]) best = j;
        }
        if (best == i) return i;
        i = best;
    }
}

// Walk from a peak toward `limit` down to the adjacent profile minimum.
int descend_to_min(const FingerArc& arc, int i, int limit) {
    const int dir = limit > i ? 1 : -1;
    int cur = i;
    while (cur != limit) {
        int best = cur;
        for (int s = 1; s <= kLookahead; ++s) {
            int j = cur + s * dir;
            if ((dir > 0 && j > limit) || (dir < 0 && j < limit)) break;
            if (arc.dist[j] < arc.dist[best]) best = j;
        }
        if (best == cur) break;
        cur = best;
    }
    return cur;
}

// Interior peak strictly between two located tips: trim the endpoint lobes
// down to their adjacent minima, then take the argmax of what remains.
int peak_between(const FingerArc& arc, int tip_a, int tip_b) {
    int lo = std::min(tip_a, tip_b), hi = std::max(tip_a, tip_b);
    int m_lo = descend_to_min(arc, lo, hi);
    int m_hi = descend_to_min(arc, hi, lo);
    if (m_lo >= m_hi)
        throw FingersTouchingError("no separated maximum between adjacent fingers");
    int peak = argmax_range(arc, m_lo, m_hi);
    if (arc.dist[peak] <= arc.dist[m_lo] || arc.dist[peak] <= arc.dist[m_hi])
        throw FingersTouchingError("no separated maximum between adjacent fingers");
    return peak;
}

int extreme_column_index(const FingerArc& arc, bool want_max_col) {
    int best = 0;
    const int n = static_cast<int>(arc.pts.size());
    for (int i = 1; i < n; ++i) {
        const Point& p = arc.pts[i];
        const Point& q = arc.pts[best];
        bool better = want_max_col ? p.col > q.col : p.col < q.col;
        if (better || (p.col == q.col && p.row > q.row)) best = i;
    }
    return best;
}

struct TipIndices {
    std::array<int, 5> arc_index; // thumb..little
};

TipIndices locate_tip_indices(const FingerArc& arc, HandType hand) {
    TipIndices t{};

    t.arc_index[kMiddle] = argmax_range(arc, 0, static_cast<int>(arc.pts.size()) - 1);

    const bool thumb_is_max_col = hand == HandType::Right;
    t.arc_index[kThumb] = climb_to_peak(arc, extreme_column_index(arc, thumb_is_max_col));
    t.arc_index[kLittle] = climb_to_peak(arc, extreme_column_index(arc, !thumb_is_max_col));

    if (t.arc_index[kThumb] == t.arc_index[kMiddle] || t.arc_index[kLittle] == t.arc_index[kMiddle] ||
        t.arc_index[kThumb] == t.arc_index[kLittle])
        throw FingersTouchingError("tip candidates collapsed onto one lobe");

    t.arc_index[kIndex] = peak_between(arc, t.arc_index[kThumb], t.arc_index[kMiddle]);
    t.arc_index[kRing] = peak_between(arc, t.arc_index[kMiddle], t.arc_index[kLittle]);

    // Tips must alternate with interior minima along the arc.
    std::array<int, 5> order = t.arc_index;
    std::sort(order.begin(), order.end());
    for (int i = 0; i + 1 < 5; ++i)
        if (order[i] == order[i + 1])
            throw FingersTouchingError("fewer than five separated finger lobes");
    return t;
}

int arc_index_of(const FingerArc& arc, const Point& p) {
    for (std::size_t i = 0; i < arc.pts.size(); ++i)
        if (arc.pts[i] == p) return static_cast<int>(i);
    throw MalformedContourError("landmark point is not on the contour");
}

} // namespace

std::array<Point, 5> locate_tips(const NormalizedHand& hand) {
    FingerArc arc = build_arc(hand);
    TipIndices t = locate_tip_indices(arc, hand.hand_type);
    std::array<Point, 5> tips;
    for (int f = 0; f < 5; ++f) tips[f] = arc.pts[t.arc_index[f]];
    return tips;
}

std::array<Point, 4> locate_valleys(const NormalizedHand& hand, const std::array<Point, 5>& tips) {
    FingerArc arc = build_arc(hand);
    std::array<Point, 4> valleys;
    for (int f = 0; f < 4; ++f) {
        int a = arc_index_of(arc, tips[f]);
        int b = arc_index_of(arc, tips[f + 1]);
        int lo = std::min(a, b) + 1, hi = std::max(a, b) - 1;
        if (lo > hi)
            throw MalformedContourError("empty arc between adjacent finger tips");
        valleys[f] = arc.pts[argmin_range(arc, lo, hi)];
    }
    return valleys;
}

std::array<Point, 3> mirror_valleys(const NormalizedHand& hand, const std::array<Point, 5>& tips,
                                    const std::array<Point, 4>& valleys) {
    FingerArc arc = build_arc(hand);

    // finger, its known true valley
    const std::pair<int, int> plan[3] = {{kThumb, 0}, {kIndex, 1}, {kLittle, 3}};

    std::array<Point, 3> out;
    for (int k = 0; k < 3; ++k) {
        auto [finger, valley] = plan[k];
        int i_tip = arc_index_of(arc, tips[finger]);
        int i_val = arc_index_of(arc, valleys[valley]);
        double d = distance(tips[finger], valleys[valley]);

        const int dir = i_val > i_tip ? -1 : 1; // walk the outer side
        const int n = static_cast<int>(arc.pts.size());
        int j = i_tip;
        for (;;) {
            j += dir;
            if (j < 0 || j >= n)
                throw MalformedContourError("contour ends before the mirrored valley distance");
            if (distance(arc.pts[j], tips[finger]) >= d) break;
        }
        out[k] = arc.pts[j];
    }
    return out;
}

LandmarkSet locate_landmarks(const NormalizedHand& hand) {
    LandmarkSet lm;
    lm.tips = locate_tips(hand);
    lm.valleys = locate_valleys(hand, lm.tips);
    lm.mirrored_valleys = mirror_valleys(hand, lm.tips, lm.valleys);
    return lm;
}

void write_landmarks_text(const LandmarkSet& lm, std::ostream& out) {
    static const char* tip_names[5] = {"thumb_tip", "index_tip", "middle_tip", "ring_tip",
                                       "little_tip"};
    static const char* valley_names[4] = {"valley_thumb_index", "valley_index_middle",
                                          "valley_middle_ring", "valley_ring_little"};
    static const char* mirror_names[3] = {"mirror_thumb_outer", "mirror_index_outer",
                                          "mirror_little_outer"};
    for (int i = 0; i < 5; ++i)
        out << tip_names[i] << " " << lm.tips[i].row << " " << lm.tips[i].col << "\n";
    for (int i = 0; i < 4; ++i)
        out << valley_names[i] << " " << lm.valleys[i].row << " " << lm.valleys[i].col << "\n";
    for (int i = 0; i < 3; ++i)
        out << mirror_names[i] << " " << lm.mirrored_valleys[i].row << " "
            << lm.mirrored_valleys[i].col << "\n";
}

GrayImage annotate_landmarks(const NormalizedHand& hand, const LandmarkSet& lm) {
    GrayImage img(hand.mask.width(), hand.mask.height());
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c)
            img.at(r, c) = hand.mask.at(r, c) ? 180 : 0;

    auto burn = [&](const Point& p) {
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
                int r = p.row + dr, c = p.col + dc;
                if (r >= 0 && r < img.height() && c >= 0 && c < img.width()) img.at(r, c) = 255;
            }
    };
    for (const auto& p : lm.tips) burn(p);
    for (const auto& p : lm.valleys) burn(p);
    for (const auto& p : lm.mirrored_valleys) burn(p);
    return img;
}

} // namespace handgeom
