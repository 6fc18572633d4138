#include "handgeom/synth.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <atomic>
#include <mutex>
#include <random>
#include <thread>
#include <sstream>

namespace handgeom {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kHandLevel = 235.0;
constexpr double kBackgroundLevel = 15.0;

// Deterministic random helpers; raw mt19937_64 words are mapped by hand so
// sequences do not depend on the standard library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double gaussian(double sigma) {
        double u1 = 1.0 - uniform(); // (0, 1]
        double u2 = uniform();
        return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    bool chance(double p) { return uniform() < p; }

private:
    std::mt19937_64 eng_;
};

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return x;
}

double cross(const PointF& a, const PointF& b) { return a.row * b.col - a.col * b.row; }

struct ConvexPoly {
    std::vector<PointF> v;

    bool contains(const PointF& p) const {
        bool pos = false, neg = false;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const PointF& a = v[i];
            const PointF& b = v[(i + 1) % v.size()];
            double c = cross(b - a, p - a);
            if (c > 0) pos = true;
            if (c < 0) neg = true;
            if (pos && neg) return false;
        }
        return true;
    }
};

struct SideLine {
    PointF anchor; // base end, on the palm boundary
    PointF tip;    // cap tangent point
};

struct FingerGeom {
    PointF base_mid;
    PointF axis_u; // unit, base toward tip
    PointF lat_n;  // unit lateral, +n is the thumb side of a right hand
    PointF cap_center;
    double cap_radius = 0.0;
    SideLine side_pos; // on the +n side
    SideLine side_neg;
    ConvexPoly quad;
};

// Full right-handed design-frame geometry; left hands mirror at render time.
struct DesignHand {
    std::array<FingerGeom, 5> fingers; // thumb..little
    ConvexPoly palm;
    std::array<ConvexPoly, 3> notches;  // index-middle, middle-ring, ring-little
    std::array<PointF, 3> notch_vertex; // matching webbing dip points
    PointF thumb_upper_anchor;          // thumb-index valley
    PointF tl, tr, wl, wr;              // palm corners
    double forearm_bottom = 0.0;
    double forearm_left = 0.0, forearm_right = 0.0;
    double wrist_row = 0.0;

    bool forearm_contains(const PointF& p) const {
        return p.row >= wrist_row && p.row <= forearm_bottom && p.col >= forearm_left &&
               p.col <= forearm_right;
    }

    bool contains(const PointF& p) const {
        for (const auto& f : fingers) {
            if (distance(p, f.cap_center) <= f.cap_radius) return true;
            if (f.quad.contains(p)) return true;
        }
        if (palm.contains(p)) {
            for (const auto& n : notches)
                if (n.contains(p)) return false;
            return true;
        }
        return forearm_contains(p);
    }
};

constexpr double kWristRow = 299.0;
constexpr double kForearmDrop = 46.0;

void check_parameters(const HandSpec& spec) {
    for (const auto& f : spec.fingers) {
        if (f.length < 40.0 || f.length > 140.0)
            throw InvalidSpecError("finger length outside [40,140]");
        if (f.tip_width > f.base_width)
            throw InvalidSpecError("tip width exceeds base width");
        if (f.base_width < 10.0 || f.base_width > 40.0)
            throw InvalidSpecError("base width outside [10,40]");
        if (f.tip_width < 6.0)
            throw InvalidSpecError("tip width below 6");
    }
    if (std::abs(spec.fingers[kThumb].splay_deg) < 40.0 || std::abs(spec.fingers[kThumb].splay_deg) > 72.0)
        throw InvalidSpecError("thumb splay outside [40,72] degrees");
    if (spec.palm_breadth < 90.0 || spec.palm_breadth > 150.0)
        throw InvalidSpecError("palm breadth outside [90,150]");
    if (spec.wrist_breadth < 45.0 || spec.wrist_breadth > spec.palm_breadth)
        throw InvalidSpecError("wrist breadth outside [45, palm breadth]");
    if (spec.valley_dip < 4.0 || spec.valley_dip > 20.0)
        throw InvalidSpecError("valley dip outside [4,20]");
    if (spec.thumb_anchor < 0.2 || spec.thumb_anchor > 0.5)
        throw InvalidSpecError("thumb anchor outside [0.2,0.5]");
    if (spec.knuckle_row < 100.0 || spec.knuckle_row > 135.0)
        throw InvalidSpecError("knuckle row outside [100,135]");
    if (spec.pose_deg != 0 && spec.pose_deg != 90 && spec.pose_deg != 180 && spec.pose_deg != 270)
        throw InvalidSpecError("pose must be a multiple of 90 degrees");
    if (spec.noise_sigma < 0.0 || spec.noise_sigma > 10.0)
        throw InvalidSpecError("noise sigma outside [0,10]");
    if (spec.canvas_width < 96 || spec.canvas_height < 96)
        throw InvalidSpecError("canvas smaller than 96x96");
}

PointF splay_axis(double splay_deg) {
    double rad = splay_deg * kPi / 180.0;
    return {-std::cos(rad), std::sin(rad)};
}

FingerGeom build_straight_finger(const FingerSpec& f, double anchor_col, double knuckle_row) {
    FingerGeom g;
    g.axis_u = splay_axis(f.splay_deg);
    g.lat_n = perp(g.axis_u);
    if (g.lat_n.col < 0) g.lat_n = -1.0 * g.lat_n; // +n points toward +col
    g.base_mid = {knuckle_row, anchor_col};

    double chord = (f.base_width / 2.0) / std::abs(g.axis_u.row);
    PointF anchor_pos{knuckle_row, anchor_col + chord};
    PointF anchor_neg{knuckle_row, anchor_col - chord};

    g.cap_center = g.base_mid + f.length * g.axis_u;
    g.cap_radius = f.tip_width / 2.0;
    PointF corner_pos = g.cap_center + g.cap_radius * g.lat_n;
    PointF corner_neg = g.cap_center - g.cap_radius * g.lat_n;

    g.side_pos = {anchor_pos, corner_pos};
    g.side_neg = {anchor_neg, corner_neg};
    g.quad.v = {anchor_neg, anchor_pos, corner_pos, corner_neg};
    return g;
}

DesignHand build_design(const HandSpec& spec) {
    check_parameters(spec);

    const double knuckle = spec.knuckle_row;
    const double pb = spec.palm_breadth;
    const double wb = spec.wrist_breadth;
    const double xc = 92.0;

    DesignHand d;
    d.tl = {knuckle, xc - pb / 2.0};
    d.tr = {knuckle, xc + pb / 2.0};
    d.wl = {kWristRow, xc - wb / 2.0};
    d.wr = {kWristRow, xc + wb / 2.0};
    d.palm.v = {d.tl, d.tr, d.wr, d.wl};
    d.wrist_row = kWristRow;
    d.forearm_bottom = kWristRow + kForearmDrop;
    d.forearm_left = d.wl.col;
    d.forearm_right = d.wr.col;

    // Main fingers left to right: little, ring, middle, index.
    const int order[4] = {kLittle, kRing, kMiddle, kIndex};
    double chords[4];
    double total = 0.0;
    for (int i = 0; i < 4; ++i) {
        const FingerSpec& f = spec.fingers[order[i]];
        PointF u = splay_axis(f.splay_deg);
        chords[i] = (f.base_width / 2.0) / std::abs(u.row);
        total += 2.0 * chords[i];
    }
    const double edge = 2.0;
    double gap = (pb - 2.0 * edge - total) / 3.0;
    if (gap < 5.0)
        throw InvalidSpecError("palm too narrow for the finger base widths");

    double x = d.tl.col + edge;
    PointF base_corner_right[4]; // +col corner of each finger, left to right
    PointF base_corner_left[4];
    for (int i = 0; i < 4; ++i) {
        double anchor_col = x + chords[i];
        d.fingers[order[i]] = build_straight_finger(spec.fingers[order[i]], anchor_col, knuckle);
        base_corner_left[i] = {knuckle, anchor_col - chords[i]};
        base_corner_right[i] = {knuckle, anchor_col + chords[i]};
        x += 2.0 * chords[i] + gap;
    }

    // Webbing notches carved between adjacent fingers; vertex order matches
    // the valley array [index-middle, middle-ring, ring-little].
    for (int i = 0; i < 3; ++i) {
        PointF a = base_corner_right[i];     // right corner of the left finger
        PointF b = base_corner_left[i + 1];  // left corner of the right finger
        PointF v{knuckle + spec.valley_dip, (a.col + b.col) / 2.0};
        int slot = 2 - i; // i=0 is ring-little (leftmost gap on a right hand)
        d.notches[slot].v = {a, b, v};
        d.notch_vertex[slot] = v;
    }

    // Thumb on the palm's right edge.
    {
        const FingerSpec& f = spec.fingers[kThumb];
        FingerGeom g;
        g.axis_u = splay_axis(f.splay_deg);
        g.lat_n = perp(g.axis_u);
        if (g.lat_n.col < 0) g.lat_n = -1.0 * g.lat_n;

        PointF edge_dir = normalized(d.wr - d.tr);
        double denom = std::abs(cross(edge_dir, g.axis_u));
        if (denom < 0.3)
            throw InvalidSpecError("thumb axis too parallel to the palm edge");
        double chord = (f.base_width / 2.0) / denom;

        PointF t0 = d.tr + spec.thumb_anchor * (d.wr - d.tr);
        PointF upper = t0 - chord * edge_dir;
        PointF lower = t0 + chord * edge_dir;
        if (upper.row <= knuckle + 4.0)
            throw InvalidSpecError("thumb base reaches the knuckle corner");
        if (lower.row >= kWristRow - 4.0)
            throw InvalidSpecError("thumb base reaches the wrist corner");

        g.base_mid = t0;
        g.cap_center = t0 + f.length * g.axis_u;
        g.cap_radius = f.tip_width / 2.0;
        PointF corner_pos = g.cap_center + g.cap_radius * g.lat_n;
        PointF corner_neg = g.cap_center - g.cap_radius * g.lat_n;
        g.side_pos = {lower, corner_pos};
        g.side_neg = {upper, corner_neg};
        g.quad.v = {upper, lower, corner_pos, corner_neg};
        d.fingers[kThumb] = g;
        d.thumb_upper_anchor = upper;
    }
    return d;
}

double segment_distance(const PointF& a0, const PointF& a1, const PointF& b0, const PointF& b1) {
    double best = std::numeric_limits<double>::infinity();
    const int steps = 16;
    auto point_seg = [](const PointF& p, const PointF& s0, const PointF& s1) {
        PointF d = s1 - s0;
        double len2 = dot(d, d);
        double t = len2 > 0 ? std::clamp(dot(p - s0, d) / len2, 0.0, 1.0) : 0.0;
        return distance(p, s0 + t * d);
    };
    for (int i = 0; i <= steps; ++i) {
        double t = static_cast<double>(i) / steps;
        best = std::min(best, point_seg(a0 + t * (a1 - a0), b0, b1));
        best = std::min(best, point_seg(b0 + t * (b1 - b0), a0, a1));
    }
    return best;
}

void check_finger_gaps(const DesignHand& d) {
    // Adjacent pairs along the silhouette of a right hand.
    const std::pair<int, int> pairs[4] = {
        {kLittle, kRing}, {kRing, kMiddle}, {kMiddle, kIndex}, {kIndex, kThumb}};
    for (auto [a, b] : pairs) {
        const FingerGeom& fa = d.fingers[a];
        const FingerGeom& fb = d.fingers[b];
        // facing sides: +n of the left finger vs -n of the right finger
        double gap = segment_distance(fa.side_pos.anchor, fa.side_pos.tip, fb.side_neg.anchor,
                                      fb.side_neg.tip);
        gap = std::min(gap, distance(fa.cap_center, fb.cap_center) - fa.cap_radius - fb.cap_radius);
        if (gap < 4.0)
            throw InvalidSpecError("adjacent fingers closer than 4 px");
    }
}

// ---------------------------------------------------------------------------
// rendering and frame mapping

struct Affine1 {
    double scale = 1.0;
    double offset = 0.0;
    double apply(double x) const { return scale * x + offset; }
};

struct FrameMap {
    Affine1 row, col; // design -> normalized, mirroring folded into col
    PointF apply(const PointF& p) const { return {row.apply(p.row), col.apply(p.col)}; }
};

struct RenderResult {
    BinaryImage upright_mask;  // noise-free, pose 0
    FrameMap to_normalized;
    Point reference_point; // normalized frame
    Point line_a;
    Point line_b;
};

// Independent binary 3x3 majority, mirroring what median filtering does to
// a two-level image.
BinaryImage majority3(const BinaryImage& in) {
    const int w = in.width(), h = in.height();
    BinaryImage out(w, h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            int count = 0;
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    int rr = std::clamp(r + dr, 0, h - 1);
                    int cc = std::clamp(c + dc, 0, w - 1);
                    count += in.at(rr, cc);
                }
            out.set(r, c, count >= 5);
        }
    return out;
}

RenderResult render_mask(const HandSpec& spec, const DesignHand& d) {
    // Design bounding box from the primitives.
    double top = std::numeric_limits<double>::infinity();
    double left = top, right = -top;
    for (const auto& f : d.fingers) {
        top = std::min(top, f.cap_center.row - f.cap_radius);
        left = std::min(left, f.cap_center.col - f.cap_radius);
        right = std::max(right, f.cap_center.col + f.cap_radius);
        for (const auto& p : f.quad.v) {
            top = std::min(top, p.row);
            left = std::min(left, p.col);
            right = std::max(right, p.col);
        }
    }
    left = std::min(left, d.wl.col);
    right = std::max(right, d.wr.col);
    double bottom = d.forearm_bottom;

    const int cw = spec.canvas_width, ch = spec.canvas_height;
    const double margin = 8.0;
    double s = std::min((ch - 2.0 * margin) / (bottom - top), (cw - 2.0 * margin) / (right - left));
    if (s < 0.35)
        throw InvalidSpecError("canvas too small for the hand geometry");
    double off_r = (ch - s * (bottom - top)) / 2.0 - s * top;
    double off_c = (cw - s * (right - left)) / 2.0 - s * left;

    const bool mirrored = spec.hand_type == HandType::Left;

    BinaryImage mask(cw, ch);
    int r0 = std::max(0, static_cast<int>(std::floor(s * top + off_r)) - 2);
    int r1 = std::min(ch - 1, static_cast<int>(std::ceil(s * bottom + off_r)) + 2);
    int c0 = std::max(0, static_cast<int>(std::floor(s * left + off_c)) - 2);
    int c1 = std::min(cw - 1, static_cast<int>(std::ceil(s * right + off_c)) + 2);
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            double cc = mirrored ? (cw - 1.0) - c : c;
            PointF p{(r - off_r) / s, (cc - off_c) / s};
            if (d.contains(p)) mask.set(r, c, true);
        }
    }

    // Trivial raster reductions on the eroded mask define the same frame
    // the pipeline's segmentation will see.
    BinaryImage eroded = majority3(mask);
    int m_top = ch, m_bottom = -1, m_left = cw, m_right = -1;
    for (int r = 0; r < ch; ++r)
        for (int c = 0; c < cw; ++c)
            if (eroded.at(r, c)) {
                m_top = std::min(m_top, r);
                m_bottom = std::max(m_bottom, r);
            }
    if (m_bottom < 0)
        throw InvalidSpecError("rendered silhouette is empty");
    int ref_row = m_bottom - static_cast<int>(std::lround(0.10 * (m_bottom - m_top + 1)));
    if (ref_row <= static_cast<int>(s * d.wrist_row + off_r) + 1)
        throw InvalidSpecError("guillotine row does not land on the forearm");

    int a_col = -1, b_col = -1;
    for (int c = 0; c < cw; ++c)
        if (eroded.at(ref_row, c)) {
            if (a_col < 0) a_col = c;
            b_col = c;
        }
    for (int r = m_top; r <= ref_row; ++r)
        for (int c = 0; c < cw; ++c)
            if (eroded.at(r, c)) {
                m_left = std::min(m_left, c);
                m_right = std::max(m_right, c);
            }

    double crop_h = ref_row - m_top + 1;
    double crop_w = m_right - m_left + 1;

    RenderResult out;
    out.upright_mask = std::move(mask);

    Affine1 raw_row{s, off_r};
    Affine1 raw_col = mirrored ? Affine1{-s, (cw - 1.0) - off_c} : Affine1{s, off_c};
    Affine1 norm_row{kNormalizedHeight / crop_h,
                     (0.5 - m_top) * kNormalizedHeight / crop_h - 0.5};
    Affine1 norm_col{kNormalizedWidth / crop_w, (0.5 - m_left) * kNormalizedWidth / crop_w - 0.5};
    out.to_normalized.row = {norm_row.scale * raw_row.scale,
                             norm_row.scale * raw_row.offset + norm_row.offset};
    out.to_normalized.col = {norm_col.scale * raw_col.scale,
                             norm_col.scale * raw_col.offset + norm_col.offset};

    auto nrow = [&](double r) { return static_cast<int>(std::lround(norm_row.apply(r))); };
    auto ncol = [&](double c) { return static_cast<int>(std::lround(norm_col.apply(c))); };
    out.line_a = {nrow(ref_row), ncol(a_col)};
    out.line_b = {nrow(ref_row), ncol(b_col)};
    out.reference_point = {out.line_a.row, reference_midpoint_col(out.line_a.col, out.line_b.col,
                                                                  kNormalizedWidth)};
    return out;
}

GrayImage rotate_gray(const GrayImage& in, int pose_deg) {
    if (pose_deg == 0) return in;
    if (pose_deg == 180) {
        GrayImage out(in.width(), in.height());
        for (int r = 0; r < out.height(); ++r)
            for (int c = 0; c < out.width(); ++c)
                out.at(r, c) = in.at(in.height() - 1 - r, in.width() - 1 - c);
        return out;
    }
    GrayImage out(in.height(), in.width());
    for (int r = 0; r < out.height(); ++r)
        for (int c = 0; c < out.width(); ++c)
            out.at(r, c) = pose_deg == 90 ? in.at(in.height() - 1 - c, r)
                                          : in.at(c, in.width() - 1 - r);
    return out;
}

// ---------------------------------------------------------------------------
// ground truth in the normalized frame

struct MappedFinger {
    PointF cap_center_d; // design frame
    double cap_radius_d = 0.0;
    PointF axis_u_d;
    PointF lat_n_d;
    SideLine side_pos_n; // normalized frame
    SideLine side_neg_n;
};

PointF cap_point(const MappedFinger& f, double phi) {
    return f.cap_center_d +
           f.cap_radius_d * (std::cos(phi) * f.axis_u_d + std::sin(phi) * f.lat_n_d);
}

// Farthest point from R on the mapped cap arc: the definition every tip
// rule in the pipeline reduces to.
PointF cap_argmax_from(const MappedFinger& f, const FrameMap& map, const PointF& r_n) {
    PointF best{};
    double best_d = -1.0;
    for (int i = 0; i <= 720; ++i) {
        double phi = -kPi / 2.0 + kPi * i / 720.0;
        PointF p = map.apply(cap_point(f, phi));
        double d = distance(p, r_n);
        if (d > best_d) {
            best_d = d;
            best = p;
        }
    }
    return best;
}

// Minimum-distance point from R over a mapped polyline, densely sampled.
std::pair<PointF, double> polyline_argmin_from(const std::vector<PointF>& pts_n, const PointF& r_n) {
    PointF best = pts_n.front();
    double best_d = distance(best, r_n);
    for (std::size_t i = 0; i + 1 < pts_n.size(); ++i) {
        double len = distance(pts_n[i], pts_n[i + 1]);
        int steps = std::max(1, static_cast<int>(len * 4.0));
        for (int k = 0; k <= steps; ++k) {
            PointF p = pts_n[i] + (static_cast<double>(k) / steps) * (pts_n[i + 1] - pts_n[i]);
            double d = distance(p, r_n);
            if (d < best_d) {
                best_d = d;
                best = p;
            }
        }
    }
    return {best, best_d};
}

// First point along a mapped polyline at distance >= d from `from`.
PointF first_crossing(const std::vector<PointF>& pts_n, const PointF& from, double dist_target) {
    for (std::size_t i = 0; i + 1 < pts_n.size(); ++i) {
        PointF a = pts_n[i], b = pts_n[i + 1];
        PointF delta = b - a;
        double c2 = dot(delta, delta);
        if (c2 <= 0) continue;
        double c1 = 2.0 * dot(a - from, delta);
        double c0 = dot(a - from, a - from) - dist_target * dist_target;
        double disc = c1 * c1 - 4.0 * c2 * c0;
        if (disc < 0) continue;
        double t = (-c1 + std::sqrt(disc)) / (2.0 * c2); // upward crossing
        if (t >= 0.0 && t <= 1.0 && distance(a, from) <= dist_target)
            return a + t * delta;
    }
    throw InvalidSpecError("mirrored valley distance not reachable on the outer contour");
}

// Intersection of a side line with the perpendicular of `axis_u` through q.
PointF side_crossing(const SideLine& side, const PointF& q, const PointF& axis_u) {
    PointF delta = side.tip - side.anchor;
    double denom = dot(delta, axis_u);
    if (std::abs(denom) < 1e-9)
        throw InvalidSpecError("width line parallel to a finger side");
    double w = dot(q - side.anchor, axis_u) / denom;
    if (w < 0.02 || w > 0.98)
        throw InvalidSpecError("width line leaves the finger side segment");
    return side.anchor + w * delta;
}

struct TruthBuild {
    std::array<PointF, 5> tips;
    std::array<PointF, 4> valleys;
    std::array<PointF, 3> mirrors;
    std::array<MappedFinger, 5> fingers;
};

Point round_point(const PointF& p) {
    return {static_cast<int>(std::lround(p.row)), static_cast<int>(std::lround(p.col))};
}

TruthBuild build_truth(const DesignHand& d, const RenderResult& rr) {
    const FrameMap& map = rr.to_normalized;
    const PointF r_n = to_f(rr.reference_point);

    TruthBuild t;
    for (int f = 0; f < 5; ++f) {
        const FingerGeom& g = d.fingers[f];
        MappedFinger m;
        m.cap_center_d = g.cap_center;
        m.cap_radius_d = g.cap_radius;
        m.axis_u_d = g.axis_u;
        m.lat_n_d = g.lat_n;
        m.side_pos_n = {map.apply(g.side_pos.anchor), map.apply(g.side_pos.tip)};
        m.side_neg_n = {map.apply(g.side_neg.anchor), map.apply(g.side_neg.tip)};
        t.fingers[f] = m;
        t.tips[f] = cap_argmax_from(m, map, r_n);
    }

    // Middle tip must dominate every other lobe for the radial rule.
    double mid_d = distance(t.tips[kMiddle], r_n);
    for (int f = 0; f < 5; ++f)
        if (f != kMiddle && distance(t.tips[f], r_n) > mid_d - 3.0)
            throw InvalidSpecError("middle finger does not dominate the radial profile");

    // True valleys. The thumb-index valley is the thumb's upper base
    // anchor; validate each claim against a dense scan of its path.
    const FingerGeom& thumb = d.fingers[kThumb];
    const FingerGeom& index = d.fingers[kIndex];
    {
        std::vector<PointF> path_n = {
            map.apply(index.side_pos.anchor), map.apply(d.tr), map.apply(d.thumb_upper_anchor),
            map.apply(thumb.side_neg.tip)};
        auto [best, best_d] = polyline_argmin_from(path_n, r_n);
        PointF claimed = map.apply(d.thumb_upper_anchor);
        if (distance(best, claimed) > 1.5)
            throw InvalidSpecError("thumb-index valley is not at the thumb base anchor");
        t.valleys[0] = claimed;
        (void)best_d;
    }
    for (int i = 0; i < 3; ++i) {
        const ConvexPoly& notch = d.notches[i];
        std::vector<PointF> path_n = {map.apply(notch.v[0]), map.apply(notch.v[2]),
                                      map.apply(notch.v[1])};
        auto [best, best_d] = polyline_argmin_from(path_n, r_n);
        PointF claimed = map.apply(d.notch_vertex[i]);
        if (distance(best, claimed) > 1.5)
            throw InvalidSpecError("webbing valley is not at the notch vertex");
        t.valleys[i + 1] = claimed;
        (void)best_d;
    }

    // Valleys must sit strictly below their adjacent tips in the radial
    // profile, or the landmark scan cannot separate the lobes.
    for (int i = 0; i < 4; ++i) {
        double dv = distance(t.valleys[i], r_n);
        if (dv + 2.0 > distance(t.tips[i], r_n) || dv + 2.0 > distance(t.tips[i + 1], r_n))
            throw InvalidSpecError("valley not separated from its adjacent tips");
    }

    // Mirrored valleys: first crossing at the tip-to-valley distance along
    // the outer side.
    const FingerGeom& little = d.fingers[kLittle];
    {
        double dist_t = distance(t.tips[kThumb], t.valleys[0]);
        if (dist_t < 2.0 * thumb.cap_radius + 2.0)
            throw InvalidSpecError("thumb valley distance shorter than the cap");
        std::vector<PointF> path_n = {map.apply(thumb.side_pos.tip), map.apply(thumb.side_pos.anchor),
                                      map.apply(d.wr),
                                      map.apply(PointF{d.forearm_bottom, d.forearm_right})};
        t.mirrors[0] = first_crossing(path_n, t.tips[kThumb], dist_t);
    }
    {
        double dist_i = distance(t.tips[kIndex], t.valleys[1]);
        if (dist_i < 2.0 * index.cap_radius + 2.0)
            throw InvalidSpecError("index valley distance shorter than the cap");
        std::vector<PointF> path_n = {map.apply(index.side_pos.tip), map.apply(index.side_pos.anchor),
                                      map.apply(d.tr), map.apply(d.thumb_upper_anchor)};
        t.mirrors[1] = first_crossing(path_n, t.tips[kIndex], dist_i);
    }
    {
        double dist_l = distance(t.tips[kLittle], t.valleys[3]);
        if (dist_l < 2.0 * little.cap_radius + 2.0)
            throw InvalidSpecError("little valley distance shorter than the cap");
        std::vector<PointF> path_n = {map.apply(little.side_neg.tip), map.apply(little.side_neg.anchor),
                                      map.apply(d.tl), map.apply(d.wl),
                                      map.apply(PointF{d.forearm_bottom, d.forearm_left})};
        t.mirrors[2] = first_crossing(path_n, t.tips[kLittle], dist_l);
    }

    // Everything must stay above the reference line.
    for (const auto& p : t.tips)
        if (p.row > r_n.row - 5.0)
            throw InvalidSpecError("tip below the reference line");
    for (const auto& p : t.valleys)
        if (p.row > r_n.row - 5.0)
            throw InvalidSpecError("valley below the reference line");
    for (const auto& p : t.mirrors)
        if (p.row > r_n.row - 3.0)
            throw InvalidSpecError("mirrored valley below the reference line");
    return t;
}

FeatureVector truth_features(const TruthBuild& t, const RenderResult& rr, HandType hand_type) {
    // Baselines in the same pairing the pipeline uses.
    struct Base {
        PointF a, b;
    };
    std::array<Base, 5> bases = {{
        {t.mirrors[0], t.valleys[0]},
        {t.mirrors[1], t.valleys[1]},
        {t.valleys[1], t.valleys[2]},
        {t.valleys[2], t.valleys[3]},
        {t.valleys[3], t.mirrors[2]},
    }};

    FeatureVector v{};
    for (int f = 0; f < 5; ++f) v[f] = distance(t.tips[f], midpoint(bases[f].a, bases[f].b));

    for (int f = 0; f < 5; ++f) {
        PointF mid = midpoint(bases[f].a, bases[f].b);
        PointF u = normalized(t.tips[f] - mid);
        for (int k = 0; k < 2; ++k) {
            double fraction = k == 0 ? 1.0 / 3.0 : 2.0 / 3.0;
            PointF q = mid + fraction * (t.tips[f] - mid);
            PointF c1 = side_crossing(t.fingers[f].side_pos_n, q, u);
            PointF c2 = side_crossing(t.fingers[f].side_neg_n, q, u);
            v[5 + 2 * f + k] = distance(c1, c2);
        }
    }

    for (int f = 0; f < 5; ++f) v[15 + f] = distance(bases[f].a, bases[f].b);

    v[20] = distance(t.mirrors[0], t.mirrors[2]);
    v[21] = distance(to_f(rr.line_a), to_f(rr.line_b));

    PointF palm_mid = midpoint(t.mirrors[0], t.mirrors[2]);
    for (int f = kIndex; f <= kLittle; ++f)
        v[22 + (f - kIndex)] = distance(palm_mid, midpoint(bases[f].a, bases[f].b));

    (void)hand_type;
    return v;
}

} // namespace

HandSpec HandSpec::standard(HandType type, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x68616e64ULL));
    HandSpec spec;
    spec.hand_type = type;
    spec.seed = seed;

    double ring_len = rng.uniform(80.0, 92.0);
    double index_len = rng.uniform(76.0, 88.0);
    spec.fingers[kThumb] = {rng.uniform(74.0, 86.0), rng.uniform(24.0, 28.0), 0.0,
                            rng.uniform(54.0, 62.0)};
    spec.fingers[kIndex] = {index_len, rng.uniform(21.0, 24.0), 0.0, rng.uniform(6.0, 11.0)};
    spec.fingers[kMiddle] = {std::max(ring_len, index_len) + rng.uniform(11.0, 18.0),
                             rng.uniform(22.0, 25.0), 0.0, rng.uniform(0.0, 4.0)};
    spec.fingers[kRing] = {ring_len, rng.uniform(21.0, 24.0), 0.0, rng.uniform(-6.0, -2.0)};
    spec.fingers[kLittle] = {rng.uniform(52.0, 66.0), rng.uniform(19.0, 22.0), 0.0,
                             rng.uniform(-16.0, -10.0)};
    for (auto& f : spec.fingers) f.tip_width = f.base_width - rng.uniform(5.0, 8.0);

    spec.palm_breadth = rng.uniform(112.0, 124.0);
    spec.wrist_breadth = rng.uniform(60.0, 70.0);
    spec.knuckle_row = rng.uniform(112.0, 118.0);
    spec.thumb_anchor = rng.uniform(0.30, 0.38);
    return spec;
}

SyntheticHand generate(const HandSpec& spec) {
    DesignHand design = build_design(spec);
    check_finger_gaps(design);

    RenderResult rr = render_mask(spec, design);
    TruthBuild truth = build_truth(design, rr);

    SyntheticHand out;
    out.truth.hand_type = spec.hand_type;
    out.truth.reference_point = rr.reference_point;
    out.truth.line_a = rr.line_a;
    out.truth.line_b = rr.line_b;
    for (int f = 0; f < 5; ++f) out.truth.landmarks.tips[f] = round_point(truth.tips[f]);
    for (int i = 0; i < 4; ++i) out.truth.landmarks.valleys[i] = round_point(truth.valleys[i]);
    for (int i = 0; i < 3; ++i) out.truth.landmarks.mirrored_valleys[i] = round_point(truth.mirrors[i]);
    out.truth.features = truth_features(truth, rr, spec.hand_type);

    // Noisy grayscale rendering, then pose rotation.
    Rng noise(mix_seed(spec.seed, 0x6e6f697365ULL));
    GrayImage gray(spec.canvas_width, spec.canvas_height);
    const BinaryImage& mask = rr.upright_mask;
    for (int r = 0; r < gray.height(); ++r)
        for (int c = 0; c < gray.width(); ++c) {
            double base = mask.at(r, c) ? kHandLevel : kBackgroundLevel;
            double value = base + (spec.noise_sigma > 0 ? noise.gaussian(spec.noise_sigma) : 0.0);
            gray.at(r, c) = static_cast<std::uint8_t>(std::clamp(std::lround(value), 0L, 255L));
        }
    out.image = rotate_gray(gray, spec.pose_deg);
    out.silhouette = rr.upright_mask;
    return out;
}

namespace {

// Parameter vector used for the inter-subject separation test.
std::vector<double> separation_vector(const HandSpec& s) {
    std::vector<double> v;
    for (const auto& f : s.fingers) v.push_back(f.length);
    for (const auto& f : s.fingers) v.push_back(f.base_width);
    v.push_back(s.palm_breadth);
    return v;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
    return acc;
}

HandSpec perturb(const HandSpec& base, double noise, Rng& rng) {
    HandSpec s = base;
    for (auto& f : s.fingers) {
        f.length = std::clamp(f.length + rng.uniform(-noise, noise), 42.0, 138.0);
        f.base_width = std::clamp(f.base_width + rng.uniform(-noise, noise), 16.0, 32.0);
        f.tip_width = std::clamp(f.tip_width + rng.uniform(-noise, noise), 8.0, f.base_width - 3.0);
        f.splay_deg += rng.uniform(-0.35 * noise, 0.35 * noise);
    }
    s.fingers[kThumb].splay_deg = std::clamp(s.fingers[kThumb].splay_deg, 48.0, 68.0);
    s.fingers[kIndex].splay_deg = std::clamp(s.fingers[kIndex].splay_deg, 4.0, 13.0);
    s.fingers[kMiddle].splay_deg = std::clamp(s.fingers[kMiddle].splay_deg, -1.0, 5.0);
    s.fingers[kRing].splay_deg = std::clamp(s.fingers[kRing].splay_deg, -8.0, -1.0);
    s.fingers[kLittle].splay_deg = std::clamp(s.fingers[kLittle].splay_deg, -18.0, -9.0);

    // Keep the middle finger on top of the radial profile.
    double floor_len =
        std::max(s.fingers[kRing].length, s.fingers[kIndex].length) + 8.0;
    s.fingers[kMiddle].length = std::clamp(std::max(s.fingers[kMiddle].length, floor_len), 42.0, 138.0);

    s.palm_breadth = std::clamp(s.palm_breadth + rng.uniform(-noise, noise), 108.0, 130.0);
    s.wrist_breadth = std::clamp(s.wrist_breadth + rng.uniform(-noise, noise), 56.0, 74.0);
    return s;
}

std::uint64_t params_fingerprint(const HandSpec& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](double x) {
        auto q = static_cast<std::int64_t>(std::llround(x * 1024.0));
        h ^= static_cast<std::uint64_t>(q);
        h *= 0x100000001b3ULL;
    };
    for (const auto& f : s.fingers) {
        feed(f.length);
        feed(f.base_width);
        feed(f.tip_width);
        feed(f.splay_deg);
    }
    feed(s.palm_breadth);
    feed(s.wrist_breadth);
    feed(s.knuckle_row);
    feed(s.thumb_anchor);
    return h;
}

} // namespace

Population generate_population(int subjects, int images_per_subject, double intra_noise,
                               double inter_gap, std::uint64_t seed,
                               const PopulationOptions& options) {
    if (subjects <= 0 || images_per_subject <= 0)
        throw ParameterError("subject and image counts must be positive");
    if (intra_noise < 0.0 || inter_gap < 0.0)
        throw ParameterError("noise and gap must be non-negative");

    Population population;
    population.separability_warning = inter_gap <= 2.0 * intra_noise;

    std::vector<std::vector<double>> taken;
    taken.reserve(subjects);

    // Disjoint seed namespaces for subject typing, base draws and jitter.
    constexpr std::uint64_t kTypeTag = 0x1000000000000000ULL;
    constexpr std::uint64_t kBaseTag = 0x2000000000000000ULL;
    constexpr std::uint64_t kJitterTag = 0x3000000000000000ULL;

    // Base specs are drawn sequentially (the separation test depends on
    // every prior subject); image rendering then parallelizes freely since
    // each image's seed is index-derived.
    std::vector<HandSpec> bases(subjects);
    std::vector<std::string> ids(subjects);
    int id_width = std::max(3, static_cast<int>(std::to_string(subjects).size()));
    for (int subject = 0; subject < subjects; ++subject) {
        Rng rng(mix_seed(seed, kTypeTag + subject));

        HandSpec base;
        std::vector<double> sep;
        bool placed = false;
        for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
            base = HandSpec::standard(HandType::Right,
                                      mix_seed(seed, kBaseTag + subject * 4096ULL + attempt));
            sep = separation_vector(base);
            placed = true;
            for (const auto& other : taken)
                if (l1_distance(sep, other) < inter_gap) {
                    placed = false;
                    break;
                }
        }
        if (!placed)
            throw InvalidSpecError("cannot separate population at the requested gap");
        taken.push_back(sep);

        base.hand_type = rng.chance(options.left_fraction) ? HandType::Left : HandType::Right;
        base.canvas_width = options.canvas_width;
        base.canvas_height = options.canvas_height;
        base.noise_sigma = options.noise_sigma;
        bases[subject] = base;

        std::ostringstream id;
        id << "s" << std::setw(id_width) << std::setfill('0') << subject + 1;
        ids[subject] = id.str();
    }

    const int total = subjects * images_per_subject;
    population.images.resize(total);

    auto render_one = [&](int flat) {
        int subject = flat / images_per_subject;
        int image = flat % images_per_subject;
        // An unlucky perturbation can violate a geometric invariant;
        // redraw it deterministically rather than fail the batch.
        for (int attempt = 0;; ++attempt) {
            Rng jitter(mix_seed(seed, kJitterTag + (subject * 1024ULL + image) * 64ULL + attempt));
            HandSpec spec = intra_noise > 0.0 ? perturb(bases[subject], intra_noise, jitter)
                                              : bases[subject];
            // Seeding off the parameter fingerprint keeps zero-noise
            // images of a subject bit-identical.
            spec.seed = mix_seed(seed, params_fingerprint(spec));
            try {
                SyntheticHand hand = generate(spec);
                PopulationImage& item = population.images[flat];
                item.subject_id = ids[subject];
                item.image_index = image;
                item.hand_type = spec.hand_type;
                item.image = std::move(hand.image);
                item.truth = std::move(hand.truth);
                return;
            } catch (const InvalidSpecError&) {
                if (attempt >= 50) throw;
            }
        }
    };

    unsigned workers = std::min<unsigned>(std::thread::hardware_concurrency(),
                                          static_cast<unsigned>(total));
    if (workers <= 1) {
        for (int flat = 0; flat < total; ++flat) render_one(flat);
        return population;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int flat = next.fetch_add(1); flat < total; flat = next.fetch_add(1)) {
                try {
                    render_one(flat);
                } catch (...) {
                    std::scoped_lock lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return population;
}

void write_truth_sidecar(const GroundTruth& truth, std::ostream& out) {
    out << "hand_type=" << to_string(truth.hand_type) << "\n";
    out << "R=" << truth.reference_point.row << "," << truth.reference_point.col << "\n";
    out << "A=" << truth.line_a.row << "," << truth.line_a.col << "\n";
    out << "B=" << truth.line_b.row << "," << truth.line_b.col << "\n";
    out << std::fixed << std::setprecision(6);
    for (int i = 0; i < kFeatureCount; ++i)
        out << "f" << i + 1 << "=" << truth.features[i] << "\n";
    out.unsetf(std::ios_base::floatfield);
}

} // namespace handgeom
