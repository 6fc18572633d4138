#include "handgeom/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>

namespace handgeom {

std::string to_string(HandType t) { return t == HandType::Left ? "left" : "right"; }

HandType hand_type_from_string(const std::string& s) {
    if (s == "left" || s == "Left") return HandType::Left;
    if (s == "right" || s == "Right") return HandType::Right;
    throw ParameterError("unknown hand type: " + s);
}

namespace {

struct Bbox {
    int top = 0, bottom = -1, left = 0, right = -1;
    bool empty() const { return bottom < top; }
    int height() const { return bottom - top + 1; }
    int width() const { return right - left + 1; }
};

Bbox foreground_bbox(const BinaryImage& m) {
    Bbox b{m.height(), -1, m.width(), -1};
    for (int r = 0; r < m.height(); ++r)
        for (int c = 0; c < m.width(); ++c)
            if (m.at(r, c)) {
                b.top = std::min(b.top, r);
                b.bottom = std::max(b.bottom, r);
                b.left = std::min(b.left, c);
                b.right = std::max(b.right, c);
            }
    return b;
}

BinaryImage rotate90cw(const BinaryImage& in) {
    BinaryImage out(in.height(), in.width());
    for (int r = 0; r < out.height(); ++r)
        for (int c = 0; c < out.width(); ++c)
            out.set(r, c, in.at(in.height() - 1 - c, r));
    return out;
}

BinaryImage rotate180(const BinaryImage& in) {
    BinaryImage out(in.width(), in.height());
    for (int r = 0; r < out.height(); ++r)
        for (int c = 0; c < out.width(); ++c)
            out.set(r, c, in.at(in.height() - 1 - r, in.width() - 1 - c));
    return out;
}

BinaryImage rotate270cw(const BinaryImage& in) {
    BinaryImage out(in.height(), in.width());
    for (int r = 0; r < out.height(); ++r)
        for (int c = 0; c < out.width(); ++c)
            out.set(r, c, in.at(c, in.width() - 1 - r));
    return out;
}

// Source index sampled for output index i when resizing src -> out.
// Center-aligned; exact boundary hits split symmetrically around the
// output midline so resampling commutes with mirroring.
int nn_index(int out_i, int out_dim, int src_dim) {
    std::int64_t num = (2 * static_cast<std::int64_t>(out_i) + 1) * src_dim;
    std::int64_t den = 2 * static_cast<std::int64_t>(out_dim);
    std::int64_t q = num / den;
    if (num % den == 0)
        q = out_i < out_dim / 2 ? q : q - 1;
    return static_cast<int>(std::clamp<std::int64_t>(q, 0, src_dim - 1));
}

} // namespace

namespace {

// Mean count of foreground runs per row over a row range.
double mean_runs(const BinaryImage& m, const Bbox& b, int row_from, int row_to) {
    double total = 0.0;
    int rows = 0;
    for (int r = row_from; r <= row_to; ++r) {
        int runs = 0;
        bool inside = false;
        for (int c = b.left; c <= b.right; ++c) {
            bool fg = m.at(r, c);
            if (fg && !inside) ++runs;
            inside = fg;
        }
        total += runs;
        ++rows;
    }
    return rows > 0 ? total / rows : 0.0;
}

} // namespace

BinaryImage orient_upright(const BinaryImage& mask) {
    BinaryImage candidates[4] = {mask, rotate90cw(mask), rotate180(mask), rotate270cw(mask)};

    int best = -1;
    double best_margin = 0.0;
    for (int k = 0; k < 4; ++k) {
        const BinaryImage& m = candidates[k];
        Bbox b = foreground_bbox(m);
        if (b.empty())
            throw NoHandError("image has no foreground pixels");
        if (b.height() < b.width()) continue;

        // Fingers-up means the top of the box is the sparse, fragmented
        // mass: its rows split into several runs while the wrist end is a
        // single solid run.
        int band = std::max(1, b.height() * 3 / 10);
        double top_runs = mean_runs(m, b, b.top, b.top + band - 1);
        double bottom_runs = mean_runs(m, b, b.bottom - band + 1, b.bottom);
        double margin = top_runs - bottom_runs;
        if (margin <= 0.0) continue;
        if (best < 0 || margin > best_margin) {
            best = k;
            best_margin = margin;
        }
    }
    if (best < 0)
        throw AmbiguousOrientationError("no rotation yields an upright hand");
    return std::move(candidates[best]);
}

ReferencePlacement place_reference(const BinaryImage& mask) {
    Bbox b = foreground_bbox(mask);
    if (b.empty())
        throw NoHandError("image has no foreground pixels");

    int offset = static_cast<int>(std::lround(0.10 * b.height()));
    int ref_row = b.bottom - offset;

    int left = -1, right = -1;
    for (int c = 0; c < mask.width(); ++c)
        if (mask.at(ref_row, c)) {
            if (left < 0) left = c;
            right = c;
        }
    if (left < 0)
        throw MalformedSilhouetteError("reference row crosses no foreground");

    ReferencePlacement out;
    out.mask = mask;
    for (int r = ref_row + 1; r <= b.bottom; ++r)
        for (int c = b.left; c <= b.right; ++c)
            out.mask.set(r, c, false);
    out.reference_row = ref_row;
    out.line_a = {ref_row, left};
    out.line_b = {ref_row, right};
    out.reference_point = {ref_row, reference_midpoint_col(left, right, mask.width())};
    return out;
}

int reference_midpoint_col(int a_col, int b_col, int image_width) {
    int sum = a_col + b_col;
    if (sum % 2 == 0) return sum / 2;
    double midline = (image_width - 1) / 2.0;
    return sum / 2.0 < midline ? (sum + 1) / 2 : sum / 2;
}

HandType detect_hand_type(const BinaryImage& guillotined, const Point& reference_point) {
    (void)reference_point; // extremes are compared by row only

    Point lm{-1, -1}, rm{-1, -1};
    for (int r = 0; r < guillotined.height(); ++r)
        for (int c = 0; c < guillotined.width(); ++c) {
            if (!guillotined.at(r, c)) continue;
            if (lm.col < 0 || c < lm.col || (c == lm.col && r > lm.row)) lm = {r, c};
            if (rm.col < 0 || c > rm.col || (c == rm.col && r > rm.row)) rm = {r, c};
        }
    if (lm.col < 0)
        throw NoHandError("image has no foreground pixels");
    if (lm.row == rm.row)
        throw AmbiguousHandTypeError("extreme pixels sit on the same row");
    return lm.row > rm.row ? HandType::Left : HandType::Right;
}

NormalizedHand normalize_mask(const BinaryImage& mask) {
    BinaryImage comp = largest_component(mask);
    BinaryImage upright = orient_upright(comp);
    ReferencePlacement ref = place_reference(upright);

    // The cut can strand small pieces whose only link ran below the line.
    BinaryImage cut = largest_component(ref.mask);
    Bbox b = foreground_bbox(cut);

    BinaryImage norm(kNormalizedWidth, kNormalizedHeight);
    for (int r = 0; r < kNormalizedHeight; ++r) {
        int sr = b.top + nn_index(r, kNormalizedHeight, b.height());
        for (int c = 0; c < kNormalizedWidth; ++c) {
            int sc = b.left + nn_index(c, kNormalizedWidth, b.width());
            norm.set(r, c, cut.at(sr, sc));
        }
    }
    // Resampling may break thin diagonal links.
    norm = largest_component(norm);

    NormalizedHand hand;
    hand.contour = sobel_contour(norm);

    int ref_row = -1;
    for (int r = kNormalizedHeight - 1; r >= 0 && ref_row < 0; --r)
        for (int c = 0; c < kNormalizedWidth; ++c)
            if (norm.at(r, c)) {
                ref_row = r;
                break;
            }
    int left = -1, right = -1;
    for (int c = 0; c < kNormalizedWidth; ++c)
        if (norm.at(ref_row, c)) {
            if (left < 0) left = c;
            right = c;
        }
    hand.line_a = {ref_row, left};
    hand.line_b = {ref_row, right};
    hand.reference_point = {ref_row, reference_midpoint_col(left, right, kNormalizedWidth)};
    hand.hand_type = detect_hand_type(norm, hand.reference_point);
    hand.mask = std::move(norm);
    return hand;
}

NormalizedHand normalize(const GrayImage& raw, const NormalizeOptions& options) {
    GrayImage filtered = median_filter(raw, options.median_window);
    int threshold;
    try {
        threshold = otsu_threshold(filtered);
    } catch (const DegenerateHistogramError&) {
        throw NoHandError("flat image contains no hand");
    }
    BinaryImage bin = binarize(filtered, threshold, options.polarity);
    return normalize_mask(bin);
}

void write_normalize_sidecar(const NormalizedHand& hand, std::ostream& out) {
    out << "hand_type=" << to_string(hand.hand_type) << "\n";
    out << "R=" << hand.reference_point.row << "," << hand.reference_point.col << "\n";
    out << "A=" << hand.line_a.row << "," << hand.line_a.col << "\n";
    out << "B=" << hand.line_b.row << "," << hand.line_b.col << "\n";
}

} // namespace handgeom
