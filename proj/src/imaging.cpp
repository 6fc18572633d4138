#include "handgeom/imaging.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include <vector>

namespace handgeom {

GrayImage to_grayscale(const RgbImage& image) {
    GrayImage out(image.width(), image.height());
    const auto& src = image.pixels();
    auto& dst = out.pixels();
    for (std::size_t i = 0, n = dst.size(); i < n; ++i) {
        double y = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2];
        long v = std::lround(y);
        dst[i] = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
    }
    return out;
}

int otsu_threshold(const GrayImage& img) {
    std::array<std::int64_t, 256> hist{};
    for (auto v : img.pixels()) ++hist[v];

    const std::int64_t total = static_cast<std::int64_t>(img.pixels().size());
    std::int64_t sum_all = 0;
    for (int i = 0; i < 256; ++i) sum_all += static_cast<std::int64_t>(i) * hist[i];

    int best_t = -1;
    double best_var = -1.0;
    std::int64_t w0 = 0, sum0 = 0;
    for (int t = 0; t < 256; ++t) {
        w0 += hist[t];
        sum0 += static_cast<std::int64_t>(t) * hist[t];
        std::int64_t w1 = total - w0;
        if (w0 == 0 || w1 == 0) continue;
        double mu0 = static_cast<double>(sum0) / w0;
        double mu1 = static_cast<double>(sum_all - sum0) / w1;
        double between = static_cast<double>(w0) * static_cast<double>(w1) * (mu0 - mu1) * (mu0 - mu1);
        if (between > best_var) {
            best_var = between;
            best_t = t;
        }
    }
    if (best_t < 0)
        throw DegenerateHistogramError("single-intensity image admits no threshold");
    return best_t;
}

namespace {

inline void order(std::uint8_t& a, std::uint8_t& b) {
    if (a > b) std::swap(a, b);
}

// Median of nine via the classic 19-exchange network.
inline std::uint8_t median9(std::uint8_t p[9]) {
    order(p[1], p[2]); order(p[4], p[5]); order(p[7], p[8]);
    order(p[0], p[1]); order(p[3], p[4]); order(p[6], p[7]);
    order(p[1], p[2]); order(p[4], p[5]); order(p[7], p[8]);
    order(p[0], p[3]); order(p[5], p[8]); order(p[4], p[7]);
    order(p[3], p[6]); order(p[1], p[4]); order(p[2], p[5]);
    order(p[4], p[7]); order(p[4], p[2]); order(p[6], p[4]);
    order(p[4], p[2]);
    return p[4];
}

} // namespace

GrayImage median_filter(const GrayImage& img, int window) {
    if (window < 3 || window % 2 == 0)
        throw ParameterError("median window must be odd and >= 3");

    const int w = img.width(), h = img.height();
    GrayImage out(w, h);

    if (window == 3) {
        for (int r = 0; r < h; ++r) {
            int rm = std::max(r - 1, 0), rp = std::min(r + 1, h - 1);
            for (int c = 0; c < w; ++c) {
                int cm = std::max(c - 1, 0), cp = std::min(c + 1, w - 1);
                std::uint8_t p[9] = {img.at(rm, cm), img.at(rm, c), img.at(rm, cp),
                                     img.at(r, cm),  img.at(r, c),  img.at(r, cp),
                                     img.at(rp, cm), img.at(rp, c), img.at(rp, cp)};
                out.at(r, c) = median9(p);
            }
        }
        return out;
    }

    const int half = window / 2;
    std::vector<std::uint8_t> values;
    values.reserve(static_cast<std::size_t>(window) * window);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            values.clear();
            for (int dr = -half; dr <= half; ++dr) {
                int rr = std::clamp(r + dr, 0, h - 1);
                for (int dc = -half; dc <= half; ++dc) {
                    int cc = std::clamp(c + dc, 0, w - 1);
                    values.push_back(img.at(rr, cc));
                }
            }
            auto mid = values.begin() + values.size() / 2;
            std::nth_element(values.begin(), mid, values.end());
            out.at(r, c) = *mid;
        }
    }
    return out;
}

BinaryImage binarize(const GrayImage& img, int threshold, Polarity polarity) {
    if (threshold < 0 || threshold > 255)
        throw ParameterError("threshold must lie in [0,255]");
    BinaryImage out(img.width(), img.height());
    const auto& src = img.pixels();
    auto& dst = out.pixels();
    for (std::size_t i = 0, n = src.size(); i < n; ++i) {
        bool hand = polarity == Polarity::BrightHand ? src[i] > threshold : src[i] <= threshold;
        dst[i] = hand ? 1 : 0;
    }
    return out;
}

namespace {

constexpr std::array<Point, 8> kNeighbors8{{
    {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1},
}};

int neighbor_index(const Point& delta) {
    for (int i = 0; i < 8; ++i)
        if (kNeighbors8[i] == delta) return i;
    return -1;
}

} // namespace

BinaryImage largest_component(const BinaryImage& img) {
    const int w = img.width(), h = img.height();
    std::vector<std::int32_t> label(static_cast<std::size_t>(w) * h, -1);
    std::vector<std::size_t> sizes;
    std::vector<Point> stack;

    auto idx = [w](int r, int c) { return static_cast<std::size_t>(r) * w + c; };

    // Row-major discovery order means the first component reaching the
    // maximum size is the one holding the topmost-leftmost pixel.
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!img.at(r, c) || label[idx(r, c)] >= 0) continue;
            const auto id = static_cast<std::int32_t>(sizes.size());
            std::size_t count = 0;
            label[idx(r, c)] = id;
            stack.push_back({r, c});
            while (!stack.empty()) {
                Point p = stack.back();
                stack.pop_back();
                ++count;
                for (const auto& d : kNeighbors8) {
                    int rr = p.row + d.row, cc = p.col + d.col;
                    if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                    if (!img.at(rr, cc) || label[idx(rr, cc)] >= 0) continue;
                    label[idx(rr, cc)] = id;
                    stack.push_back({rr, cc});
                }
            }
            sizes.push_back(count);
        }
    }
    if (sizes.empty())
        throw NoHandError("image has no foreground pixels");

    std::int32_t best = 0;
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] > sizes[best]) best = static_cast<std::int32_t>(i);

    BinaryImage out(w, h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            out.set(r, c, label[idx(r, c)] == best);
    return out;
}

int sobel_magnitude(const BinaryImage& img, int row, int col) {
    auto v = [&](int r, int c) { return img.foreground(r, c) ? 1 : 0; };
    int gx = v(row - 1, col + 1) + 2 * v(row, col + 1) + v(row + 1, col + 1)
           - v(row - 1, col - 1) - 2 * v(row, col - 1) - v(row + 1, col - 1);
    int gy = v(row + 1, col - 1) + 2 * v(row + 1, col) + v(row + 1, col + 1)
           - v(row - 1, col - 1) - 2 * v(row - 1, col) - v(row - 1, col + 1);
    return std::abs(gx) + std::abs(gy);
}

Contour sobel_contour(const BinaryImage& img) {
    const int w = img.width(), h = img.height();

    // Anchor: topmost-leftmost boundary pixel. On the top row of the
    // component every foreground pixel has a background neighbor above, so
    // this is also the topmost-leftmost foreground pixel.
    Point start{-1, -1};
    for (int r = 0; r < h && start.row < 0; ++r)
        for (int c = 0; c < w; ++c)
            if (img.at(r, c)) {
                start = {r, c};
                break;
            }
    if (start.row < 0)
        throw NoHandError("image has no foreground pixels");

    Contour contour;
    contour.push_back(start);

    const Point b0{start.row, start.col - 1}; // west of start, background
    Point cur = start, back = b0;
    const std::size_t cap = 4 * static_cast<std::size_t>(w) * h + 8;

    while (true) {
        int bi = neighbor_index({back.row - cur.row, back.col - cur.col});
        bool advanced = false;
        for (int step = 1; step <= 8; ++step) {
            int k = (bi + step) % 8;
            Point n{cur.row + kNeighbors8[k].row, cur.col + kNeighbors8[k].col};
            if (img.foreground(n.row, n.col)) {
                // A diagonal hop would skip the corner pixel lying between
                // the two; it borders the background backtrack diagonally,
                // so it belongs to the boundary and joins the walk.
                if (k % 2 == 1) {
                    Point corner{cur.row + kNeighbors8[(k + 1) % 8].row,
                                 cur.col + kNeighbors8[(k + 1) % 8].col};
                    if (img.foreground(corner.row, corner.col)) contour.push_back(corner);
                }
                int prev = (k + 7) % 8;
                back = {cur.row + kNeighbors8[prev].row, cur.col + kNeighbors8[prev].col};
                cur = n;
                advanced = true;
                break;
            }
        }
        if (!advanced)
            throw MalformedSilhouetteError("isolated pixel: no closed boundary walk");
        if (cur == start && back == b0) break; // walk closed at its entry state
        contour.push_back(cur);
        if (contour.size() > cap)
            throw MalformedSilhouetteError("boundary walk failed to close");
    }

    if (contour.size() < 8)
        throw MalformedSilhouetteError("silhouette too small for a closed boundary");
    return contour;
}

} // namespace handgeom
