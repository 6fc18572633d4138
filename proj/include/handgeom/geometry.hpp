#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace handgeom {

// Integer pixel coordinate, row-major convention (row 0 = top).
struct Point {
    int row = 0;
    int col = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

// Continuous coordinate used by the synthetic geometry and feature math.
struct PointF {
    double row = 0.0;
    double col = 0.0;

    friend bool operator==(const PointF&, const PointF&) = default;
};

inline PointF to_f(const Point& p) { return {static_cast<double>(p.row), static_cast<double>(p.col)}; }

inline PointF operator+(const PointF& a, const PointF& b) { return {a.row + b.row, a.col + b.col}; }
inline PointF operator-(const PointF& a, const PointF& b) { return {a.row - b.row, a.col - b.col}; }
inline PointF operator*(double s, const PointF& p) { return {s * p.row, s * p.col}; }

inline double dot(const PointF& a, const PointF& b) { return a.row * b.row + a.col * b.col; }
inline double norm(const PointF& p) { return std::hypot(p.row, p.col); }

inline PointF normalized(const PointF& p) {
    double n = norm(p);
    return {p.row / n, p.col / n};
}

// Right-hand perpendicular in (row, col) coordinates.
inline PointF perp(const PointF& p) { return {p.col, -p.row}; }

inline double distance(const PointF& a, const PointF& b) { return norm(a - b); }
inline double distance(const Point& a, const Point& b) { return distance(to_f(a), to_f(b)); }

inline double squared_distance(const Point& a, const Point& b) {
    double dr = a.row - b.row, dc = a.col - b.col;
    return dr * dr + dc * dc;
}

inline PointF midpoint(const PointF& a, const PointF& b) { return {(a.row + b.row) / 2.0, (a.col + b.col) / 2.0}; }

// Ordered boundary walk of a silhouette; consecutive points are 8-adjacent
// and the last point is 8-adjacent to the first.
using Contour = std::vector<Point>;

} // namespace handgeom
