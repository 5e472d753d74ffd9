#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <vector>

namespace flowlab {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// left-hand perpendicular
inline Vec2 perp(const Vec2& a) { return Vec2(-a.y(), a.x()); }

struct Rect {
    double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

}  // namespace flowlab
