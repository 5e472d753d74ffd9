#include "flowlab/polyline.hpp"

#include <algorithm>
#include <cmath>

#include "flowlab/errors.hpp"

namespace flowlab {

Polyline polyline_points(const Mesh2D& mesh, const InterfacePolyline& poly) {
    Polyline p;
    p.closed = poly.closed;
    for (int n : poly.nodes) p.points.push_back(mesh.nodes[n]);
    return p;
}

Vec2 segment_normal(const Polyline& p, int i) {
    const Vec2 t = p.at(i + 1) - p.at(i);
    const double len = t.norm();
    if (len == 0) throw Error("zero-length polyline segment");
    return Vec2(t.y(), -t.x()) / len;
}

double segment_length(const Polyline& p, int i) { return (p.at(i + 1) - p.at(i)).norm(); }

double perimeter(const Polyline& p) {
    double s = 0;
    for (int i = 0; i < p.num_segments(); ++i) s += segment_length(p, i);
    return s;
}

double enclosed_area(const Polyline& p) {
    double a = 0;
    for (int i = 0; i < p.size(); ++i) a += cross2(p.at(i), p.at(i + 1));
    return 0.5 * a;
}

Vec2 centroid(const Polyline& p) {
    double a = 0;
    Vec2 c = Vec2::Zero();
    for (int i = 0; i < p.size(); ++i) {
        const double w = cross2(p.at(i), p.at(i + 1));
        a += w;
        c += w * (p.at(i) + p.at(i + 1));
    }
    return c / (3 * a);
}

std::vector<Vec2> nodal_normals(const Polyline& p) {
    const int n = p.size();
    std::vector<Vec2> out(n);
    for (int i = 0; i < n; ++i) {
        Vec2 s = Vec2::Zero();
        if (p.closed || i > 0) s += segment_normal(p, i - 1);
        if (p.closed || i < n - 1) s += segment_normal(p, i);
        const double len = s.norm();
        out[i] = len > 0 ? Vec2(s / len) : segment_normal(p, std::min(i, p.num_segments() - 1));
    }
    return out;
}

void compute_frames(const Mesh2D& mesh, InterfacePolyline& poly) {
    const auto pts = polyline_points(mesh, poly);
    poly.normals = nodal_normals(pts);
    poly.tangents.resize(poly.normals.size());
    for (size_t i = 0; i < poly.normals.size(); ++i) poly.tangents[i] = Vec2(-poly.normals[i].y(), poly.normals[i].x());
}

static bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double d1 = cross2(b - a, c - a), d2 = cross2(b - a, d - a);
    const double d3 = cross2(d - c, a - c), d4 = cross2(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

bool self_intersects(const Polyline& p) {
    const int m = p.num_segments();
    for (int i = 0; i < m; ++i)
        for (int j = i + 2; j < m; ++j) {
            if (p.closed && i == 0 && j == m - 1) continue;
            if (segments_cross(p.at(i), p.at(i + 1), p.at(j), p.at(j + 1))) return true;
        }
    return false;
}

double point_segment_distance(const Vec2& x, const Vec2& a, const Vec2& b, Vec2* closest) {
    const Vec2 d = b - a;
    const double len2 = d.squaredNorm();
    double t = len2 > 0 ? (x - a).dot(d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Vec2 c = a + t * d;
    if (closest) *closest = c;
    return (x - c).norm();
}

}  // namespace flowlab
