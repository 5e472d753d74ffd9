#pragma once

#include <vector>

#include "flowlab/mesh.hpp"

namespace flowlab {

// Ordered explicit interface through mesh nodes. For a counterclockwise closed curve the
// normals point outward (right of the direction of travel).
struct InterfacePolyline {
    std::vector<int> nodes;
    bool closed = true;
    std::vector<Vec2> normals;
    std::vector<Vec2> tangents;
};

// Geometry-only polyline.
struct Polyline {
    std::vector<Vec2> points;
    bool closed = true;

    int size() const { return static_cast<int>(points.size()); }
    int num_segments() const { return closed ? size() : size() - 1; }
    const Vec2& at(int i) const { return points[(i % size() + size()) % size()]; }
};

Polyline polyline_points(const Mesh2D& mesh, const InterfacePolyline& poly);

// Unit right-hand normal of segment i (from point i to i+1).
Vec2 segment_normal(const Polyline& p, int i);
double segment_length(const Polyline& p, int i);
double perimeter(const Polyline& p);
double enclosed_area(const Polyline& p);  // signed, positive for counterclockwise
Vec2 centroid(const Polyline& p);

// Nodal normals as the bisector of the adjacent segment normals (equal angular weight);
// end nodes of open curves take their single segment normal.
std::vector<Vec2> nodal_normals(const Polyline& p);
void compute_frames(const Mesh2D& mesh, InterfacePolyline& poly);

// Checks all non-adjacent segment pairs.
bool self_intersects(const Polyline& p);

double point_segment_distance(const Vec2& x, const Vec2& a, const Vec2& b, Vec2* closest = nullptr);

}  // namespace flowlab
