#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "flowlab/mesh.hpp"
#include "flowlab/nurbs.hpp"
#include "flowlab/polyline.hpp"

namespace flowlab {

enum class BoundaryMotion { Lagrangian, Normal, Coordinate };

struct BoundaryVelocityResult {
    std::vector<Vec2> v;
    std::vector<int> degenerate;  // indices (into the input arrays) with |n . e| < 1e-8
};

// Lagrangian: v = u. Normal: v = (u.n) n. Coordinate: v = ((u.n)/(n.e)) e.
// Degenerate coordinate nodes are flagged and given the normal-mode velocity.
BoundaryVelocityResult boundary_velocity(const std::vector<Vec2>& u, const std::vector<Vec2>& normals,
                                         BoundaryMotion mode, const Vec2& direction = Vec2(0, 1));

// Integral of rho (u - v).n along the polyline by the trapezoidal rule with nodal normals.
// u, v and normals are per polyline node.
double mass_flux(const Polyline& interface, const std::vector<Vec2>& normals, const std::vector<Vec2>& u,
                 const std::vector<Vec2>& v, double rho);

enum class MeshUpdateKind { Elastic, Laplace };

struct MeshMotionParams {
    double lame_lambda = 1.0;
    double lame_mu = 1.0;
    // Lame parameters scale with (mean area / element area)^stiffening; 0 disables stiffening.
    double stiffening = 1.0;
    MeshUpdateKind kind = MeshUpdateKind::Elastic;
};

struct MeshMotionBC {
    std::map<int, Vec2> fixed;  // node -> prescribed displacement
    // node -> unit normal; the normal displacement is zero and the tangential one free
    std::map<int, Vec2> slip;
};

struct MeshUpdateReport {
    double min_quality = 0;
    double mean_quality = 0;
    double max_displacement = 0;
};

// Displacement of all nodes; throws SolverFailure on a failed solve.
std::vector<Vec2> mesh_displacement(const Mesh2D& mesh, const MeshMotionBC& bc, const MeshMotionParams& params);

// Moves the nodes by mesh_displacement; throws InvertedElements listing elements with a non-positive Jacobian.
Mesh2D elastic_mesh_update(const Mesh2D& mesh, const MeshMotionBC& bc, const MeshMotionParams& params = {},
                           MeshUpdateReport* report = nullptr);
Mesh2D laplace_mesh_update(const Mesh2D& mesh, const MeshMotionBC& bc, MeshUpdateReport* report = nullptr);

// Elements with a non-positive Jacobian at any corner.
std::vector<int> inverted_elements(const Mesh2D& mesh);

// Curvature vector kappa n = r / |r|^2 with r from the node to the circumcenter of (prev, node, next).
// Collinear triples and end nodes of open curves give zero.
std::vector<Vec2> osculating_curvature(const Polyline& p);
// Signed curvature kappa = -(kappa n) . n_out, +1/r for a counterclockwise circle.
std::vector<double> osculating_signed_curvature(const Polyline& p);

// Triangles: 2 r_in / r_out. Quads: smallest corner value of 2 |e1 x e2| / (|e1|^2 + |e2|^2).
// Both equal 1 for the regular shape and lie in (0, 1] for valid elements; 0 for inverted ones.
double element_quality(const Mesh2D& mesh, int element);
std::pair<double, double> mesh_quality(const Mesh2D& mesh);  // (min, mean)

// Conforming drop mesh: square [-L, L]^2 around a circle of radius r at the origin, 4m interface nodes.
// Elements inside are phase 1. The interface polyline runs counterclockwise.
struct DropMesh {
    Mesh2D mesh;
    InterfacePolyline interface;
};
DropMesh make_drop_mesh(double radius, double half_width, int m, int inner_layers, int outer_layers);

// Quad annulus r0 < r < r1 with n nodes per ring and k layers; radial spacing grows geometrically
// by `grading` per layer. inner ring edges are tagged interface, the outer ring wall.
struct AnnulusMesh {
    Mesh2D mesh;
    std::vector<int> inner, outer;  // counterclockwise rings
};
AnnulusMesh make_annulus_mesh(double r0, double r1, int n, int k, double grading = 1.0);

// Tank filled to height `fill` inside a U-shaped wall curve (right wall, bottom, left wall in parameter order,
// corners and kinks where the parameter speed vanishes). Coons-patch quads, nx x ny. Above the kinks the
// contact points lie on the upper wall branches and one node row sits at the kinks.
struct TankMesh {
    Mesh2D mesh;
    std::vector<int> right_wall, left_wall;  // bottom corner to contact point
    std::vector<int> bottom;                 // right corner to left corner
    std::vector<int> surface;                // left contact point to right contact point
    std::vector<double> theta;               // wall parameter per node, NaN off the wall
    double theta_right_corner = 0, theta_left_corner = 0;
    double theta_right_kink = 0, theta_left_kink = 0;
    // Row pinned to the wall kinks when the fill reaches above them; -1 otherwise.
    int kink_row = -1;
};
// Wall parameter where the branch between theta_a and theta_b reaches height y (bisection on a monotone branch).
double wall_parameter_at_height(const Curve& wall, double theta_a, double theta_b, double y);
// n + 1 wall parameters from ta to tb with equal arc length between neighbors.
std::vector<double> wall_parameters_by_arclength(const Curve& wall, double ta, double tb, int n);
TankMesh make_tank_mesh(const Curve& wall, double fill, int nx, int ny, double theta_right_corner = 7.0 / 16,
                        double theta_left_corner = 9.0 / 16, double theta_right_kink = 1.0 / 16,
                        double theta_left_kink = 15.0 / 16);

void write_quality_csv(const std::string& path, const std::vector<double>& time, const std::vector<double>& min_q,
                       const std::vector<double>& mean_q);

}  // namespace flowlab
