#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "flowlab/flow.hpp"
#include "flowlab/mesh.hpp"
#include "flowlab/polyline.hpp"

namespace flowlab {

// Analytic or polygonal region; signed distance is negative inside.
struct Shape {
    enum class Kind { Circle, Rectangle, Polygon } kind = Kind::Circle;
    Vec2 center = Vec2::Zero();
    double radius = 0;
    Rect rect;
    Polyline polygon;  // closed

    static Shape circle(const Vec2& c, double r);
    static Shape rectangle(const Rect& r);
    static Shape polygon_region(const Polyline& p);

    double signed_distance(const Vec2& x) const;
    bool contains(const Vec2& x) const { return signed_distance(x) < 0; }
};

// Negative in phase 1, positive in phase 2.
struct LevelSetField {
    Eigen::VectorXd phi;
    double band_width = 0;
};

using Segment = std::pair<Vec2, Vec2>;

LevelSetField init_signed_distance(const Mesh2D& mesh, const Shape& shape, double band_width);

// Smoothed Heaviside and delta with support |phi| <= eps:
//   H = 1/2 + 15/16 (s - 2 s^3/3 + s^5/5), delta = 15/(16 eps) (1 - s^2)^2, s = phi/eps.
double smoothed_heaviside(double phi, double eps);
double smoothed_delta(double phi, double eps);

// SUPG P1/Q1 transport with a third-order strong-stability-preserving Runge-Kutta step.
class LevelSetAdvector {
public:
    explicit LevelSetAdvector(const Mesh2D& mesh) : mesh_(&mesh) {}
    // Rejects CFL = max|u| dt / h > 1 with a suggested time step.
    Eigen::VectorXd advect(const Eigen::VectorXd& phi, const std::vector<Vec2>& velocity, double dt) const;

private:
    const Mesh2D* mesh_;
};

Eigen::VectorXd advect(const Mesh2D& mesh, const Eigen::VectorXd& phi, const std::vector<Vec2>& velocity, double dt);

double advection_cfl(const Mesh2D& mesh, const std::vector<Vec2>& velocity, double dt);

// Piecewise-linear zero set on the sub-triangulation.
std::vector<Segment> zero_set_segments(const Mesh2D& mesh, const Eigen::VectorXd& phi);

// Intersection points of the zero set with sub-triangle edges, keyed by the edge's node pair.
struct EdgeCrossing {
    int a = -1, b = -1;
    Vec2 x = Vec2::Zero();
};
std::vector<EdgeCrossing> zero_set_crossings(const Mesh2D& mesh, const Eigen::VectorXd& phi);

struct ReinitReport {
    int cut_nodes = 0;
    int band_nodes = 0;
    int components = 0;
};

// Cut-element nodes keep their ratios (one scale factor per connected group), so the
// intersection points do not move; other band nodes get the exact distance to the
// zero-set segments; outside the band the sign is kept and |phi| >= band_width.
LevelSetField reinitialize_narrow_band(const Mesh2D& mesh, const LevelSetField& ls, ReinitReport* report = nullptr);

// Area of phase 1 (phi < 0): smoothed Heaviside quadrature for eps > 0, exact
// piecewise-linear area on the sub-triangulation for eps == 0.
double phase1_area(const Mesh2D& mesh, const Eigen::VectorXd& phi, double eps);
// Phase-1 area inside one element from the linear interpolant on its sub-triangles.
double element_phase1_area(const Mesh2D& mesh, const Eigen::VectorXd& phi, int element);
// Centroid of the phase-1 region on the sub-triangulation.
Vec2 phase1_centroid(const Mesh2D& mesh, const Eigen::VectorXd& phi);

struct MassCorrection {
    LevelSetField field;
    double shift = 0;
    int iterations = 0;
};

// phi + c with c from bisection on |c| <= band_width so that phase1_area matches target.
MassCorrection global_mass_correction(const Mesh2D& mesh, const LevelSetField& ls, double target_area, double eps);

struct InterfaceGeometry {
    std::vector<Vec2> normal;
    Eigen::VectorXd curvature;
    std::vector<char> valid;  // false where |grad phi| vanishes
};

// Lumped-L2 recovered gradient of phi, normalized; curvature as the recovered divergence of n.
std::vector<Vec2> recovered_gradient(const Mesh2D& mesh, const Eigen::VectorXd& phi);
InterfaceGeometry normals_and_curvature(const Mesh2D& mesh, const Eigen::VectorXd& phi);

// Largest | |grad phi| - 1 | over band nodes whose neighbors are all in the band.
double gradient_deviation(const Mesh2D& mesh, const LevelSetField& ls);

struct SmoothedProps {
    Eigen::VectorXd rho, mu;
};
SmoothedProps smoothed_material_props(const Eigen::VectorXd& phi, const FluidProps& props, double eps);

// Material at quadrature points from the interpolated level set and smoothed Heaviside.
MaterialFn levelset_material(const Mesh2D& mesh, const Eigen::VectorXd& phi, const FluidProps& props, double eps);

// Symmetric Hausdorff distance between two segment sets, sampled along each set.
double hausdorff_distance(const std::vector<Segment>& a, const std::vector<Segment>& b, int samples_per_segment = 4);

}  // namespace flowlab
