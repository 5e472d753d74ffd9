#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "flowlab/mesh.hpp"
#include "flowlab/polyline.hpp"

namespace flowlab {

// Nodal loads (N per unit depth) of the explicit Laplace-Beltrami form
//   -gamma int (dw/dxi) (dX/dxi) / |dX/dxi| dxi
// on the linear interface elements. For an open curve the end-point boundary term is dropped.
std::vector<Vec2> laplace_beltrami_force(const Polyline& curve, double gamma);

// Consistent load of gamma kappa n with a given nodal curvature: node i receives
// -gamma kappa_i times the integral of its hat function times the outward segment normals.
// A counterclockwise closed curve has kappa = +1/r for a circle.
std::vector<Vec2> curvature_force(const Polyline& curve, const std::vector<double>& kappa, double gamma);

// Nodal volume force -gamma kappa delta_eps(phi) grad phi / |grad phi| (N/m^3); zero where |phi| >= eps.
// kappa and the normal are the recovered level-set quantities.
std::vector<Vec2> csf_force(const Mesh2D& mesh, const Eigen::VectorXd& phi, double gamma, double eps);

// Surfactant amount per unit length at the nodes of a closed curve.
struct SurfactantField {
    Eigen::VectorXd G;
};

// Integral of G ds with the consistent P1 mass matrix.
double surfactant_mass(const Polyline& curve, const SurfactantField& g);

struct SurfactantStep {
    SurfactantField g;
    Polyline curve;  // nodes moved by dt v
};

// One ALE step of d/dt int G w + int diffusivity grad_s G grad_s w = int G (u - v) . grad_s w on a closed curve
// whose nodes move with v (v = u when mesh_velocity is empty). Diffusion is implicit on the moved curve and
// the transport term explicit on the old curve; testing with w = 1 makes the update conserve int G ds exactly.
SurfactantStep surfactant_step(const SurfactantField& g, const Polyline& curve, const std::vector<Vec2>& u, double dt,
                               double diffusivity = 1.0, const std::vector<Vec2>& mesh_velocity = {});

void write_surface_vtk(const std::string& path, const Polyline& curve, const std::vector<Vec2>& force,
                       const SurfactantField* g = nullptr);

}  // namespace flowlab
