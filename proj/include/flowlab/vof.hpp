#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "flowlab/levelset.hpp"
#include "flowlab/mesh.hpp"

namespace flowlab {

// Per-cell fluid fraction on a structured quad grid; cell index = grid.cell(i, j).
struct VolumeFractionField {
    Eigen::VectorXd F;
    GridInfo grid;
    double clamped_mass = 0;  // accumulated |clamp correction| * cell area
};

// Fluid occupies {x : n . (x - origin) <= alpha} inside the cell, origin = lower-left corner.
struct PlicSegment {
    int cell = -1;
    Vec2 n = Vec2::Zero();  // unit, pointing out of the fluid
    double alpha = 0;
    Vec2 a = Vec2::Zero(), b = Vec2::Zero();
};

using Polygon = std::vector<Vec2>;

// Sutherland-Hodgman clip keeping {x : n . x <= c}.
Polygon clip_half_plane(const Polygon& poly, const Vec2& n, double c);
double polygon_area(const Polygon& poly);
Polygon rect_polygon(const Rect& r);

// Exact area of a disk intersected with a rectangle.
double disk_rect_area(const Vec2& center, double radius, const Rect& r);

GridInfo cell_grid(const Mesh2D& mesh);
Rect cell_rect(const GridInfo& grid, int i, int j);

// Circles by exact disk-rectangle areas; rectangles and polygons by clipping.
VolumeFractionField init_volume_fraction(const Mesh2D& mesh, const Shape& shape);
VolumeFractionField init_volume_fraction(const GridInfo& grid, const Shape& shape);

double total_volume(const VolumeFractionField& vf);

enum class GhostPolicy { None, ZeroGradient, Empty };

struct CellNormals {
    std::vector<Vec2> n;       // -grad F / |grad F|, out of the fluid
    std::vector<char> valid;   // false where |grad F| < 1e-12
};

// 3x3 Youngs stencil. GhostPolicy::None throws when a stencil leaves the grid.
CellNormals youngs_normal(const VolumeFractionField& vf, GhostPolicy ghosts = GhostPolicy::ZeroGradient);

bool is_interface_cell(double F);

// Fluid area of the unit-offset polygon n . (x - origin) <= alpha inside [0,hx]x[0,hy].
double plic_area(const Vec2& n, double alpha, double hx, double hy);
// alpha with plic_area = F hx hy to 1e-12 relative.
double plic_alpha(const Vec2& n, double F, double hx, double hy);

// Axis-aligned segments; orientation follows the axis with the larger |dF| across the cell.
std::vector<PlicSegment> reconstruct_slic(const VolumeFractionField& vf, GhostPolicy ghosts = GhostPolicy::ZeroGradient);
std::vector<PlicSegment> reconstruct_plic(const VolumeFractionField& vf, const CellNormals& normals);
std::vector<PlicSegment> reconstruct_plic(const VolumeFractionField& vf);

// Normal velocity on faces: u is ny x (nx+1) on vertical faces, v is (ny+1) x nx on horizontal faces.
struct FaceVelocity {
    Eigen::MatrixXd u, v;
};

FaceVelocity zero_face_velocity(const GridInfo& grid);
// Exactly divergence-free faces from a stream function sampled at grid nodes (u = dpsi/dy, v = -dpsi/dx).
FaceVelocity face_velocity_from_streamfunction(const GridInfo& grid, const std::function<double(const Vec2&)>& psi);
// Face averages of nodal velocities (grid nodes, node(i, j) numbering).
FaceVelocity face_velocity_from_nodes(const GridInfo& grid, const std::vector<Vec2>& nodal);
Eigen::VectorXd face_divergence(const GridInfo& grid, const FaceVelocity& vel);
// Removes the discrete divergence by a cell Poisson correction; wall faces with zero flux stay zero.
void make_divergence_free(const GridInfo& grid, FaceVelocity& vel);

double face_cfl(const GridInfo& grid, const FaceVelocity& vel, double dt);

// Split geometric advection of the PLIC fluid; inflow through the outer boundary carries no fluid.
// The sweep order alternates with step_index. Throws CflViolation above 0.5.
VolumeFractionField advect_geometric(const VolumeFractionField& vf, const FaceVelocity& vel, double dt, int step_index = 0);

// Height-function curvature on a 3x7 stencil; positive for fluid-convex interfaces.
// Returns nothing when the columns are not monotone or do not bracket the interface.
std::optional<double> curvature_height_function(const VolumeFractionField& vf, int cell);

// Divergence of the Youngs normal field, central differences.
double curvature_youngs_divergence(const VolumeFractionField& vf, const CellNormals& normals, int cell);

struct CurvatureField {
    Eigen::VectorXd kappa;       // per cell, interface cells only
    std::vector<char> from_heights;
};
CurvatureField vof_curvature(const VolumeFractionField& vf);

// Nodal level set corrected so that each mixed cell's linearized phase-1 area matches F in the
// least-squares sense (exactly where the crossings are free), full and empty cells keep their sign,
// and the total area equals sum F A. Throws InconsistentTopology when a full cell is entirely
// positive or an empty cell entirely negative.
struct ClsvofReport {
    int iterations = 0;
    int cells = 0;
    int matched_cells = 0;    // |area - F A| < 1e-8 A before the total-area shift
    double max_residual = 0;  // max |area - F A| after correction
};
LevelSetField clsvof_correct(const Mesh2D& mesh, const LevelSetField& ls, const VolumeFractionField& vf,
                             ClsvofReport* report = nullptr);

// Per-cell fraction of the linear level-set interpolant.
VolumeFractionField fraction_from_levelset(const Mesh2D& mesh, const Eigen::VectorXd& phi);

std::vector<Segment> segments_of(const std::vector<PlicSegment>& segs);
void write_fraction_csv(const std::string& path, const VolumeFractionField& vf);
void write_plic_vtk(const std::string& path, const std::vector<PlicSegment>& segs);

}  // namespace flowlab
