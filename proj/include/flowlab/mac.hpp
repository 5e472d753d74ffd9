#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "flowlab/types.hpp"

namespace flowlab {

enum class CellFlag : std::uint8_t { Empty = 0, Surface = 1, Fluid = 2, Wall = 3 };

// Square cells of size h; free-slip walls on the outer boundary.
// u(j, i) sits on the vertical face x = x0 + i h of row j; v(j, i) on the horizontal face y = y0 + j h of column i.
struct StaggeredGrid {
    int nx = 0, ny = 0;
    double h = 0;
    Vec2 origin = Vec2::Zero();
    Eigen::MatrixXd u, v;
    Eigen::VectorXd p;  // cell centers
    std::vector<CellFlag> flags;

    static StaggeredGrid make(int nx, int ny, double h, const Vec2& origin = Vec2::Zero());
    int cell(int i, int j) const { return j * nx + i; }
    bool inside(int i, int j) const { return i >= 0 && j >= 0 && i < nx && j < ny; }
    Vec2 cell_center(int i, int j) const { return origin + h * Vec2(i + 0.5, j + 0.5); }
    double width() const { return nx * h; }
    double height() const { return ny * h; }
};

struct MarkerSet {
    std::vector<Vec2> x;
};

struct MacParams {
    double rho = 1000;
    double nu = 1e-6;
    Vec2 force = Vec2(0, -0.98);  // body force per unit mass
};

// per_axis^2 markers per cell at sub-cell centers where inside() holds; optional uniform jitter
// as a fraction of the sub-cell size.
MarkerSet seed_markers(const StaggeredGrid& grid, const std::function<bool(const Vec2&)>& inside, int per_axis = 2,
                       double jitter = 0.0, unsigned seed = 1);

std::vector<int> marker_counts(const MarkerSet& markers, const StaggeredGrid& grid);
std::vector<CellFlag> classify_cells(const MarkerSet& markers, const StaggeredGrid& grid);

struct StaggeredVelocity {
    Eigen::MatrixXd u, v;
};

// Explicit donor-cell predictor on faces next to non-empty cells; rejects dt > h^2 / (4 nu).
StaggeredVelocity predict_velocity(const StaggeredGrid& grid, double dt, const MacParams& params);

struct ProjectionReport {
    int fluid_cells = 0;
    bool pinned = false;
    double max_divergence = 0;  // over FLUID cells
};

// Pressure Poisson on FLUID cells with p = 0 in SURFACE cells and no flux through walls; stores p and
// the corrected velocity in grid.
ProjectionReport solve_pressure_projection(StaggeredGrid& grid, const StaggeredVelocity& u_mom, double dt, double rho);

// Faces between SURFACE and EMPTY cells take the flux that closes the cell balance; faces among
// EMPTY cells take the average of known neighbors (two layers).
void apply_surface_velocity(StaggeredGrid& grid);

Eigen::VectorXd cell_divergence(const StaggeredGrid& grid);
Vec2 interpolate_velocity(const StaggeredGrid& grid, const Vec2& x);
double max_face_speed(const StaggeredGrid& grid);

// Midpoint rule on bilinear face velocities; markers leaving the box are reflected back.
// Rejects dt max|u| > h.
MarkerSet advect_markers(const MarkerSet& markers, const StaggeredGrid& grid, double dt);

double kinetic_energy(const StaggeredGrid& grid, double rho);

struct MacStepReport {
    ProjectionReport projection;
    int fluid_cells = 0;
    int surface_cells = 0;
    double kinetic_energy = 0;
};

// classify, predict, project, close surface cells, advect markers, reclassify.
MacStepReport mac_step(StaggeredGrid& grid, MarkerSet& markers, double dt, const MacParams& params);

// Largest dt meeting the one-cell marker restriction (with a safety factor) and diffusive stability.
double mac_stable_dt(const StaggeredGrid& grid, const MacParams& params, double safety = 0.5);

void write_mac_vtk(const std::string& path, const StaggeredGrid& grid);

}  // namespace flowlab
