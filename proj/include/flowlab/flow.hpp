#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "flowlab/mesh.hpp"
#include "flowlab/polyline.hpp"

namespace flowlab {

struct FluidProps {
    double rho1 = 1, rho2 = 1;
    double mu1 = 1, mu2 = 1;
    double gamma = 0;
    Vec2 body_force = Vec2::Zero();

    void validate() const;
    double rho(int phase) const { return phase == 1 ? rho1 : rho2; }
    double mu(int phase) const { return phase == 1 ? mu1 : mu2; }
};

struct Material {
    double rho = 1, mu = 1;
};

// Material at a quadrature point: element, physical point, shape values.
using MaterialFn = std::function<Material(int element, const Vec2& x, const Eigen::Vector4d& N)>;

MaterialFn uniform_material(double rho, double mu);
// Uses mesh.element_phase (1 or 2).
MaterialFn element_phase_material(const Mesh2D& mesh, const FluidProps& props);
// Fraction of phase 1 per element (cell), averaged linearly.
MaterialFn cell_fraction_material(const Eigen::VectorXd& phase1_fraction, const FluidProps& props);

// Pressure unknowns: one per node, plus a second one for doubled interface nodes.
struct PressureDofs {
    std::vector<int> phase1;  // per node
    std::vector<int> phase2;  // per node; equals phase1 unless doubled
    int count = 0;

    bool doubled(int node) const { return phase1[node] != phase2[node]; }
    int element_dof(const Mesh2D& mesh, int element, int node) const;
};

PressureDofs make_pressure_dofs(const Mesh2D& mesh, bool doubled_pressure);

struct FlowState {
    std::vector<Vec2> u;
    Eigen::VectorXd p;  // indexed by PressureDofs
    PressureDofs pdofs;
    double time = 0;

    // Nodal pressure, phase-1 value at doubled nodes.
    Eigen::VectorXd nodal_pressure() const;
    double max_speed() const;
};

FlowState zero_state(const Mesh2D& mesh, bool doubled_pressure = false);

struct DirichletBC {
    int node = -1;
    int component = 0;
    double value = 0;
};

// Wall node whose normal velocity is constrained to zero.
struct SlipBC {
    int node = -1;
    Vec2 normal = Vec2(0, 1);
};

struct FlowBoundary {
    std::vector<DirichletBC> fixed;
    std::vector<SlipBC> slip;
    std::vector<std::pair<int, double>> pressure_fixed;  // (pressure dof, value)
    // Traction-free boundary present: pressure level is determined, no pin needed.
    bool traction_free = false;
    // Boundary edges on slip walls; the pressure boundary integral there is added back so that
    // a hydrostatic field stays at rest on polygonal approximations of curved walls.
    std::vector<std::array<int, 2>> slip_edges;

    void fix_velocity(int node, const Vec2& value);
};

// Dirichlet u = value on every edge carrying one of the tags.
void add_noslip(FlowBoundary& bc, const Mesh2D& mesh, std::initializer_list<int> tags, const Vec2& value = Vec2::Zero());
// Axis-aligned slip on the tagged edges (normal from the edge direction).
void add_axis_slip(FlowBoundary& bc, const Mesh2D& mesh, std::initializer_list<int> tags);

struct FlowOptions {
    bool doubled_pressure = false;
    bool stabilization = true;  // PSPG
    bool supg = true;
    double stab_scale = 1.0;
    int quad_degree = 2;
    int pin_node = -1;  // node whose phase-1 pressure is pinned when needed; -1 picks node 0
    bool wall_pressure_correction = true;
    // time stepping: refinement sweeps on the previous step's factorization before refactoring
    int reuse_iterations = 12;
};

struct LinearSystem {
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd b;
    int num_nodes = 0;
    PressureDofs pdofs;
    // Row r < 2*num_nodes is velocity component r%2 of node r/2; the rest are pressure dofs.
    int velocity_dof(int node, int comp) const { return 2 * node + comp; }
    int pressure_row(int pdof) const { return 2 * num_nodes + pdof; }
    int size() const { return static_cast<int>(b.size()); }
    std::vector<int> continuity_rows_constrained;  // pressure rows replaced by constraints
    std::vector<Mat2> rotation;                     // per node, identity unless rotated
    std::vector<std::string> warnings;
};

struct FlowForces {
    Vec2 body = Vec2::Zero();                  // acceleration, m/s^2
    const std::vector<Vec2>* volume = nullptr;  // nodal force density, N/m^3
    const std::vector<Vec2>* nodal = nullptr;   // nodal loads, N (per unit depth)
};

// Stationary Stokes: -div sigma = rho f + forces, div u = 0.
LinearSystem assemble_stokes(const Mesh2D& mesh, const MaterialFn& material, const FlowForces& forces,
                             const FlowBoundary& bc, const FlowOptions& options);

// Symmetric elimination of rows: x(r) = value, the row and column set to the identity.
void constrain_rows(LinearSystem& sys, const std::map<int, double>& rows);

// Transforms node blocks to the (t, n) frames O = [t n] (A <- O^T A O, b <- O^T b) and constrains
// the normal component to zero. frames[i] belongs to wall_nodes[i].
void apply_rotated_slip(LinearSystem& sys, const std::vector<int>& wall_nodes, const std::vector<Mat2>& frames);

// Remaining constraints (Dirichlet velocities, pressure values, pressure pin), symmetric elimination.
void apply_constraints(LinearSystem& sys, const FlowBoundary& bc, const FlowOptions& options);

struct SolveInfo {
    double residual = 0;             // relative residual of the constrained system
    double continuity_residual = 0;  // max |stabilized continuity row residual|
    double galerkin_divergence = 0;  // max |int q div u| over pressure test functions
};

// Sparse LU with a cached symbolic factorization keyed on the sparsity pattern.
// With reuse_iterations > 0, a matrix with an unchanged pattern is first solved by iterative
// refinement on the previous factorization; it is refactored when that does not converge.
class SparseDirectSolver {
public:
    explicit SparseDirectSolver(int reuse_iterations = 0);
    ~SparseDirectSolver();
    Eigen::VectorXd solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b, double* residual = nullptr);
    bool last_refactored() const { return last_refactored_; }

    static constexpr double reuse_tolerance = 1e-11;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int reuse_iterations_ = 0;
    bool last_refactored_ = true;
};

// Assemble, constrain, solve; rotate velocities back to Cartesian.
FlowState solve_stokes(const Mesh2D& mesh, const MaterialFn& material, const FlowForces& forces, const FlowBoundary& bc,
                       const FlowOptions& options, SolveInfo* info = nullptr);

class NavierStokesSolver {
public:
    NavierStokesSolver(const Mesh2D& mesh, FlowOptions options)
        : mesh_(&mesh), options_(options), solver_(options.reuse_iterations) {}
    void set_mesh(const Mesh2D& mesh) { mesh_ = &mesh; }

    // Backward-Euler step of the Oseen linearization about the current velocity; the advecting
    // velocity is u - mesh_velocity on moving meshes.
    FlowState step(const FlowState& state, const MaterialFn& material, const FlowForces& forces, const FlowBoundary& bc,
                   double dt, const std::vector<Vec2>* mesh_velocity = nullptr, SolveInfo* info = nullptr);

    double max_cfl(const FlowState& state, double dt) const;

private:
    const Mesh2D* mesh_;
    FlowOptions options_;
    SparseDirectSolver solver_;
};

FlowState navier_stokes_step(const FlowState& state, const Mesh2D& mesh, const MaterialFn& material,
                             const FlowForces& forces, const FlowBoundary& bc, double dt,
                             const FlowOptions& options = {}, SolveInfo* info = nullptr);

struct JumpReport {
    std::vector<double> dp;             // p_inside - p_outside per interface sample
    std::vector<double> viscous_inner;  // 2 mu du_n/dn, inside
    std::vector<double> viscous_outer;
    double mean_dp = 0;
    double max_velocity_mismatch = 0;
};

// Conforming case: doubled pressure at interface nodes; phase 1 is the inside.
JumpReport measure_interface_jump(const Mesh2D& mesh, const FlowState& state, const InterfacePolyline& interface,
                                  const FluidProps& props);
// Capturing case: samples at x -/+ offset*n with n pointing out of phase 1.
JumpReport measure_interface_jump(const Mesh2D& mesh, const FlowState& state, const Polyline& interface,
                                  const std::vector<Vec2>& normals, double offset);

// Element velocity gradient at the element centroid.
Mat2 velocity_gradient(const Mesh2D& mesh, const std::vector<Vec2>& u, int element);

}  // namespace flowlab
