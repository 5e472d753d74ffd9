#pragma once

#include <string>
#include <utility>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "flowlab/io.hpp"

namespace flowlab {

// Concentration on a doubly periodic nx x ny node grid of spacing h; node (i, j) at (i h, j h), index j nx + i.
struct PhaseField {
    int nx = 0, ny = 0;
    double h = 0;
    Eigen::VectorXd C;
    double mobility = 1.0;
    double epsilon = 0.02;  // interface constant
    double V0 = 1.0;        // well depth

    static PhaseField make(int nx, int ny, double h, double mobility, double epsilon, double V0);
    int node(int i, int j) const { return j * nx + i; }
    double cell_area() const { return h * h; }
};

// V = (V0/4)(c^2 - 1)^2 and dV/dc = V0 c (c^2 - 1).
std::pair<double, double> double_well(double c, double V0);

// Five-point periodic Laplacian.
Eigen::SparseMatrix<double> periodic_laplacian(int nx, int ny, double h);

// mu = dV/dC - eps^2 Lap C at every node.
Eigen::VectorXd chemical_potential(const PhaseField& field);

// Sum of C times the nodal area.
double phase_mass(const PhaseField& field);

// Nodal quadrature of (eps^2/2)|grad C|^2 + V(C) with forward differences.
double free_energy(const PhaseField& field);

struct CahnHilliardReport {
    double mass_before = 0, mass_after = 0;
    double energy_before = 0, energy_after = 0;
    double solve_residual = 0;
};

// Stabilized linear convex splitting for dC/dt = div(M grad mu):
//   mu^{n+1} = V'(C^n) + S (C^{n+1} - C^n) - eps^2 Lap C^{n+1},  S = stabilization (defaults to 2 V0).
// mu is eliminated, leaving one SPD system (I - dt M S Lap + dt M eps^2 Lap^2) that is factored once.
class CahnHilliardSolver {
public:
    CahnHilliardSolver(const PhaseField& layout, double dt, double stabilization = -1.0);

    // Throws SolverFailure for a nonconvergent solve or an energy increase beyond round-off.
    PhaseField step(const PhaseField& field, CahnHilliardReport* report = nullptr) const;

    double dt() const { return dt_; }
    double stabilization() const { return S_; }

private:
    int nx_, ny_;
    double h_, dt_, S_, M_, eps_;
    Eigen::SparseMatrix<double> L_, A_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

PhaseField cahn_hilliard_step(const PhaseField& field, double dt, CahnHilliardReport* report = nullptr);

// Grid edges whose end values differ in sign, times h: a length estimate of the zero contour.
double interface_length(const PhaseField& field);

// Uniform C0 plus independent uniform noise in [-amplitude, amplitude].
PhaseField random_phase_field(int nx, int ny, double h, double C0, double amplitude, unsigned seed, double mobility,
                              double epsilon, double V0);

void write_phasefield_vtk(const std::string& path, const PhaseField& field);

}  // namespace flowlab
