#include "flowlab/phasefield.hpp"

#include <cmath>
#include <random>

#include "flowlab/errors.hpp"
#include "flowlab/mesh.hpp"

namespace flowlab {

PhaseField PhaseField::make(int nx, int ny, double h, double mobility, double epsilon, double V0) {
    if (nx < 3 || ny < 1 || !(h > 0)) throw InvalidArgument("phase field grid needs nx >= 3, ny >= 1, h > 0");
    if (!(mobility > 0) || !(epsilon > 0) || !(V0 > 0)) throw InvalidArgument("phase field constants must be positive");
    PhaseField f;
    f.nx = nx;
    f.ny = ny;
    f.h = h;
    f.C = Eigen::VectorXd::Zero(nx * ny);
    f.mobility = mobility;
    f.epsilon = epsilon;
    f.V0 = V0;
    return f;
}

std::pair<double, double> double_well(double c, double V0) {
    const double s = c * c - 1.0;
    return {0.25 * V0 * s * s, V0 * c * s};
}

Eigen::SparseMatrix<double> periodic_laplacian(int nx, int ny, double h) {
    const int n = nx * ny;
    const double w = 1.0 / (h * h);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(5 * n);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int k = j * nx + i;
            double diag = 0;
            auto add = [&](int m) {
                t.emplace_back(k, m, w);
                diag -= w;
            };
            add(j * nx + (i + 1) % nx);
            add(j * nx + (i + nx - 1) % nx);
            if (ny > 1) {
                add(((j + 1) % ny) * nx + i);
                add(((j + ny - 1) % ny) * nx + i);
            }
            t.emplace_back(k, k, diag);
        }
    Eigen::SparseMatrix<double> L(n, n);
    L.setFromTriplets(t.begin(), t.end());
    return L;
}

namespace {

Eigen::VectorXd well_derivative(const Eigen::VectorXd& C, double V0) {
    return (V0 * C.array() * (C.array().square() - 1.0)).matrix();
}

// Kahan-summed total, so the mass check is not limited by summation order.
double compensated_sum(const Eigen::VectorXd& v) {
    double s = 0, c = 0;
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        const double y = v(k) - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

}  // namespace

Eigen::VectorXd chemical_potential(const PhaseField& f) {
    const auto L = periodic_laplacian(f.nx, f.ny, f.h);
    return well_derivative(f.C, f.V0) - f.epsilon * f.epsilon * (L * f.C);
}

double phase_mass(const PhaseField& f) { return compensated_sum(f.C) * f.cell_area(); }

double free_energy(const PhaseField& f) {
    const double e2 = f.epsilon * f.epsilon;
    double E = 0;
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) {
            const double c = f.C(f.node(i, j));
            const double dx = (f.C(f.node((i + 1) % f.nx, j)) - c) / f.h;
            const double dy = f.ny > 1 ? (f.C(f.node(i, (j + 1) % f.ny)) - c) / f.h : 0.0;
            E += 0.5 * e2 * (dx * dx + dy * dy) + double_well(c, f.V0).first;
        }
    return E * f.cell_area();
}

CahnHilliardSolver::CahnHilliardSolver(const PhaseField& layout, double dt, double stabilization)
    : nx_(layout.nx), ny_(layout.ny), h_(layout.h), dt_(dt), M_(layout.mobility), eps_(layout.epsilon) {
    if (!(dt > 0)) throw InvalidArgument("Cahn-Hilliard step needs dt > 0");
    S_ = stabilization >= 0 ? stabilization : 2.0 * layout.V0;
    L_ = periodic_laplacian(nx_, ny_, h_);
    const int n = nx_ * ny_;
    Eigen::SparseMatrix<double> I(n, n);
    I.setIdentity();
    const Eigen::SparseMatrix<double> L2 = L_ * L_;
    A_ = I - (dt_ * M_ * S_) * L_ + (dt_ * M_ * eps_ * eps_) * L2;
    solver_.compute(A_);
    if (solver_.info() != Eigen::Success) throw SolverFailure(0, "Cahn-Hilliard factorization failed");
}

PhaseField CahnHilliardSolver::step(const PhaseField& f, CahnHilliardReport* report) const {
    if (f.nx != nx_ || f.ny != ny_ || f.h != h_ || f.mobility != M_ || f.epsilon != eps_)
        throw InvalidArgument("phase field does not match the solver layout");
    const Eigen::VectorXd rhs = f.C + dt_ * M_ * (L_ * (well_derivative(f.C, f.V0) - S_ * f.C));
    PhaseField out = f;
    out.C = solver_.solve(rhs);
    const double residual = (A_ * out.C - rhs).norm() / std::max(1.0, rhs.norm());
    if (solver_.info() != Eigen::Success || !out.C.allFinite() || residual > 1e-10)
        throw SolverFailure(residual, "Cahn-Hilliard solve did not converge");
    // Lap has zero column sums, so the exact update keeps sum C; remove the round-off drift of the solve.
    out.C.array() += (compensated_sum(f.C) - compensated_sum(out.C)) / static_cast<double>(out.C.size());

    const double e0 = free_energy(f), e1 = free_energy(out);
    if (e1 > e0 + 1e-12 * std::max(1.0, std::abs(e0)))
        throw SolverFailure(e1 - e0, "Cahn-Hilliard step increased the free energy");
    if (report) {
        report->mass_before = phase_mass(f);
        report->mass_after = phase_mass(out);
        report->energy_before = e0;
        report->energy_after = e1;
        report->solve_residual = residual;
    }
    return out;
}

PhaseField cahn_hilliard_step(const PhaseField& field, double dt, CahnHilliardReport* report) {
    return CahnHilliardSolver(field, dt).step(field, report);
}

double interface_length(const PhaseField& f) {
    int cuts = 0;
    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) {
            const double c = f.C(f.node(i, j));
            if (c * f.C(f.node((i + 1) % f.nx, j)) < 0) ++cuts;
            if (f.ny > 1 && c * f.C(f.node(i, (j + 1) % f.ny)) < 0) ++cuts;
        }
    // a straight contour crossing edges at random angles cuts 4/pi edges per unit length per h
    return cuts * f.h * M_PI / 4.0;
}

PhaseField random_phase_field(int nx, int ny, double h, double C0, double amplitude, unsigned seed, double mobility,
                              double epsilon, double V0) {
    PhaseField f = PhaseField::make(nx, ny, h, mobility, epsilon, V0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-amplitude, amplitude);
    for (Eigen::Index k = 0; k < f.C.size(); ++k) f.C(k) = C0 + U(rng);
    return f;
}

void write_phasefield_vtk(const std::string& path, const PhaseField& f) {
    const Mesh2D mesh = build_structured_mesh(f.nx - 1, std::max(1, f.ny - 1),
                                              Rect{0, 0, (f.nx - 1) * f.h, std::max(1, f.ny - 1) * f.h},
                                              ElementKind::Quad);
    Eigen::VectorXd values(mesh.nodes.size());
    const int ny = std::max(2, f.ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < f.nx; ++i) values(j * f.nx + i) = f.C(f.node(i, std::min(j, f.ny - 1)));
    write_vtk(path, mesh, {ScalarField{"C", FieldLocation::Node, values, ""}});
}

}  // namespace flowlab
