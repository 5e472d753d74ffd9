#include "flowlab/surface.hpp"

#include <cmath>
#include <fstream>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "flowlab/errors.hpp"
#include "flowlab/levelset.hpp"

namespace flowlab {

namespace {

void require_nonzero_segments(const Polyline& p) {
    for (int s = 0; s < p.num_segments(); ++s)
        if (!(segment_length(p, s) > 0)) throw InvalidArgument("zero-length interface element " + std::to_string(s));
}

}  // namespace

std::vector<Vec2> laplace_beltrami_force(const Polyline& p, double gamma) {
    if (p.size() < 2) throw InvalidArgument("interface needs at least one element");
    require_nonzero_segments(p);
    std::vector<Vec2> f(p.size(), Vec2::Zero());
    for (int s = 0; s < p.num_segments(); ++s) {
        const int a = s, b = (s + 1) % p.size();
        const Vec2 t = (p.at(b) - p.at(a)) / segment_length(p, s);
        // dw_a/dxi = -1, dw_b/dxi = +1; the metric factors cancel for a straight element
        f[a] += gamma * t;
        f[b] -= gamma * t;
    }
    return f;
}

std::vector<Vec2> curvature_force(const Polyline& p, const std::vector<double>& kappa, double gamma) {
    if (static_cast<int>(kappa.size()) != p.size()) throw InvalidArgument("one curvature per interface node");
    require_nonzero_segments(p);
    std::vector<Vec2> f(p.size(), Vec2::Zero());
    for (int s = 0; s < p.num_segments(); ++s) {
        const int a = s, b = (s + 1) % p.size();
        const Vec2 ln = segment_length(p, s) * segment_normal(p, s);
        f[a] -= 0.5 * gamma * kappa[a] * ln;
        f[b] -= 0.5 * gamma * kappa[b] * ln;
    }
    return f;
}

std::vector<Vec2> csf_force(const Mesh2D& mesh, const Eigen::VectorXd& phi, double gamma, double eps) {
    if (!(eps > 0)) throw InvalidArgument("CSF needs eps > 0");
    const auto geo = normals_and_curvature(mesh, phi);
    std::vector<Vec2> f(mesh.num_nodes(), Vec2::Zero());
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        if (!geo.valid[i] || std::abs(phi(i)) >= eps) continue;
        f[i] = -gamma * geo.curvature(i) * smoothed_delta(phi(i), eps) * geo.normal[i];
    }
    return f;
}

namespace {

// Consistent mass and stiffness of linear elements on a closed curve.
void curve_matrices(const Polyline& p, Eigen::SparseMatrix<double>* M, Eigen::SparseMatrix<double>* K) {
    const int n = p.size();
    std::vector<Eigen::Triplet<double>> tm, tk;
    for (int s = 0; s < n; ++s) {
        const int a = s, b = (s + 1) % n;
        const double l = segment_length(p, s);
        tm.emplace_back(a, a, l / 3);
        tm.emplace_back(b, b, l / 3);
        tm.emplace_back(a, b, l / 6);
        tm.emplace_back(b, a, l / 6);
        tk.emplace_back(a, a, 1 / l);
        tk.emplace_back(b, b, 1 / l);
        tk.emplace_back(a, b, -1 / l);
        tk.emplace_back(b, a, -1 / l);
    }
    if (M) {
        M->resize(n, n);
        M->setFromTriplets(tm.begin(), tm.end());
    }
    if (K) {
        K->resize(n, n);
        K->setFromTriplets(tk.begin(), tk.end());
    }
}

}  // namespace

double surfactant_mass(const Polyline& p, const SurfactantField& g) {
    double m = 0;
    for (int s = 0; s < p.num_segments(); ++s) {
        const int a = s, b = (s + 1) % p.size();
        m += 0.5 * segment_length(p, s) * (g.G(a) + g.G(b));
    }
    return m;
}

SurfactantStep surfactant_step(const SurfactantField& g, const Polyline& p, const std::vector<Vec2>& u, double dt,
                               double diffusivity, const std::vector<Vec2>& mesh_velocity) {
    if (!p.closed) throw InvalidArgument("surfactant transport needs a closed curve");
    const int n = p.size();
    if (n < 3 || static_cast<int>(u.size()) != n || g.G.size() != n) throw InvalidArgument("surfactant: size mismatch");
    if (!(dt > 0) || diffusivity < 0) throw InvalidArgument("surfactant: need dt > 0 and diffusivity >= 0");
    const std::vector<Vec2>& v = mesh_velocity.empty() ? u : mesh_velocity;
    if (static_cast<int>(v.size()) != n) throw InvalidArgument("surfactant: mesh velocity size mismatch");
    require_nonzero_segments(p);

    Eigen::SparseMatrix<double> M0, M1, K1;
    curve_matrices(p, &M0, nullptr);
    Eigen::VectorXd rhs = M0 * g.G;
    // explicit relative transport: int G (u - v)_t dw/ds over the old elements
    for (int s = 0; s < n; ++s) {
        const int a = s, b = (s + 1) % n;
        const double l = segment_length(p, s);
        const Vec2 t = (p.at(b) - p.at(a)) / l;
        const double wa = (u[a] - v[a]).dot(t), wb = (u[b] - v[b]).dot(t);
        // integral of G w_t over the element (linear times linear), times dw/ds = -+1/l
        const double flux = l * (g.G(a) * (2 * wa + wb) + g.G(b) * (wa + 2 * wb)) / 6.0 / l;
        rhs(a) -= dt * flux;
        rhs(b) += dt * flux;
    }
    SurfactantStep out;
    out.curve = p;
    for (int i = 0; i < n; ++i) out.curve.points[i] += dt * v[i];
    require_nonzero_segments(out.curve);
    curve_matrices(out.curve, &M1, &K1);
    const Eigen::SparseMatrix<double> A = M1 + (dt * diffusivity) * K1;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    out.g.G = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !out.g.G.allFinite())
        throw SolverFailure((A * out.g.G - rhs).norm(), "surfactant solve failed");
    return out;
}

void write_surface_vtk(const std::string& path, const Polyline& p, const std::vector<Vec2>& force,
                       const SurfactantField* g) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path);
    os.precision(17);
    const int n = p.size();
    os << "# vtk DataFile Version 3.0\ninterface\nASCII\nDATASET POLYDATA\nPOINTS " << n << " double\n";
    for (const auto& x : p.points) os << x.x() << ' ' << x.y() << " 0\n";
    const int m = p.num_segments();
    os << "LINES " << m << ' ' << 3 * m << '\n';
    for (int s = 0; s < m; ++s) os << "2 " << s << ' ' << (s + 1) % n << '\n';
    os << "POINT_DATA " << n << '\n';
    if (static_cast<int>(force.size()) == n) {
        os << "VECTORS force double\n";
        for (const auto& f : force) os << f.x() << ' ' << f.y() << " 0\n";
    }
    if (g) {
        os << "SCALARS G double 1\nLOOKUP_TABLE default\n";
        for (int i = 0; i < n; ++i) os << g->G(i) << '\n';
    }
}

}  // namespace flowlab
