#include "flowlab/mac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "flowlab/errors.hpp"
#include "flowlab/io.hpp"
#include "flowlab/mesh.hpp"

namespace flowlab {

StaggeredGrid StaggeredGrid::make(int nx, int ny, double h, const Vec2& origin) {
    if (nx <= 0 || ny <= 0 || !(h > 0)) throw InvalidArgument("staggered grid needs positive size");
    StaggeredGrid g;
    g.nx = nx;
    g.ny = ny;
    g.h = h;
    g.origin = origin;
    g.u = Eigen::MatrixXd::Zero(ny, nx + 1);
    g.v = Eigen::MatrixXd::Zero(ny + 1, nx);
    g.p = Eigen::VectorXd::Zero(nx * ny);
    g.flags.assign(nx * ny, CellFlag::Empty);
    return g;
}

MarkerSet seed_markers(const StaggeredGrid& grid, const std::function<bool(const Vec2&)>& inside, int per_axis,
                       double jitter, unsigned seed) {
    if (per_axis < 1) throw InvalidArgument("markers per axis must be positive");
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    const double s = grid.h / per_axis;
    MarkerSet m;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            for (int b = 0; b < per_axis; ++b)
                for (int a = 0; a < per_axis; ++a) {
                    Vec2 x = grid.origin + Vec2(i * grid.h + (a + 0.5) * s, j * grid.h + (b + 0.5) * s);
                    if (jitter > 0) x += jitter * s * Vec2(U(rng), U(rng));
                    if (inside(x)) m.x.push_back(x);
                }
    return m;
}

namespace {

std::pair<int, int> locate_cell(const StaggeredGrid& g, const Vec2& x) {
    const Vec2 r = (x - g.origin) / g.h;
    return {std::clamp(static_cast<int>(std::floor(r.x())), 0, g.nx - 1),
            std::clamp(static_cast<int>(std::floor(r.y())), 0, g.ny - 1)};
}

bool occupied(const StaggeredGrid& g, int i, int j) { return g.inside(i, j) && g.flags[g.cell(i, j)] != CellFlag::Empty; }

}  // namespace

std::vector<int> marker_counts(const MarkerSet& markers, const StaggeredGrid& grid) {
    std::vector<int> count(grid.nx * grid.ny, 0);
    for (const auto& x : markers.x) {
        auto [i, j] = locate_cell(grid, x);
        ++count[grid.cell(i, j)];
    }
    return count;
}

std::vector<CellFlag> classify_cells(const MarkerSet& markers, const StaggeredGrid& grid) {
    const auto count = marker_counts(markers, grid);
    std::vector<CellFlag> flags(count.size(), CellFlag::Empty);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const int c = grid.cell(i, j);
            if (count[c] == 0) continue;
            bool empty_neighbor = false;
            const int di[4] = {-1, 1, 0, 0}, dj[4] = {0, 0, -1, 1};
            for (int k = 0; k < 4; ++k) {
                const int a = i + di[k], b = j + dj[k];
                if (grid.inside(a, b) && count[grid.cell(a, b)] == 0) empty_neighbor = true;
            }
            flags[c] = empty_neighbor ? CellFlag::Surface : CellFlag::Fluid;
        }
    return flags;
}

StaggeredVelocity predict_velocity(const StaggeredGrid& g, double dt, const MacParams& params) {
    if (!(dt > 0)) throw InvalidArgument("time step must be positive");
    const double h = g.h;
    if (params.nu > 0 && dt > h * h / (4 * params.nu)) {
        const double limit = h * h / (4 * params.nu);
        std::ostringstream msg;
        msg << "diffusive limit: dt " << dt << " exceeds h^2/(4 nu) = " << limit;
        throw CflViolation(dt / limit, limit, msg.str());
    }
    const double umax = std::max(g.u.cwiseAbs().maxCoeff(), g.v.cwiseAbs().maxCoeff());
    const double gamma = std::min(1.0, umax * dt / h);
    const double nu = params.nu;

    // Free-slip ghosts: tangential components mirror across walls, normal components vanish on them.
    auto U = [&](int j, int i) {
        j = j < 0 ? 0 : (j >= g.ny ? g.ny - 1 : j);
        if (i < 0 || i > g.nx) return 0.0;
        return g.u(j, i);
    };
    auto V = [&](int j, int i) {
        i = i < 0 ? 0 : (i >= g.nx ? g.nx - 1 : i);
        if (j < 0 || j > g.ny) return 0.0;
        return g.v(j, i);
    };

    StaggeredVelocity out{g.u, g.v};
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            if (!occupied(g, i - 1, j) && !occupied(g, i, j)) continue;
            const double uc = U(j, i), ue = U(j, i + 1), uw = U(j, i - 1), un = U(j + 1, i), us = U(j - 1, i);
            const double du2dx =
                ((0.25 * (uc + ue) * (uc + ue) - 0.25 * (uw + uc) * (uw + uc)) +
                 gamma * (0.25 * std::abs(uc + ue) * (uc - ue) - 0.25 * std::abs(uw + uc) * (uw - uc))) / h;
            const double vt = 0.5 * (V(j + 1, i - 1) + V(j + 1, i)), vb = 0.5 * (V(j, i - 1) + V(j, i));
            const double duvdy = ((vt * 0.5 * (uc + un) - vb * 0.5 * (us + uc)) +
                                  gamma * (std::abs(vt) * 0.5 * (uc - un) - std::abs(vb) * 0.5 * (us - uc))) / h;
            const double lap = (ue - 2 * uc + uw + un - 2 * uc + us) / (h * h);
            out.u(j, i) = uc + dt * (nu * lap - du2dx - duvdy + params.force.x());
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!occupied(g, i, j - 1) && !occupied(g, i, j)) continue;
            const double vc = V(j, i), vn = V(j + 1, i), vs = V(j - 1, i), ve = V(j, i + 1), vw = V(j, i - 1);
            const double dv2dy =
                ((0.25 * (vc + vn) * (vc + vn) - 0.25 * (vs + vc) * (vs + vc)) +
                 gamma * (0.25 * std::abs(vc + vn) * (vc - vn) - 0.25 * std::abs(vs + vc) * (vs - vc))) / h;
            const double ur = 0.5 * (U(j - 1, i + 1) + U(j, i + 1)), ul = 0.5 * (U(j - 1, i) + U(j, i));
            const double duvdx = ((ur * 0.5 * (vc + ve) - ul * 0.5 * (vw + vc)) +
                                  gamma * (std::abs(ur) * 0.5 * (vc - ve) - std::abs(ul) * 0.5 * (vw - vc))) / h;
            const double lap = (ve - 2 * vc + vw + vn - 2 * vc + vs) / (h * h);
            out.v(j, i) = vc + dt * (nu * lap - dv2dy - duvdx + params.force.y());
        }
    out.u.col(0).setZero();
    out.u.col(g.nx).setZero();
    out.v.row(0).setZero();
    out.v.row(g.ny).setZero();
    return out;
}

Eigen::VectorXd cell_divergence(const StaggeredGrid& g) {
    Eigen::VectorXd d(g.nx * g.ny);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            d(g.cell(i, j)) = (g.u(j, i + 1) - g.u(j, i) + g.v(j + 1, i) - g.v(j, i)) / g.h;
    return d;
}

ProjectionReport solve_pressure_projection(StaggeredGrid& g, const StaggeredVelocity& u_mom, double dt, double rho) {
    if (!(dt > 0) || !(rho > 0)) throw InvalidArgument("projection needs positive dt and density");
    g.u = u_mom.u;
    g.v = u_mom.v;
    g.p.setZero();
    ProjectionReport rep;
    std::vector<int> index(g.nx * g.ny, -1);
    std::vector<int> fluid;
    for (int c = 0; c < g.nx * g.ny; ++c)
        if (g.flags[c] == CellFlag::Fluid) {
            index[c] = static_cast<int>(fluid.size());
            fluid.push_back(c);
        }
    rep.fluid_cells = static_cast<int>(fluid.size());
    if (fluid.empty()) return rep;

    bool has_dirichlet = false;
    const int di[4] = {-1, 1, 0, 0}, dj[4] = {0, 0, -1, 1};
    for (int c : fluid) {
        const int i = c % g.nx, j = c / g.nx;
        for (int k = 0; k < 4; ++k)
            if (g.inside(i + di[k], j + dj[k]) && g.flags[g.cell(i + di[k], j + dj[k])] != CellFlag::Fluid)
                has_dirichlet = true;
    }
    // Without a free surface the pressure is fixed by removing the first fluid cell from the unknowns.
    const int pinned = has_dirichlet ? -1 : fluid.front();
    rep.pinned = pinned >= 0;

    const int n = static_cast<int>(fluid.size());
    const Eigen::VectorXd div = cell_divergence(g);
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd b(n);
    for (int r = 0; r < n; ++r) {
        const int c = fluid[r];
        if (c == pinned) {
            trip.emplace_back(r, r, 1.0);
            b(r) = 0;
            continue;
        }
        const int i = c % g.nx, j = c / g.nx;
        double diag = 0;
        for (int k = 0; k < 4; ++k) {
            const int a = i + di[k], bb = j + dj[k];
            if (!g.inside(a, bb)) continue;  // wall: no flux
            diag += 1;
            const int nb = g.cell(a, bb);
            if (g.flags[nb] == CellFlag::Fluid && nb != pinned) trip.emplace_back(r, index[nb], -1.0);
        }
        trip.emplace_back(r, r, diag);
        // -lap p = -(rho/dt) div u*, scaled by h^2
        b(r) = -rho / dt * div(c) * g.h * g.h;
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success) throw SolverFailure(0, "pressure Poisson factorization failed");
    const Eigen::VectorXd p = solver.solve(b);
    for (int r = 0; r < n; ++r) g.p(fluid[r]) = p(r);

    const double k = dt / (rho * g.h);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const int l = g.cell(i - 1, j), r = g.cell(i, j);
            if (g.flags[l] == CellFlag::Fluid || g.flags[r] == CellFlag::Fluid) g.u(j, i) -= k * (g.p(r) - g.p(l));
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int s = g.cell(i, j - 1), t = g.cell(i, j);
            if (g.flags[s] == CellFlag::Fluid || g.flags[t] == CellFlag::Fluid) g.v(j, i) -= k * (g.p(t) - g.p(s));
        }
    const Eigen::VectorXd d = cell_divergence(g);
    for (int c : fluid) rep.max_divergence = std::max(rep.max_divergence, std::abs(d(c)));
    return rep;
}

void apply_surface_velocity(StaggeredGrid& g) {
    auto empty = [&](int i, int j) { return g.inside(i, j) && g.flags[g.cell(i, j)] == CellFlag::Empty; };
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (g.flags[g.cell(i, j)] != CellFlag::Surface) continue;
            const bool ew = empty(i - 1, j), ee = empty(i + 1, j), es = empty(i, j - 1), en = empty(i, j + 1);
            const int n_empty = ew + ee + es + en;
            if (n_empty == 0) continue;
            // Net outflow through the faces that are not open to empty cells.
            double known = 0;
            if (!ee) known += g.u(j, i + 1);
            if (!ew) known -= g.u(j, i);
            if (!en) known += g.v(j + 1, i);
            if (!es) known -= g.v(j, i);
            const double share = -known / n_empty;
            if (ee) g.u(j, i + 1) = share;
            if (ew) g.u(j, i) = -share;
            if (en) g.v(j + 1, i) = share;
            if (es) g.v(j, i) = -share;
        }

    // Extrapolate into faces with no occupied neighbor.
    Eigen::MatrixXi ku = Eigen::MatrixXi::Zero(g.ny, g.nx + 1), kv = Eigen::MatrixXi::Zero(g.ny + 1, g.nx);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) ku(j, i) = i == 0 || i == g.nx || occupied(g, i - 1, j) || occupied(g, i, j);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) kv(j, i) = j == 0 || j == g.ny || occupied(g, i, j - 1) || occupied(g, i, j);
    for (int layer = 0; layer < 2; ++layer) {
        Eigen::MatrixXi nku = ku, nkv = kv;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i) {
                if (ku(j, i)) continue;
                double sum = 0;
                int cnt = 0;
                const int dj[4] = {-1, 1, 0, 0}, di[4] = {0, 0, -1, 1};
                for (int k = 0; k < 4; ++k) {
                    const int a = i + di[k], b = j + dj[k];
                    if (a < 1 || a >= g.nx || b < 0 || b >= g.ny || !ku(b, a)) continue;
                    sum += g.u(b, a);
                    ++cnt;
                }
                if (cnt) {
                    g.u(j, i) = sum / cnt;
                    nku(j, i) = 1;
                }
            }
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                if (kv(j, i)) continue;
                double sum = 0;
                int cnt = 0;
                const int dj[4] = {-1, 1, 0, 0}, di[4] = {0, 0, -1, 1};
                for (int k = 0; k < 4; ++k) {
                    const int a = i + di[k], b = j + dj[k];
                    if (a < 0 || a >= g.nx || b < 1 || b >= g.ny || !kv(b, a)) continue;
                    sum += g.v(b, a);
                    ++cnt;
                }
                if (cnt) {
                    g.v(j, i) = sum / cnt;
                    nkv(j, i) = 1;
                }
            }
        ku = nku;
        kv = nkv;
    }
    // Faces farther away carry no velocity.
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            if (!ku(j, i)) g.u(j, i) = 0;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (!kv(j, i)) g.v(j, i) = 0;
}

Vec2 interpolate_velocity(const StaggeredGrid& g, const Vec2& x) {
    const Vec2 r = (x - g.origin) / g.h;
    // u lives at (i, j + 1/2), v at (i + 1/2, j) in cell units.
    auto bilinear = [](const Eigen::MatrixXd& f, double s, double t, int imax, int jmax) {
        s = std::clamp(s, 0.0, double(imax));
        t = std::clamp(t, 0.0, double(jmax));
        const int i0 = std::min(static_cast<int>(std::floor(s)), imax - 1 < 0 ? 0 : imax - 1);
        const int j0 = std::min(static_cast<int>(std::floor(t)), jmax - 1 < 0 ? 0 : jmax - 1);
        const int i1 = std::min(i0 + 1, imax), j1 = std::min(j0 + 1, jmax);
        const double a = s - i0, b = t - j0;
        return (1 - a) * (1 - b) * f(j0, i0) + a * (1 - b) * f(j0, i1) + (1 - a) * b * f(j1, i0) + a * b * f(j1, i1);
    };
    const double ux = bilinear(g.u, r.x(), r.y() - 0.5, g.nx, g.ny - 1);
    const double vy = bilinear(g.v, r.x() - 0.5, r.y(), g.nx - 1, g.ny);
    return Vec2(ux, vy);
}

double max_face_speed(const StaggeredGrid& g) { return std::max(g.u.cwiseAbs().maxCoeff(), g.v.cwiseAbs().maxCoeff()); }

MarkerSet advect_markers(const MarkerSet& markers, const StaggeredGrid& g, double dt) {
    const double umax = max_face_speed(g);
    if (umax * dt > g.h * (1 + 1e-12)) {
        std::ostringstream msg;
        msg << "marker restriction: max displacement " << umax * dt << " exceeds one cell " << g.h;
        throw CflViolation(umax * dt / g.h, g.h / umax, msg.str());
    }
    const double x0 = g.origin.x(), y0 = g.origin.y(), x1 = x0 + g.width(), y1 = y0 + g.height();
    auto reflect = [&](Vec2 x) {
        if (x.x() < x0) x.x() = 2 * x0 - x.x();
        if (x.x() > x1) x.x() = 2 * x1 - x.x();
        if (x.y() < y0) x.y() = 2 * y0 - x.y();
        if (x.y() > y1) x.y() = 2 * y1 - x.y();
        x.x() = std::clamp(x.x(), x0, x1);
        x.y() = std::clamp(x.y(), y0, y1);
        return x;
    };
    MarkerSet out;
    out.x.reserve(markers.x.size());
    for (const auto& x : markers.x) {
        const Vec2 mid = reflect(x + 0.5 * dt * interpolate_velocity(g, x));
        out.x.push_back(reflect(x + dt * interpolate_velocity(g, mid)));
    }
    return out;
}

double kinetic_energy(const StaggeredGrid& g, double rho) {
    double e = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (g.flags[g.cell(i, j)] == CellFlag::Empty) continue;
            const double uc = 0.5 * (g.u(j, i) + g.u(j, i + 1)), vc = 0.5 * (g.v(j, i) + g.v(j + 1, i));
            e += 0.5 * rho * (uc * uc + vc * vc) * g.h * g.h;
        }
    return e;
}

MacStepReport mac_step(StaggeredGrid& g, MarkerSet& markers, double dt, const MacParams& params) {
    g.flags = classify_cells(markers, g);
    const StaggeredVelocity star = predict_velocity(g, dt, params);
    MacStepReport rep;
    rep.projection = solve_pressure_projection(g, star, dt, params.rho);
    apply_surface_velocity(g);
    markers = advect_markers(markers, g, dt);
    g.flags = classify_cells(markers, g);
    for (auto f : g.flags) {
        rep.fluid_cells += f == CellFlag::Fluid;
        rep.surface_cells += f == CellFlag::Surface;
    }
    rep.kinetic_energy = kinetic_energy(g, params.rho);
    return rep;
}

double mac_stable_dt(const StaggeredGrid& g, const MacParams& params, double safety) {
    double dt = std::numeric_limits<double>::infinity();
    const double umax = max_face_speed(g);
    if (umax > 0) dt = std::min(dt, safety * g.h / umax);
    if (params.nu > 0) dt = std::min(dt, safety * g.h * g.h / (4 * params.nu));
    const double f = params.force.norm();
    if (f > 0) dt = std::min(dt, safety * std::sqrt(g.h / f));
    return dt;
}

void write_mac_vtk(const std::string& path, const StaggeredGrid& g) {
    const Mesh2D mesh =
        build_structured_mesh(g.nx, g.ny, Rect{g.origin.x(), g.origin.y(), g.origin.x() + g.width(), g.origin.y() + g.height()},
                              ElementKind::Quad);
    ScalarField flags{"flag", FieldLocation::Cell, Eigen::VectorXd(g.nx * g.ny), ""};
    ScalarField p{"pressure", FieldLocation::Cell, g.p, "Pa"};
    VectorField vel{"velocity", FieldLocation::Cell, {}, "m/s"};
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int c = g.cell(i, j);
            flags.values(c) = static_cast<int>(g.flags[c]);
            vel.values.emplace_back(0.5 * (g.u(j, i) + g.u(j, i + 1)), 0.5 * (g.v(j, i) + g.v(j + 1, i)));
        }
    write_vtk(path, mesh, {flags, p}, {vel});
}

}  // namespace flowlab
