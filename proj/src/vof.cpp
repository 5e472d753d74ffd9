#include "flowlab/vof.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "flowlab/errors.hpp"
#include "flowlab/io.hpp"

namespace flowlab {

namespace {

constexpr double kFracTol = 1e-12;

// Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
struct GaussLegendre {
    std::vector<double> x, w;
    explicit GaussLegendre(int n) : x(n), w(n) {
        for (int i = 0; i < n; ++i) {
            double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 1;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (t * p1 - p0) / (t * t - 1);
                const double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-16) break;
            }
            x[i] = t;
            w[i] = 2 / ((1 - t * t) * dp * dp);
        }
    }
};

const GaussLegendre& gauss16() {
    static const GaussLegendre rule(16);
    return rule;
}

double get_fraction(const VolumeFractionField& vf, int i, int j, GhostPolicy ghosts) {
    const auto& g = vf.grid;
    if (i >= 0 && i < g.nx && j >= 0 && j < g.ny) return vf.F(g.cell(i, j));
    switch (ghosts) {
        case GhostPolicy::ZeroGradient:
            return vf.F(g.cell(std::clamp(i, 0, g.nx - 1), std::clamp(j, 0, g.ny - 1)));
        case GhostPolicy::Empty:
            return 0.0;
        case GhostPolicy::None:
            break;
    }
    throw InvalidArgument("youngs stencil leaves the grid at cell (" + std::to_string(i) + ", " +
                          std::to_string(j) + ") and no ghost policy is set");
}

void check_grid(const GridInfo& g) {
    if (g.nx <= 0 || g.ny <= 0) throw InvalidArgument("volume fraction requires a structured grid");
}

// Fluid polygon of a PLIC cell in local coordinates.
Polygon local_fluid(const Vec2& n, double alpha, double hx, double hy) {
    return clip_half_plane(rect_polygon(Rect{0, 0, hx, hy}), n, alpha);
}

Vec2 local_normal(const CellNormals& normals, int c) { return normals.valid[c] ? normals.n[c] : Vec2(1, 0); }

}  // namespace

Polygon clip_half_plane(const Polygon& poly, const Vec2& n, double c) {
    Polygon out;
    const int m = static_cast<int>(poly.size());
    out.reserve(m + 2);
    for (int k = 0; k < m; ++k) {
        const Vec2& p = poly[k];
        const Vec2& q = poly[(k + 1) % m];
        const double dp = n.dot(p) - c, dq = n.dot(q) - c;
        if (dp <= 0) out.push_back(p);
        if ((dp < 0 && dq > 0) || (dp > 0 && dq < 0)) {
            const double t = dp / (dp - dq);
            out.push_back(p + t * (q - p));
        }
    }
    return out;
}

double polygon_area(const Polygon& poly) {
    double a = 0;
    const int m = static_cast<int>(poly.size());
    for (int k = 0; k < m; ++k) {
        const Vec2& p = poly[k];
        const Vec2& q = poly[(k + 1) % m];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

Polygon rect_polygon(const Rect& r) { return {Vec2(r.x0, r.y0), Vec2(r.x1, r.y0), Vec2(r.x1, r.y1), Vec2(r.x0, r.y1)}; }

double disk_rect_area(const Vec2& center, double radius, const Rect& r) {
    // x = cx + R sin(t): the chord length times dx is a trigonometric polynomial between breakpoints.
    const double R = radius;
    const double xa = std::max(r.x0, center.x() - R), xb = std::min(r.x1, center.x() + R);
    if (xa >= xb || r.y0 >= r.y1) return 0.0;
    const double ta = std::asin(std::clamp((xa - center.x()) / R, -1.0, 1.0));
    const double tb = std::asin(std::clamp((xb - center.x()) / R, -1.0, 1.0));
    std::vector<double> breaks = {ta, tb};
    for (double y : {r.y0, r.y1}) {
        const double d = std::abs(y - center.y());
        if (d < R) {
            const double t = std::acos(d / R);
            for (double s : {t, -t})
                if (s > ta && s < tb) breaks.push_back(s);
        }
    }
    std::sort(breaks.begin(), breaks.end());
    const auto& gl = gauss16();
    double area = 0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double a = breaks[k], b = breaks[k + 1];
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (std::size_t q = 0; q < gl.x.size(); ++q) {
            const double t = mid + half * gl.x[q];
            const double s = R * std::cos(t);
            const double len = std::max(0.0, std::min(r.y1, center.y() + s) - std::max(r.y0, center.y() - s));
            area += gl.w[q] * half * len * s;
        }
    }
    return area;
}

GridInfo cell_grid(const Mesh2D& mesh) {
    if (!mesh.grid || mesh.kind != ElementKind::Quad)
        throw InvalidArgument("volume fraction requires a structured quadrilateral mesh");
    return *mesh.grid;
}

Rect cell_rect(const GridInfo& g, int i, int j) {
    const double hx = g.hx(), hy = g.hy();
    return Rect{g.extent.x0 + i * hx, g.extent.y0 + j * hy, g.extent.x0 + (i + 1) * hx, g.extent.y0 + (j + 1) * hy};
}

VolumeFractionField init_volume_fraction(const Mesh2D& mesh, const Shape& shape) {
    return init_volume_fraction(cell_grid(mesh), shape);
}

VolumeFractionField init_volume_fraction(const GridInfo& grid, const Shape& shape) {
    check_grid(grid);
    VolumeFractionField vf;
    vf.grid = grid;
    vf.F = Eigen::VectorXd::Zero(grid.nx * grid.ny);
    const double A = grid.hx() * grid.hy();
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const Rect c = cell_rect(grid, i, j);
            double wet = 0;
            switch (shape.kind) {
                case Shape::Kind::Circle:
                    wet = disk_rect_area(shape.center, shape.radius, c);
                    break;
                case Shape::Kind::Rectangle: {
                    const double w = std::min(c.x1, shape.rect.x1) - std::max(c.x0, shape.rect.x0);
                    const double h = std::min(c.y1, shape.rect.y1) - std::max(c.y0, shape.rect.y0);
                    wet = (w > 0 && h > 0) ? w * h : 0.0;
                    break;
                }
                case Shape::Kind::Polygon: {
                    Polygon p = shape.polygon.points;
                    p = clip_half_plane(p, Vec2(-1, 0), -c.x0);
                    p = clip_half_plane(p, Vec2(1, 0), c.x1);
                    p = clip_half_plane(p, Vec2(0, -1), -c.y0);
                    p = clip_half_plane(p, Vec2(0, 1), c.y1);
                    wet = p.size() >= 3 ? std::abs(polygon_area(p)) : 0.0;
                    break;
                }
            }
            vf.F(grid.cell(i, j)) = std::clamp(wet / A, 0.0, 1.0);
        }
    return vf;
}

double total_volume(const VolumeFractionField& vf) { return vf.F.sum() * vf.grid.hx() * vf.grid.hy(); }

CellNormals youngs_normal(const VolumeFractionField& vf, GhostPolicy ghosts) {
    const auto& g = vf.grid;
    check_grid(g);
    CellNormals out;
    out.n.assign(g.nx * g.ny, Vec2::Zero());
    out.valid.assign(g.nx * g.ny, 0);
    const double hx = g.hx(), hy = g.hy();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            auto f = [&](int di, int dj) { return get_fraction(vf, i + di, j + dj, ghosts); };
            const double gx =
                ((f(1, 1) + 2 * f(1, 0) + f(1, -1)) - (f(-1, 1) + 2 * f(-1, 0) + f(-1, -1))) / (8 * hx);
            const double gy =
                ((f(1, 1) + 2 * f(0, 1) + f(-1, 1)) - (f(1, -1) + 2 * f(0, -1) + f(-1, -1))) / (8 * hy);
            const Vec2 grad(gx, gy);
            const double m = grad.norm();
            const int c = g.cell(i, j);
            if (m * std::min(hx, hy) < 1e-12) continue;
            out.n[c] = -grad / m;
            out.valid[c] = 1;
        }
    return out;
}

bool is_interface_cell(double F) { return F > kFracTol && F < 1 - kFracTol; }

double plic_area(const Vec2& n, double alpha, double hx, double hy) {
    const Polygon p = local_fluid(n, alpha, hx, hy);
    return p.size() >= 3 ? polygon_area(p) : 0.0;
}

double plic_alpha(const Vec2& n, double F, double hx, double hy) {
    // area(alpha) is monotone between the extreme corner projections; safeguarded Newton with
    // the cut length as derivative.
    const double corners[4] = {0.0, n.x() * hx, n.y() * hy, n.x() * hx + n.y() * hy};
    double lo = *std::min_element(corners, corners + 4), hi = *std::max_element(corners, corners + 4);
    const double A = hx * hy;
    const double target = std::clamp(F, 0.0, 1.0) * A;
    if (target <= 0) return lo;
    if (target >= A) return hi;
    double alpha = lo + F * (hi - lo);
    for (int it = 0; it < 200; ++it) {
        const double res = plic_area(n, alpha, hx, hy) - target;
        if (std::abs(res) <= 1e-15 * A) break;
        if (res > 0)
            hi = alpha;
        else
            lo = alpha;
        // Cut length: derivative of the clipped area with respect to alpha.
        const double eps = 1e-9 * (hi - lo + 1e-300);
        const double slope = (plic_area(n, alpha + eps, hx, hy) - plic_area(n, alpha - eps, hx, hy)) / (2 * eps);
        double next = slope > 0 ? alpha - res / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (hi - lo < 1e-16 * (std::abs(hi) + std::abs(lo) + std::max(hx, hy))) break;
        alpha = next;
    }
    return alpha;
}

namespace {

PlicSegment make_segment(const GridInfo& g, int i, int j, const Vec2& n, double alpha) {
    PlicSegment s;
    s.cell = g.cell(i, j);
    s.n = n;
    s.alpha = alpha;
    const Rect r = cell_rect(g, i, j);
    const Vec2 o(r.x0, r.y0);
    const Polygon p = local_fluid(n, alpha, g.hx(), g.hy());
    // Endpoints: vertices of the clipped polygon lying on the cut line, ordered so that the fluid
    // is on the left when walking from a to b.
    std::vector<Vec2> on;
    for (const auto& v : p)
        if (std::abs(n.dot(v) - alpha) <= 1e-12 * std::max(g.hx(), g.hy())) on.push_back(v);
    if (on.size() >= 2) {
        const Vec2 t(-n.y(), n.x());
        auto [mn, mx] = std::minmax_element(on.begin(), on.end(), [&](const Vec2& a, const Vec2& b) {
            return t.dot(a) < t.dot(b);
        });
        s.a = o + *mn;
        s.b = o + *mx;
    } else {
        s.a = s.b = o;
    }
    return s;
}

}  // namespace

std::vector<PlicSegment> reconstruct_plic(const VolumeFractionField& vf, const CellNormals& normals) {
    const auto& g = vf.grid;
    check_grid(g);
    std::vector<PlicSegment> out;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int c = g.cell(i, j);
            if (!is_interface_cell(vf.F(c))) continue;
            const Vec2 n = local_normal(normals, c);
            out.push_back(make_segment(g, i, j, n, plic_alpha(n, vf.F(c), g.hx(), g.hy())));
        }
    return out;
}

std::vector<PlicSegment> reconstruct_plic(const VolumeFractionField& vf) {
    return reconstruct_plic(vf, youngs_normal(vf));
}

std::vector<PlicSegment> reconstruct_slic(const VolumeFractionField& vf, GhostPolicy ghosts) {
    const auto& g = vf.grid;
    check_grid(g);
    std::vector<PlicSegment> out;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int c = g.cell(i, j);
            if (!is_interface_cell(vf.F(c))) continue;
            const double dx = get_fraction(vf, i + 1, j, ghosts) - get_fraction(vf, i - 1, j, ghosts);
            const double dy = get_fraction(vf, i, j + 1, ghosts) - get_fraction(vf, i, j - 1, ghosts);
            // Fluid sits on the side of the fuller neighbor; the normal points away from it.
            Vec2 n;
            if (std::abs(dx) >= std::abs(dy))
                n = dx > 0 ? Vec2(-1, 0) : Vec2(1, 0);
            else
                n = dy > 0 ? Vec2(0, -1) : Vec2(0, 1);
            out.push_back(make_segment(g, i, j, n, plic_alpha(n, vf.F(c), g.hx(), g.hy())));
        }
    return out;
}

FaceVelocity zero_face_velocity(const GridInfo& g) {
    return FaceVelocity{Eigen::MatrixXd::Zero(g.ny, g.nx + 1), Eigen::MatrixXd::Zero(g.ny + 1, g.nx)};
}

FaceVelocity face_velocity_from_streamfunction(const GridInfo& g, const std::function<double(const Vec2&)>& psi) {
    FaceVelocity v = zero_face_velocity(g);
    const double hx = g.hx(), hy = g.hy();
    auto node = [&](int i, int j) { return Vec2(g.extent.x0 + i * hx, g.extent.y0 + j * hy); };
    Eigen::MatrixXd P(g.ny + 1, g.nx + 1);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) P(j, i) = psi(node(i, j));
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) v.u(j, i) = (P(j + 1, i) - P(j, i)) / hy;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) v.v(j, i) = -(P(j, i + 1) - P(j, i)) / hx;
    return v;
}

FaceVelocity face_velocity_from_nodes(const GridInfo& g, const std::vector<Vec2>& nodal) {
    if (static_cast<int>(nodal.size()) != (g.nx + 1) * (g.ny + 1))
        throw InvalidArgument("nodal velocity size does not match the grid");
    FaceVelocity v = zero_face_velocity(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) v.u(j, i) = 0.5 * (nodal[g.node(i, j)].x() + nodal[g.node(i, j + 1)].x());
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) v.v(j, i) = 0.5 * (nodal[g.node(i, j)].y() + nodal[g.node(i + 1, j)].y());
    return v;
}

Eigen::VectorXd face_divergence(const GridInfo& g, const FaceVelocity& vel) {
    Eigen::VectorXd d(g.nx * g.ny);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            d(g.cell(i, j)) = (vel.u(j, i + 1) - vel.u(j, i)) / g.hx() + (vel.v(j + 1, i) - vel.v(j, i)) / g.hy();
    return d;
}

void make_divergence_free(const GridInfo& g, FaceVelocity& vel) {
    const int n = g.nx * g.ny;
    const double ax = 1 / (g.hx() * g.hx()), ay = 1 / (g.hy() * g.hy());
    Eigen::VectorXd rhs = face_divergence(g, vel);
    rhs.array() -= rhs.mean();
    // Negative Neumann Laplacian with cell 0 pinned.
    std::vector<Eigen::Triplet<double>> trip;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int c = g.cell(i, j);
            if (c == 0) {
                trip.emplace_back(c, c, 1.0);
                continue;
            }
            double diag = 0;
            auto link = [&](int ii, int jj, double a) {
                if (ii < 0 || jj < 0 || ii >= g.nx || jj >= g.ny) return;
                diag += a;
                const int d = g.cell(ii, jj);
                if (d != 0) trip.emplace_back(c, d, -a);
            };
            link(i - 1, j, ax);
            link(i + 1, j, ax);
            link(i, j - 1, ay);
            link(i, j + 1, ay);
            trip.emplace_back(c, c, diag);
        }
    Eigen::SparseMatrix<double> L(n, n);
    L.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXd b = -rhs;
    b(0) = 0;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(L);
    if (solver.info() != Eigen::Success) throw SolverFailure(0, "face projection factorization failed");
    const Eigen::VectorXd p = solver.solve(b);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) vel.u(j, i) -= (p(g.cell(i, j)) - p(g.cell(i - 1, j))) / g.hx();
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) vel.v(j, i) -= (p(g.cell(i, j)) - p(g.cell(i, j - 1))) / g.hy();
}

double face_cfl(const GridInfo& g, const FaceVelocity& vel, double dt) {
    const double ux = vel.u.size() ? vel.u.cwiseAbs().maxCoeff() : 0.0;
    const double vy = vel.v.size() ? vel.v.cwiseAbs().maxCoeff() : 0.0;
    return std::max(ux * dt / g.hx(), vy * dt / g.hy());
}

namespace {

// Fluid volume in a strip of width w adjacent to one side of the donor cell.
double strip_volume(const GridInfo& g, double F, const Vec2& n, int axis, bool high_side, double w) {
    const double hx = g.hx(), hy = g.hy();
    const double full = w * (axis == 0 ? hy : hx);
    if (F <= 0) return 0.0;
    if (F >= 1) return full;
    Polygon p = local_fluid(n, plic_alpha(n, F, hx, hy), hx, hy);
    const double len = axis == 0 ? hx : hy;
    Vec2 e = Vec2::Zero();
    e(axis) = 1;
    if (high_side)
        p = clip_half_plane(p, -e, -(len - w));
    else
        p = clip_half_plane(p, e, w);
    return p.size() >= 3 ? polygon_area(p) : 0.0;
}

void sweep(VolumeFractionField& vf, const FaceVelocity& vel, double dt, int axis, const Eigen::VectorXd& F0) {
    const auto& g = vf.grid;
    const CellNormals normals = youngs_normal(vf);
    const double h = axis == 0 ? g.hx() : g.hy();
    const double A = g.hx() * g.hy();
    const int n_lines = axis == 0 ? g.ny : g.nx;
    const int n_cells = axis == 0 ? g.nx : g.ny;
    Eigen::VectorXd Fn = vf.F;
    std::vector<double> Q(n_cells + 1);
    for (int line = 0; line < n_lines; ++line) {
        auto cell = [&](int k) { return axis == 0 ? g.cell(k, line) : g.cell(line, k); };
        auto face = [&](int k) { return axis == 0 ? vel.u(line, k) : vel.v(k, line); };
        for (int k = 0; k <= n_cells; ++k) {
            const double un = face(k);
            const double w = std::abs(un) * dt;
            Q[k] = 0;
            if (w == 0) continue;
            const int donor = un > 0 ? k - 1 : k;
            if (donor < 0 || donor >= n_cells) continue;  // inflow from outside carries no fluid
            const int c = cell(donor);
            const double vol = strip_volume(g, vf.F(c), local_normal(normals, c), axis, un > 0, w);
            Q[k] = un > 0 ? vol : -vol;
        }
        for (int k = 0; k < n_cells; ++k) {
            const int c = cell(k);
            const double comp = F0(c) > 0.5 ? 1.0 : 0.0;
            Fn(c) = vf.F(c) + (Q[k] - Q[k + 1]) / A + comp * dt * (face(k + 1) - face(k)) / h;
        }
    }
    for (int c = 0; c < Fn.size(); ++c) {
        const double clamped = std::clamp(Fn(c), 0.0, 1.0);
        vf.clamped_mass += std::abs(clamped - Fn(c)) * A;
        Fn(c) = clamped;
    }
    vf.F = Fn;
}

}  // namespace

VolumeFractionField advect_geometric(const VolumeFractionField& vf, const FaceVelocity& vel, double dt,
                                     int step_index) {
    const auto& g = vf.grid;
    check_grid(g);
    if (vel.u.rows() != g.ny || vel.u.cols() != g.nx + 1 || vel.v.rows() != g.ny + 1 || vel.v.cols() != g.nx)
        throw InvalidArgument("face velocity does not match the grid");
    if (!(dt > 0)) throw InvalidArgument("time step must be positive");
    const double cfl = face_cfl(g, vel, dt);
    if (cfl > 0.5 + 1e-12) {
        std::ostringstream msg;
        msg << "VOF CFL " << cfl << " exceeds 0.5; use dt <= " << dt * 0.5 / cfl;
        throw CflViolation(cfl, dt * 0.5 / cfl, msg.str());
    }
    VolumeFractionField out = vf;
    if (cfl == 0) return out;
    const Eigen::VectorXd F0 = vf.F;
    const int first = step_index % 2;
    sweep(out, vel, dt, first, F0);
    sweep(out, vel, dt, 1 - first, F0);
    return out;
}

std::optional<double> curvature_height_function(const VolumeFractionField& vf, int cell) {
    const auto& g = vf.grid;
    check_grid(g);
    const int i = cell % g.nx, j = cell / g.nx;
    const CellNormals normals = [&] {
        // Local Youngs normal only; avoids a whole-field pass per query.
        CellNormals one;
        one.n.assign(1, Vec2::Zero());
        one.valid.assign(1, 0);
        auto f = [&](int di, int dj) { return get_fraction(vf, i + di, j + dj, GhostPolicy::ZeroGradient); };
        const double gx = ((f(1, 1) + 2 * f(1, 0) + f(1, -1)) - (f(-1, 1) + 2 * f(-1, 0) + f(-1, -1))) / (8 * g.hx());
        const double gy = ((f(1, 1) + 2 * f(0, 1) + f(-1, 1)) - (f(1, -1) + 2 * f(0, -1) + f(-1, -1))) / (8 * g.hy());
        const Vec2 grad(gx, gy);
        if (grad.norm() > 0) {
            one.n[0] = -grad.normalized();
            one.valid[0] = 1;
        }
        return one;
    }();
    if (!normals.valid[0]) return std::nullopt;
    const Vec2 n = normals.n[0];
    const bool vertical = std::abs(n.y()) >= std::abs(n.x());
    const int axis = vertical ? 1 : 0;           // column direction
    const double hc = vertical ? g.hy() : g.hx();  // along the column
    const double ht = vertical ? g.hx() : g.hy();  // across columns
    const int sign = n(axis) > 0 ? 1 : -1;       // fluid toward -sign along the column
    double H[3];
    for (int k = -1; k <= 1; ++k) {
        double sum = 0;
        double prev = 2;
        for (int m = -3; m <= 3; ++m) {
            // Walk from the fluid end toward the empty end.
            const int s = sign * m;
            const int ci = vertical ? i + k : i + s;
            const int cj = vertical ? j + s : j + k;
            if (ci < 0 || cj < 0 || ci >= g.nx || cj >= g.ny) return std::nullopt;
            const double F = vf.F(g.cell(ci, cj));
            if (F > prev + 1e-12) return std::nullopt;
            if (m == -3 && F < 1 - 1e-6) return std::nullopt;
            if (m == 3 && F > 1e-6) return std::nullopt;
            prev = F;
            sum += F;
        }
        H[k + 1] = sum * hc;
    }
    const double d1 = (H[2] - H[0]) / (2 * ht);
    const double d2 = (H[2] - 2 * H[1] + H[0]) / (ht * ht);
    return -d2 / std::pow(1 + d1 * d1, 1.5);
}

double curvature_youngs_divergence(const VolumeFractionField& vf, const CellNormals& normals, int cell) {
    const auto& g = vf.grid;
    const int i = cell % g.nx, j = cell / g.nx;
    auto n_at = [&](int ii, int jj) {
        ii = std::clamp(ii, 0, g.nx - 1);
        jj = std::clamp(jj, 0, g.ny - 1);
        const int c = g.cell(ii, jj);
        return normals.valid[c] ? normals.n[c] : normals.n[cell];
    };
    return (n_at(i + 1, j).x() - n_at(i - 1, j).x()) / (2 * g.hx()) +
           (n_at(i, j + 1).y() - n_at(i, j - 1).y()) / (2 * g.hy());
}

CurvatureField vof_curvature(const VolumeFractionField& vf) {
    const auto& g = vf.grid;
    const CellNormals normals = youngs_normal(vf);
    CurvatureField out;
    out.kappa = Eigen::VectorXd::Zero(g.nx * g.ny);
    out.from_heights.assign(g.nx * g.ny, 0);
    for (int c = 0; c < g.nx * g.ny; ++c) {
        if (!is_interface_cell(vf.F(c))) continue;
        if (auto k = curvature_height_function(vf, c)) {
            out.kappa(c) = *k;
            out.from_heights[c] = 1;
        } else {
            out.kappa(c) = curvature_youngs_divergence(vf, normals, c);
        }
    }
    return out;
}

VolumeFractionField fraction_from_levelset(const Mesh2D& mesh, const Eigen::VectorXd& phi) {
    VolumeFractionField vf;
    vf.grid = cell_grid(mesh);
    const double A = vf.grid.hx() * vf.grid.hy();
    vf.F.resize(mesh.num_elements());
    for (int e = 0; e < mesh.num_elements(); ++e)
        vf.F(e) = std::clamp(element_phase1_area(mesh, phi, e) / A, 0.0, 1.0);
    return vf;
}

LevelSetField clsvof_correct(const Mesh2D& mesh, const LevelSetField& ls, const VolumeFractionField& vf,
                             ClsvofReport* report) {
    const GridInfo g = cell_grid(mesh);
    if (vf.grid.nx != g.nx || vf.grid.ny != g.ny || ls.phi.size() != mesh.num_nodes())
        throw InvalidArgument("level set and volume fraction grids differ");
    const double A = g.hx() * g.hy();
    const double h = std::min(g.hx(), g.hy());
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double margin = 1e-6 * h;

    // Full and empty cells bound the sign of their nodes; mixed cells carry one area equation.
    std::vector<int> cells, bad;
    std::vector<double> lo(mesh.num_nodes(), -inf), hi(mesh.num_nodes(), inf);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        double pmin = inf, pmax = -inf;
        for (int k = 0; k < 4; ++k) {
            pmin = std::min(pmin, ls.phi(mesh.elements[e][k]));
            pmax = std::max(pmax, ls.phi(mesh.elements[e][k]));
        }
        const double F = vf.F(e);
        if ((F >= 1 - kFracTol && pmin > 0) || (F <= kFracTol && pmax < 0)) bad.push_back(e);
        if (is_interface_cell(F)) {
            cells.push_back(e);
        } else {
            // A small margin keeps bounded nodes off the zero level, where cell areas have kinks.
            for (int k = 0; k < 4; ++k) {
                const int n = mesh.elements[e][k];
                if (F >= 1 - kFracTol)
                    hi[n] = -margin;
                else
                    lo[n] = margin;
            }
        }
    }
    // Nodes between a full and an empty cell sit on the interface.
    for (int n = 0; n < mesh.num_nodes(); ++n)
        if (lo[n] > hi[n]) lo[n] = hi[n] = 0;
    if (!bad.empty()) {
        std::ostringstream msg;
        msg << "level set and volume fraction disagree in " << bad.size() << " cells:";
        for (std::size_t k = 0; k < std::min<std::size_t>(bad.size(), 20); ++k) msg << ' ' << bad[k];
        throw InconsistentTopology(bad, msg.str());
    }

    std::vector<int> local(mesh.num_nodes(), -1), nodes;
    for (int e : cells)
        for (int k = 0; k < 4; ++k) {
            const int n = mesh.elements[e][k];
            if (local[n] < 0) {
                local[n] = static_cast<int>(nodes.size());
                nodes.push_back(n);
            }
        }
    const int nc = static_cast<int>(cells.size()), nn = static_cast<int>(nodes.size());
    auto residual = [&](const Eigen::VectorXd& phi) {
        Eigen::VectorXd r(nc);
        for (int k = 0; k < nc; ++k) r(k) = element_phase1_area(mesh, phi, cells[k]) - vf.F(cells[k]) * A;
        return r;
    };
    auto violates = [&](const Eigen::VectorXd& phi) {
        for (int n = 0; n < mesh.num_nodes(); ++n)
            if (phi(n) < lo[n] || phi(n) > hi[n]) return true;
        return false;
    };

    LevelSetField out = ls;
    const double tol = 1e-10 * A;
    Eigen::VectorXd r = residual(out.phi);
    const bool needs_work = violates(out.phi) || (nc > 0 && r.cwiseAbs().maxCoeff() > tol);
    int iterations = 0;

    // Sign-bounded nodes are parametrized as phi = side * exp(z), which keeps them strictly on
    // their side; nodes bounded from both sides are fixed on the interface.
    std::vector<int> side(nn, 0);
    for (int k = 0; k < nn; ++k) {
        const int n = nodes[k];
        if (lo[n] == 0 && hi[n] == 0) {
            side[k] = 2;
            out.phi(n) = 0;
        } else if (lo[n] > -inf) {
            side[k] = 1;
        } else if (hi[n] < inf) {
            side[k] = -1;
        }
    }
    if (needs_work) {
        for (int n = 0; n < mesh.num_nodes(); ++n)
            if (local[n] < 0) out.phi(n) = std::clamp(out.phi(n), lo[n], hi[n]);
        for (int k = 0; k < nn; ++k) {
            const int n = nodes[k];
            if (side[k] == 1 || side[k] == -1) out.phi(n) = side[k] * std::max(side[k] * out.phi(n), 1e-3 * h);
        }
        r = residual(out.phi);
    }
    Eigen::VectorXd x(nn);
    for (int k = 0; k < nn; ++k) {
        const double v = out.phi(nodes[k]);
        x(k) = (side[k] == 1 || side[k] == -1) ? std::log(std::abs(v)) : v;
    }
    auto apply = [&](const Eigen::VectorXd& xv, Eigen::VectorXd& phi) {
        for (int k = 0; k < nn; ++k)
            if (side[k] == 1 || side[k] == -1)
                phi(nodes[k]) = side[k] * std::exp(xv(k));
            else if (side[k] == 0)
                phi(nodes[k]) = xv(k);
    };

    double lambda = 1e-6;
    for (; needs_work && iterations < 200 && nc > 0 && r.cwiseAbs().maxCoeff() > tol; ++iterations) {
        // Finite-difference derivatives of each cell area with respect to its four nodal values.
        const double delta = 1e-7 * h;
        Eigen::VectorXd phi = out.phi;
        std::vector<Eigen::Triplet<double>> trip;
        for (int k = 0; k < nc; ++k) {
            const int e = cells[k];
            double d[4], row_norm = 0;
            for (int q = 0; q < 4; ++q) {
                const int n = mesh.elements[e][q];
                const double save = phi(n);
                const bool bounded = side[local[n]] == 1 || side[local[n]] == -1;
                const double dn_free = delta * std::max(1.0, std::abs(save) / h);
                const double dn = bounded ? std::min(dn_free, 0.5 * std::abs(save)) : dn_free;
                phi(n) = save + dn;
                const double ap = element_phase1_area(mesh, phi, e);
                phi(n) = save - dn;
                const double am = element_phase1_area(mesh, phi, e);
                phi(n) = save;
                d[q] = (ap - am) / (2 * dn);
                row_norm += std::abs(d[q]);
            }
            // An uncut cell has no area sensitivity; raising phi always removes phase 1.
            if (row_norm == 0)
                for (double& dq : d) dq = -A / (4 * h);
            for (int q = 0; q < 4; ++q) {
                const int n = mesh.elements[e][q];
                const int k2 = local[n];
                if (side[k2] == 2) continue;
                const double chain = side[k2] == 0 ? 1.0 : phi(n);
                trip.emplace_back(k, k2, d[q] * chain);
            }
        }
        Eigen::SparseMatrix<double> J(nc, nn);
        J.setFromTriplets(trip.begin(), trip.end());
        const Eigen::SparseMatrix<double> JJt = J * J.transpose();
        const double scale = std::max(JJt.diagonal().maxCoeff(), 1e-300);
        const double r0 = r.norm();
        bool accepted = false;
        // Levenberg-Marquardt on the minimum-norm step.
        for (int tries = 0; tries < 40 && !accepted; ++tries) {
            Eigen::SparseMatrix<double> M = JJt;
            for (int k = 0; k < nc; ++k) M.coeffRef(k, k) += lambda * scale;
            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(M);
            if (solver.info() != Eigen::Success) throw SolverFailure(0, "CLSVOF normal equations failed");
            Eigen::VectorXd dx = -(J.transpose() * solver.solve(r));
            for (int k = 0; k < nn; ++k)
                if (side[k] == 1 || side[k] == -1) dx(k) = std::clamp(dx(k), -2.0, 2.0);
            Eigen::VectorXd trial_x = x + dx;
            Eigen::VectorXd trial = out.phi;
            apply(trial_x, trial);
            const Eigen::VectorXd r_trial = residual(trial);
            if (r_trial.norm() < r0) {
                x = trial_x;
                out.phi = trial;
                r = r_trial;
                lambda = std::max(lambda * 0.1, 1e-14);
                accepted = true;
            } else {
                lambda *= 10;
            }
        }
        if (!accepted) break;
    }
    const int matched = static_cast<int>((r.array().abs() < 1e-8 * A).count());
    // Cells whose edge crossings are pinned by their neighbors can stay unmatched; a uniform
    // shift then restores the total area exactly.
    if (needs_work && nc > 0 && r.cwiseAbs().maxCoeff() > tol) {
        const double band = out.band_width > 0 ? out.band_width : 4 * h;
        LevelSetField tmp{out.phi, band};
        out.phi = global_mass_correction(mesh, tmp, vf.F.sum() * A, 0.0).field.phi;
    }
    if (needs_work) {
        if (out.band_width <= 0) out.band_width = 4 * h;
        out = reinitialize_narrow_band(mesh, out);
        r = residual(out.phi);
    }
    if (report) {
        report->iterations = iterations;
        report->cells = nc;
        report->max_residual = nc ? r.cwiseAbs().maxCoeff() : 0.0;
        report->matched_cells = matched;
    }
    return out;
}

std::vector<Segment> segments_of(const std::vector<PlicSegment>& segs) {
    std::vector<Segment> out;
    out.reserve(segs.size());
    for (const auto& s : segs) out.emplace_back(s.a, s.b);
    return out;
}

void write_fraction_csv(const std::string& path, const VolumeFractionField& vf) {
    CsvTable t;
    t.header = {"i", "j", "x", "y", "F"};
    const auto& g = vf.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const Rect r = cell_rect(g, i, j);
            t.rows.push_back({double(i), double(j), 0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1), vf.F(g.cell(i, j))});
        }
    t.write(path);
}

void write_plic_vtk(const std::string& path, const std::vector<PlicSegment>& segs) {
    write_vtk_lines(path, segments_of(segs));
}

}  // namespace flowlab
