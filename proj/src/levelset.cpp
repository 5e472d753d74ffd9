#include "flowlab/levelset.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "flowlab/errors.hpp"

namespace flowlab {

Shape Shape::circle(const Vec2& c, double r) {
    Shape s;
    s.kind = Kind::Circle;
    s.center = c;
    s.radius = r;
    return s;
}

Shape Shape::rectangle(const Rect& r) {
    Shape s;
    s.kind = Kind::Rectangle;
    s.rect = r;
    return s;
}

Shape Shape::polygon_region(const Polyline& p) {
    Shape s;
    s.kind = Kind::Polygon;
    s.polygon = p;
    s.polygon.closed = true;
    return s;
}

double Shape::signed_distance(const Vec2& x) const {
    switch (kind) {
        case Kind::Circle:
            return (x - center).norm() - radius;
        case Kind::Rectangle: {
            const Vec2 c(0.5 * (rect.x0 + rect.x1), 0.5 * (rect.y0 + rect.y1));
            const Vec2 half(0.5 * rect.width(), 0.5 * rect.height());
            const Vec2 q = (x - c).cwiseAbs() - half;
            return q.cwiseMax(0.0).norm() + std::min(std::max(q.x(), q.y()), 0.0);
        }
        case Kind::Polygon: {
            double d = std::numeric_limits<double>::infinity();
            bool inside = false;
            const int n = polygon.size();
            for (int i = 0; i < n; ++i) {
                const Vec2 &a = polygon.at(i), &b = polygon.at(i + 1);
                d = std::min(d, point_segment_distance(x, a, b));
                if ((a.y() > x.y()) != (b.y() > x.y()) &&
                    x.x() < a.x() + (x.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y()))
                    inside = !inside;
            }
            return inside ? -d : d;
        }
    }
    return 0;
}

LevelSetField init_signed_distance(const Mesh2D& mesh, const Shape& shape, double band_width) {
    const bool empty = (shape.kind == Shape::Kind::Circle && !(shape.radius > 0)) ||
                       (shape.kind == Shape::Kind::Rectangle && !(shape.rect.width() > 0 && shape.rect.height() > 0)) ||
                       (shape.kind == Shape::Kind::Polygon && shape.polygon.size() < 3);
    if (empty) throw InvalidArgument("empty shape");
    LevelSetField ls;
    ls.band_width = band_width;
    ls.phi.resize(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i) ls.phi(i) = shape.signed_distance(mesh.nodes[i]);
    return ls;
}

double smoothed_heaviside(double phi, double eps) {
    const double s = phi / eps;
    if (s <= -1) return 0.0;
    if (s >= 1) return 1.0;
    const double s2 = s * s;
    return 0.5 + 15.0 / 16.0 * s * (1 - 2 * s2 / 3 + s2 * s2 / 5);
}

double smoothed_delta(double phi, double eps) {
    const double s = phi / eps;
    if (std::abs(s) >= 1) return 0.0;
    const double t = 1 - s * s;
    return 15.0 / (16.0 * eps) * t * t;
}

double advection_cfl(const Mesh2D& mesh, const std::vector<Vec2>& velocity, double dt) {
    double cfl = 0;
    const int npe = mesh.nodes_per_element();
    for (int e = 0; e < mesh.num_elements(); ++e) {
        double u = 0;
        for (int k = 0; k < npe; ++k) u = std::max(u, velocity[mesh.elements[e][k]].norm());
        cfl = std::max(cfl, u * dt / element_size(mesh, e));
    }
    return cfl;
}

Eigen::VectorXd LevelSetAdvector::advect(const Eigen::VectorXd& phi, const std::vector<Vec2>& velocity, double dt) const {
    const Mesh2D& mesh = *mesh_;
    if (phi.size() != mesh.num_nodes() || static_cast<int>(velocity.size()) != mesh.num_nodes())
        throw InvalidArgument("level set and velocity must be nodal fields");
    if (!(dt > 0)) throw InvalidArgument("time step must be positive");
    const double cfl = advection_cfl(mesh, velocity, dt);
    if (cfl > 1.0) throw CflViolation(cfl, dt / cfl, "level-set advection CFL " + std::to_string(cfl) + " > 1");
    if (cfl == 0.0) return phi;

    const int npe = mesh.nodes_per_element();
    const auto rule = element_rule(mesh, 2);
    std::vector<Eigen::Triplet<double>> tm, tk;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& el = mesh.elements[e];
        const double h = element_size(mesh, e);
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const auto s = shape_eval(mesh, e, rule.points[q]);
            const double w = rule.weights[q] * s.detJ;
            Vec2 a = Vec2::Zero();
            for (int k = 0; k < npe; ++k) a += s.N(k) * velocity[el[k]];
            const double tau = 1.0 / std::sqrt(4 / (dt * dt) + 4 * a.squaredNorm() / (h * h));
            for (int i = 0; i < npe; ++i) {
                const double wi = s.N(i) + tau * a.dot(s.dN.row(i).transpose());
                for (int j = 0; j < npe; ++j) {
                    tm.emplace_back(el[i], el[j], w * wi * s.N(j));
                    tk.emplace_back(el[i], el[j], w * wi * a.dot(s.dN.row(j).transpose()));
                }
            }
        }
    }
    const int n = mesh.num_nodes();
    Eigen::SparseMatrix<double> M(n, n), K(n, n);
    M.setFromTriplets(tm.begin(), tm.end());
    K.setFromTriplets(tk.begin(), tk.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(M);
    if (lu.info() != Eigen::Success) throw SolverFailure(INFINITY, "level-set mass matrix factorization failed");
    auto rate = [&](const Eigen::VectorXd& f) -> Eigen::VectorXd { return -lu.solve(K * f); };
    const Eigen::VectorXd p1 = phi + dt * rate(phi);
    const Eigen::VectorXd p2 = 0.75 * phi + 0.25 * (p1 + dt * rate(p1));
    return phi / 3.0 + 2.0 / 3.0 * (p2 + dt * rate(p2));
}

Eigen::VectorXd advect(const Mesh2D& mesh, const Eigen::VectorXd& phi, const std::vector<Vec2>& velocity, double dt) {
    return LevelSetAdvector(mesh).advect(phi, velocity, dt);
}

namespace {

Vec2 crossing_point(const Vec2& pa, const Vec2& pb, double fa, double fb) {
    const double t = fa / (fa - fb);
    return pa + t * (pb - pa);
}

// Phase-1 part of a linear triangle: area and first moment.
void negative_part(const Vec2 p[3], const double f[3], double& area, Vec2& moment) {
    auto tri = [&](const Vec2& a, const Vec2& b, const Vec2& c, double sign) {
        const double A = 0.5 * cross2(b - a, c - a);
        area += sign * A;
        moment += sign * A * (a + b + c) / 3.0;
    };
    int neg = 0;
    for (int k = 0; k < 3; ++k) neg += f[k] < 0;
    if (neg == 0) return;
    if (neg == 3) {
        tri(p[0], p[1], p[2], 1);
        return;
    }
    // the odd vertex out
    const bool odd_negative = neg == 1;
    int i = 0;
    for (int k = 0; k < 3; ++k)
        if ((f[k] < 0) == odd_negative) i = k;
    const int j = (i + 1) % 3, l = (i + 2) % 3;
    const Vec2 xj = crossing_point(p[i], p[j], f[i], f[j]);
    const Vec2 xl = crossing_point(p[i], p[l], f[i], f[l]);
    if (odd_negative) {
        tri(p[i], xj, xl, 1);
    } else {
        tri(p[0], p[1], p[2], 1);
        tri(p[i], xj, xl, -1);
    }
}

template <class F>
void for_each_subtriangle(const Mesh2D& mesh, F&& f) {
    for (int e = 0; e < mesh.num_elements(); ++e)
        for (const auto& t : sub_triangles(mesh, e)) f(t);
}

}  // namespace

std::vector<Segment> zero_set_segments(const Mesh2D& mesh, const Eigen::VectorXd& phi) {
    std::vector<Segment> out;
    for_each_subtriangle(mesh, [&](const std::array<int, 3>& t) {
        const double f[3] = {phi(t[0]), phi(t[1]), phi(t[2])};
        int neg = 0;
        for (double v : f) neg += v < 0;
        if (neg == 0 || neg == 3) return;
        const bool odd_negative = neg == 1;
        int i = 0;
        for (int k = 0; k < 3; ++k)
            if ((f[k] < 0) == odd_negative) i = k;
        const int j = (i + 1) % 3, l = (i + 2) % 3;
        const Vec2 &pi = mesh.nodes[t[i]], &pj = mesh.nodes[t[j]], &pl = mesh.nodes[t[l]];
        Vec2 a = crossing_point(pi, pj, f[i], f[j]);
        Vec2 b = crossing_point(pi, pl, f[i], f[l]);
        if ((a - b).norm() == 0) return;
        // phase 1 on the left so the right-hand normal points out of it
        const Vec2 inner = odd_negative ? pi : Vec2((pj + pl) / 2);
        if (cross2(b - a, inner - a) < 0) std::swap(a, b);
        out.emplace_back(a, b);
    });
    return out;
}

std::vector<EdgeCrossing> zero_set_crossings(const Mesh2D& mesh, const Eigen::VectorXd& phi) {
    std::map<std::pair<int, int>, Vec2> found;
    for_each_subtriangle(mesh, [&](const std::array<int, 3>& t) {
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            if ((phi(a) < 0) == (phi(b) < 0)) continue;
            if (a > b) std::swap(a, b);
            found.emplace(std::make_pair(a, b), crossing_point(mesh.nodes[a], mesh.nodes[b], phi(a), phi(b)));
        }
    });
    std::vector<EdgeCrossing> out;
    for (const auto& [k, x] : found) out.push_back({k.first, k.second, x});
    return out;
}

LevelSetField reinitialize_narrow_band(const Mesh2D& mesh, const LevelSetField& ls, ReinitReport* report) {
    const auto& phi = ls.phi;
    if (phi.size() != mesh.num_nodes()) throw InvalidArgument("level set does not match mesh");
    if (!(ls.band_width > 0)) throw InvalidArgument("band width must be positive");
    const auto segs = zero_set_segments(mesh, phi);
    const auto cross = zero_set_crossings(mesh, phi);
    if (segs.empty() || cross.empty()) throw Error("no interface");

    const int n = mesh.num_nodes();
    Eigen::VectorXd dist(n);
    for (int i = 0; i < n; ++i) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& s : segs) d = std::min(d, point_segment_distance(mesh.nodes[i], s.first, s.second));
        dist(i) = d;
    }

    // connected groups of cut nodes
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<char> cut(n, 0);
    for (const auto& c : cross) {
        cut[c.a] = cut[c.b] = 1;
        parent[find(c.a)] = find(c.b);
    }
    std::map<int, std::pair<double, double>> fit;  // root -> (sum |phi| d, sum phi^2)
    for (int i = 0; i < n; ++i)
        if (cut[i]) {
            auto& f = fit[find(i)];
            f.first += std::abs(phi(i)) * dist(i);
            f.second += phi(i) * phi(i);
        }

    LevelSetField out;
    out.band_width = ls.band_width;
    out.phi.resize(n);
    int band = 0, ncut = 0;
    for (int i = 0; i < n; ++i) {
        const double sgn = phi(i) < 0 ? -1.0 : 1.0;
        if (cut[i]) {
            const auto& f = fit[find(i)];
            const double s = f.second > 0 ? f.first / f.second : 1.0;
            out.phi(i) = s * phi(i);
            ++ncut;
            ++band;
        } else if (dist(i) <= ls.band_width) {
            out.phi(i) = sgn * dist(i);
            ++band;
        } else {
            out.phi(i) = sgn * std::max(std::abs(phi(i)), ls.band_width);
        }
    }
    if (report) {
        report->cut_nodes = ncut;
        report->band_nodes = band;
        report->components = static_cast<int>(fit.size());
    }
    return out;
}

double phase1_area(const Mesh2D& mesh, const Eigen::VectorXd& phi, double eps) {
    if (eps > 0) {
        const auto rule = element_rule(mesh, 4);
        const int npe = mesh.nodes_per_element();
        double a = 0;
        for (int e = 0; e < mesh.num_elements(); ++e)
            for (size_t q = 0; q < rule.points.size(); ++q) {
                const auto s = shape_eval(mesh, e, rule.points[q]);
                double f = 0;
                for (int k = 0; k < npe; ++k) f += s.N(k) * phi(mesh.elements[e][k]);
                a += rule.weights[q] * s.detJ * (1 - smoothed_heaviside(f, eps));
            }
        return a;
    }
    double area = 0;
    Vec2 moment = Vec2::Zero();
    for_each_subtriangle(mesh, [&](const std::array<int, 3>& t) {
        const Vec2 p[3] = {mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]};
        const double f[3] = {phi(t[0]), phi(t[1]), phi(t[2])};
        negative_part(p, f, area, moment);
    });
    return area;
}

double element_phase1_area(const Mesh2D& mesh, const Eigen::VectorXd& phi, int element) {
    double area = 0;
    Vec2 moment = Vec2::Zero();
    for (const auto& t : sub_triangles(mesh, element)) {
        const Vec2 p[3] = {mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]};
        const double f[3] = {phi(t[0]), phi(t[1]), phi(t[2])};
        negative_part(p, f, area, moment);
    }
    return area;
}

Vec2 phase1_centroid(const Mesh2D& mesh, const Eigen::VectorXd& phi) {
    double area = 0;
    Vec2 moment = Vec2::Zero();
    for_each_subtriangle(mesh, [&](const std::array<int, 3>& t) {
        const Vec2 p[3] = {mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]};
        const double f[3] = {phi(t[0]), phi(t[1]), phi(t[2])};
        negative_part(p, f, area, moment);
    });
    if (area <= 0) throw Error("no phase-1 region");
    return moment / area;
}

MassCorrection global_mass_correction(const Mesh2D& mesh, const LevelSetField& ls, double target_area, double eps) {
    if (!(target_area > 0)) throw InvalidArgument("target area must be positive");
    MassCorrection r;
    r.field = ls;
    auto area = [&](double c) { return phase1_area(mesh, (ls.phi.array() + c).matrix(), eps); };
    const double tol = 1e-12 * target_area;
    if (std::abs(area(0) - target_area) <= tol) return r;
    double lo = -ls.band_width, hi = ls.band_width;  // area(lo) >= area(hi)
    if (area(lo) < target_area || area(hi) > target_area)
        throw Error("mass correction target unreachable within the band");
    double c = 0;
    for (r.iterations = 1; r.iterations <= 200; ++r.iterations) {
        c = 0.5 * (lo + hi);
        const double a = area(c);
        if (std::abs(a - target_area) <= tol || hi - lo < 1e-17) break;
        if (a > target_area)
            lo = c;
        else
            hi = c;
    }
    r.shift = c;
    r.field.phi = (ls.phi.array() + c).matrix();
    return r;
}

std::vector<Vec2> recovered_gradient(const Mesh2D& mesh, const Eigen::VectorXd& phi) {
    const int npe = mesh.nodes_per_element();
    const auto rule = element_rule(mesh, 2);
    std::vector<Vec2> g(mesh.num_nodes(), Vec2::Zero());
    Eigen::VectorXd m = Eigen::VectorXd::Zero(mesh.num_nodes());
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& el = mesh.elements[e];
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const auto s = shape_eval(mesh, e, rule.points[q]);
            const double w = rule.weights[q] * s.detJ;
            Vec2 grad = Vec2::Zero();
            for (int k = 0; k < npe; ++k) grad += phi(el[k]) * s.dN.row(k).transpose();
            for (int k = 0; k < npe; ++k) {
                g[el[k]] += w * s.N(k) * grad;
                m(el[k]) += w * s.N(k);
            }
        }
    }
    for (int i = 0; i < mesh.num_nodes(); ++i) g[i] /= m(i);
    return g;
}

InterfaceGeometry normals_and_curvature(const Mesh2D& mesh, const Eigen::VectorXd& phi) {
    const auto g = recovered_gradient(mesh, phi);
    InterfaceGeometry out;
    const int n = mesh.num_nodes();
    out.normal.assign(n, Vec2::Zero());
    out.valid.assign(n, 0);
    out.curvature = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        const double len = g[i].norm();
        if (len > 1e-12) {
            out.normal[i] = g[i] / len;
            out.valid[i] = 1;
        }
    }
    const int npe = mesh.nodes_per_element();
    const auto rule = element_rule(mesh, 2);
    Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& el = mesh.elements[e];
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const auto s = shape_eval(mesh, e, rule.points[q]);
            const double w = rule.weights[q] * s.detJ;
            double div = 0;
            for (int k = 0; k < npe; ++k) div += s.dN.row(k).dot(out.normal[el[k]]);
            for (int k = 0; k < npe; ++k) {
                out.curvature(el[k]) += w * s.N(k) * div;
                m(el[k]) += w * s.N(k);
            }
        }
    }
    out.curvature.array() /= m.array();
    for (int i = 0; i < n; ++i)
        if (!out.valid[i]) out.curvature(i) = 0;
    return out;
}

double gradient_deviation(const Mesh2D& mesh, const LevelSetField& ls) {
    const auto g = recovered_gradient(mesh, ls.phi);
    const auto adj = node_elements(mesh);
    const int npe = mesh.nodes_per_element();
    double worst = 0;
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        if (std::abs(ls.phi(i)) >= ls.band_width) continue;
        bool interior = true;
        for (int e : adj[i])
            for (int k = 0; k < npe; ++k)
                if (std::abs(ls.phi(mesh.elements[e][k])) >= ls.band_width) interior = false;
        if (interior) worst = std::max(worst, std::abs(g[i].norm() - 1));
    }
    return worst;
}

SmoothedProps smoothed_material_props(const Eigen::VectorXd& phi, const FluidProps& props, double eps) {
    if (!(eps > 0)) throw InvalidArgument("smoothing width must be positive");
    SmoothedProps out;
    out.rho.resize(phi.size());
    out.mu.resize(phi.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i) {
        const double H = smoothed_heaviside(phi(i), eps);
        out.rho(i) = props.rho1 + (props.rho2 - props.rho1) * H;
        out.mu(i) = props.mu1 + (props.mu2 - props.mu1) * H;
    }
    return out;
}

MaterialFn levelset_material(const Mesh2D& mesh, const Eigen::VectorXd& phi, const FluidProps& props, double eps) {
    if (!(eps > 0)) throw InvalidArgument("smoothing width must be positive");
    const Mesh2D* m = &mesh;
    Eigen::VectorXd f = phi;
    return [m, f, props, eps](int e, const Vec2&, const Eigen::Vector4d& N) {
        double v = 0;
        for (int k = 0; k < m->nodes_per_element(); ++k) v += N(k) * f(m->elements[e][k]);
        const double H = smoothed_heaviside(v, eps);
        return Material{props.rho1 + (props.rho2 - props.rho1) * H, props.mu1 + (props.mu2 - props.mu1) * H};
    };
}

double hausdorff_distance(const std::vector<Segment>& a, const std::vector<Segment>& b, int samples_per_segment) {
    if (a.empty() || b.empty()) throw InvalidArgument("Hausdorff distance of an empty set");
    auto one_way = [&](const std::vector<Segment>& from, const std::vector<Segment>& to) {
        double worst = 0;
        for (const auto& s : from)
            for (int k = 0; k <= samples_per_segment; ++k) {
                const Vec2 x = s.first + (s.second - s.first) * (double(k) / samples_per_segment);
                double d = std::numeric_limits<double>::infinity();
                for (const auto& t : to) d = std::min(d, point_segment_distance(x, t.first, t.second));
                worst = std::max(worst, d);
            }
        return worst;
    };
    return std::max(one_way(a, b), one_way(b, a));
}

}  // namespace flowlab
