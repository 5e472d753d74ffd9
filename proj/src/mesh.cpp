#include "flowlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "flowlab/errors.hpp"

namespace flowlab {

void Mesh2D::add_tag(int node, unsigned bit) {
    if (node_tags.size() != nodes.size()) node_tags.resize(nodes.size(), 0u);
    node_tags[node] |= bit;
}

Mesh2D build_structured_mesh(int nx, int ny, const Rect& extent, ElementKind kind) {
    if (nx < 1 || ny < 1) throw InvalidArgument("structured mesh needs nx, ny >= 1");
    if (!(extent.width() > 0) || !(extent.height() > 0)) throw InvalidArgument("degenerate mesh extent");
    Mesh2D m;
    m.kind = kind;
    GridInfo g{nx, ny, extent};
    m.nodes.reserve((nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            m.nodes.emplace_back(extent.x0 + extent.width() * i / nx, extent.y0 + extent.height() * j / ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            int a = g.node(i, j), b = g.node(i + 1, j), c = g.node(i + 1, j + 1), d = g.node(i, j + 1);
            if (kind == ElementKind::Quad) {
                m.elements.push_back({a, b, c, d});
            } else {
                m.elements.push_back({a, b, c, -1});
                m.elements.push_back({a, c, d, -1});
            }
        }
    }
    for (int i = 0; i < nx; ++i) {
        m.boundary_edges.push_back({g.node(i, 0), g.node(i + 1, 0), tag::bottom});
        m.boundary_edges.push_back({g.node(i + 1, ny), g.node(i, ny), tag::top});
    }
    for (int j = 0; j < ny; ++j) {
        m.boundary_edges.push_back({g.node(nx, j), g.node(nx, j + 1), tag::right});
        m.boundary_edges.push_back({g.node(0, j + 1), g.node(0, j), tag::left});
    }
    m.node_tags.assign(m.nodes.size(), 0u);
    m.grid = g;
    return m;
}

void check_mesh(const Mesh2D& mesh) {
    const int npe = mesh.nodes_per_element();
    for (int e = 0; e < mesh.num_elements(); ++e) {
        for (int k = 0; k < npe; ++k) {
            int n = mesh.elements[e][k];
            if (n < 0 || n >= mesh.num_nodes()) throw InvalidArgument("element node index out of range");
        }
        const auto rule = element_rule(mesh, 2);
        for (const auto& q : rule.points) {
            if (shape_eval(mesh, e, q).detJ <= 0) throw SingularElement(e, "non-positive Jacobian in element " + std::to_string(e));
        }
    }
}

ShapeValues shape_eval(const Mesh2D& mesh, int element, const Vec2& xi) {
    ShapeValues s;
    const auto& el = mesh.elements[element];
    Eigen::Matrix<double, 4, 2> dref = Eigen::Matrix<double, 4, 2>::Zero();
    int npe;
    if (mesh.kind == ElementKind::Triangle) {
        npe = 3;
        s.N << 1 - xi.x() - xi.y(), xi.x(), xi.y(), 0;
        dref << -1, -1, 1, 0, 0, 1, 0, 0;
    } else {
        npe = 4;
        const double r = xi.x(), t = xi.y();
        s.N << 0.25 * (1 - r) * (1 - t), 0.25 * (1 + r) * (1 - t), 0.25 * (1 + r) * (1 + t), 0.25 * (1 - r) * (1 + t);
        dref << -0.25 * (1 - t), -0.25 * (1 - r), 0.25 * (1 - t), -0.25 * (1 + r), 0.25 * (1 + t), 0.25 * (1 + r),
            -0.25 * (1 + t), 0.25 * (1 - r);
    }
    Mat2 J = Mat2::Zero();  // J(i,j) = dx_i/dxi_j
    for (int k = 0; k < npe; ++k) {
        const Vec2& p = mesh.nodes[el[k]];
        s.x += s.N(k) * p;
        J(0, 0) += p.x() * dref(k, 0);
        J(0, 1) += p.x() * dref(k, 1);
        J(1, 0) += p.y() * dref(k, 0);
        J(1, 1) += p.y() * dref(k, 1);
    }
    s.detJ = J.determinant();
    if (std::abs(s.detJ) < 1e-300) throw SingularElement(element, "zero Jacobian in element " + std::to_string(element));
    const Mat2 Jinv = J.inverse();
    for (int k = 0; k < npe; ++k) s.dN.row(k) = dref.row(k) * Jinv;
    return s;
}

QuadratureRule triangle_rule(int degree) {
    QuadratureRule r;
    if (degree <= 1) {
        r.points = {Vec2(1.0 / 3, 1.0 / 3)};
        r.weights = {0.5};
        r.degree = 1;
    } else if (degree == 2) {
        r.points = {Vec2(1.0 / 6, 1.0 / 6), Vec2(2.0 / 3, 1.0 / 6), Vec2(1.0 / 6, 2.0 / 3)};
        r.weights = {1.0 / 6, 1.0 / 6, 1.0 / 6};
        r.degree = 2;
    } else {
        // 6-point degree-4 rule
        const double a = 0.445948490915965, b = 0.091576213509771;
        const double wa = 0.223381589678011 / 2, wb = 0.109951743655322 / 2;
        r.points = {Vec2(a, a), Vec2(1 - 2 * a, a), Vec2(a, 1 - 2 * a), Vec2(b, b), Vec2(1 - 2 * b, b), Vec2(b, 1 - 2 * b)};
        r.weights = {wa, wa, wa, wb, wb, wb};
        r.degree = 4;
    }
    return r;
}

static void gauss_1d(int n, std::vector<double>& x, std::vector<double>& w) {
    switch (n) {
        case 1: x = {0.0}; w = {2.0}; break;
        case 2: x = {-1 / std::sqrt(3.0), 1 / std::sqrt(3.0)}; w = {1.0, 1.0}; break;
        case 3: x = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)}; w = {5.0 / 9, 8.0 / 9, 5.0 / 9}; break;
        default: {
            const double a = std::sqrt(3.0 / 7 - 2.0 / 7 * std::sqrt(6.0 / 5));
            const double b = std::sqrt(3.0 / 7 + 2.0 / 7 * std::sqrt(6.0 / 5));
            const double wa = (18 + std::sqrt(30.0)) / 36, wb = (18 - std::sqrt(30.0)) / 36;
            x = {-b, -a, a, b};
            w = {wb, wa, wa, wb};
        }
    }
}

QuadratureRule quad_rule(int degree) {
    const int n = std::clamp((degree + 2) / 2, 1, 4);
    std::vector<double> x, w;
    gauss_1d(n, x, w);
    QuadratureRule r;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            r.points.emplace_back(x[i], x[j]);
            r.weights.push_back(w[i] * w[j]);
        }
    r.degree = 2 * n - 1;
    return r;
}

QuadratureRule element_rule(const Mesh2D& mesh, int degree) {
    return mesh.kind == ElementKind::Triangle ? triangle_rule(degree) : quad_rule(degree);
}

QuadratureRule edge_rule(int degree) {
    const int n = std::clamp((degree + 2) / 2, 1, 4);
    std::vector<double> x, w;
    gauss_1d(n, x, w);
    QuadratureRule r;
    for (int i = 0; i < n; ++i) {
        r.points.emplace_back(0.5 * (x[i] + 1), 0.0);
        r.weights.push_back(0.5 * w[i]);
    }
    r.degree = 2 * n - 1;
    return r;
}

double integrate(const Mesh2D& mesh, const std::function<double(const Vec2&)>& f, int degree) {
    const auto rule = element_rule(mesh, degree);
    double sum = 0;
    for (int e = 0; e < mesh.num_elements(); ++e)
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const auto s = shape_eval(mesh, e, rule.points[q]);
            sum += rule.weights[q] * s.detJ * f(s.x);
        }
    return sum;
}

double integrate(const Mesh2D& mesh, const Eigen::VectorXd& nodal, int degree) {
    if (nodal.size() != mesh.num_nodes()) throw InvalidArgument("field length does not match node count");
    const auto rule = element_rule(mesh, degree);
    const int npe = mesh.nodes_per_element();
    double sum = 0;
    for (int e = 0; e < mesh.num_elements(); ++e)
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const auto s = shape_eval(mesh, e, rule.points[q]);
            double v = 0;
            for (int k = 0; k < npe; ++k) v += s.N(k) * nodal(mesh.elements[e][k]);
            sum += rule.weights[q] * s.detJ * v;
        }
    return sum;
}

double element_area(const Mesh2D& mesh, int e) {
    const auto& el = mesh.elements[e];
    const int npe = mesh.nodes_per_element();
    double a = 0;
    for (int k = 0; k < npe; ++k) a += cross2(mesh.nodes[el[k]], mesh.nodes[el[(k + 1) % npe]]);
    return 0.5 * a;
}

double mesh_area(const Mesh2D& mesh) {
    double a = 0;
    for (int e = 0; e < mesh.num_elements(); ++e) a += element_area(mesh, e);
    return a;
}

Vec2 element_centroid(const Mesh2D& mesh, int e) {
    const int npe = mesh.nodes_per_element();
    Vec2 c = Vec2::Zero();
    for (int k = 0; k < npe; ++k) c += mesh.nodes[mesh.elements[e][k]];
    return c / npe;
}

double element_size(const Mesh2D& mesh, int e) {
    const double a = std::abs(element_area(mesh, e));
    return mesh.kind == ElementKind::Quad ? std::sqrt(a) : std::sqrt(2 * a);
}

Eigen::VectorXd lumped_mass(const Mesh2D& mesh) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(mesh.num_nodes());
    const auto rule = element_rule(mesh, 2);
    const int npe = mesh.nodes_per_element();
    for (int e = 0; e < mesh.num_elements(); ++e)
        for (size_t q = 0; q < rule.points.size(); ++q) {
            const auto s = shape_eval(mesh, e, rule.points[q]);
            for (int k = 0; k < npe; ++k) m(mesh.elements[e][k]) += rule.weights[q] * s.detJ * s.N(k);
        }
    return m;
}

// Inverse bilinear map by Newton; returns false if it does not converge.
static bool quad_inverse(const Mesh2D& mesh, int e, const Vec2& x, Vec2& xi) {
    xi.setZero();
    for (int it = 0; it < 30; ++it) {
        const auto& el = mesh.elements[e];
        const double r = xi.x(), t = xi.y();
        Eigen::Vector4d N(0.25 * (1 - r) * (1 - t), 0.25 * (1 + r) * (1 - t), 0.25 * (1 + r) * (1 + t), 0.25 * (1 - r) * (1 + t));
        Eigen::Matrix<double, 4, 2> d;
        d << -0.25 * (1 - t), -0.25 * (1 - r), 0.25 * (1 - t), -0.25 * (1 + r), 0.25 * (1 + t), 0.25 * (1 + r), -0.25 * (1 + t),
            0.25 * (1 - r);
        Vec2 p = Vec2::Zero();
        Mat2 J = Mat2::Zero();
        for (int k = 0; k < 4; ++k) {
            p += N(k) * mesh.nodes[el[k]];
            J.col(0) += d(k, 0) * mesh.nodes[el[k]];
            J.col(1) += d(k, 1) * mesh.nodes[el[k]];
        }
        const Vec2 step = J.inverse() * (x - p);
        xi += step;
        if (step.norm() < 1e-14) return true;
    }
    return false;
}

static bool ref_inside(ElementKind kind, const Vec2& xi, double tol) {
    if (kind == ElementKind::Triangle) return xi.x() >= -tol && xi.y() >= -tol && xi.x() + xi.y() <= 1 + tol;
    return std::abs(xi.x()) <= 1 + tol && std::abs(xi.y()) <= 1 + tol;
}

static Vec2 to_reference(const Mesh2D& mesh, int e, const Vec2& x) {
    if (mesh.kind == ElementKind::Triangle) {
        const auto& el = mesh.elements[e];
        const Vec2 a = mesh.nodes[el[0]], b = mesh.nodes[el[1]], c = mesh.nodes[el[2]];
        Mat2 J;
        J.col(0) = b - a;
        J.col(1) = c - a;
        return J.inverse() * (x - a);
    }
    Vec2 xi;
    quad_inverse(mesh, e, x, xi);
    return xi;
}

std::optional<Location> locate(const Mesh2D& mesh, const Vec2& x) {
    const double tol = 1e-12;
    if (mesh.grid) {
        const auto& g = *mesh.grid;
        int i = static_cast<int>(std::floor((x.x() - g.extent.x0) / g.hx()));
        int j = static_cast<int>(std::floor((x.y() - g.extent.y0) / g.hy()));
        const double eps = 1e-9;
        if (x.x() < g.extent.x0 - eps * g.hx() || x.x() > g.extent.x1 + eps * g.hx() || x.y() < g.extent.y0 - eps * g.hy() ||
            x.y() > g.extent.y1 + eps * g.hy())
            return std::nullopt;
        i = std::clamp(i, 0, g.nx - 1);
        j = std::clamp(j, 0, g.ny - 1);
        const int cell = g.cell(i, j);
        if (mesh.kind == ElementKind::Quad && static_cast<int>(mesh.elements.size()) == g.nx * g.ny) {
            return Location{cell, to_reference(mesh, cell, x)};
        }
        if (mesh.kind == ElementKind::Triangle && static_cast<int>(mesh.elements.size()) == 2 * g.nx * g.ny) {
            for (int e : {2 * cell, 2 * cell + 1}) {
                Vec2 xi = to_reference(mesh, e, x);
                if (ref_inside(mesh.kind, xi, 1e-10)) return Location{e, xi};
            }
        }
    }
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const int npe = mesh.nodes_per_element();
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (int k = 0; k < npe; ++k) {
            const Vec2& p = mesh.nodes[mesh.elements[e][k]];
            xmin = std::min(xmin, p.x());
            xmax = std::max(xmax, p.x());
            ymin = std::min(ymin, p.y());
            ymax = std::max(ymax, p.y());
        }
        const double pad = 1e-9 * std::max(xmax - xmin, ymax - ymin);
        if (x.x() < xmin - pad || x.x() > xmax + pad || x.y() < ymin - pad || x.y() > ymax + pad) continue;
        Vec2 xi = to_reference(mesh, e, x);
        if (ref_inside(mesh.kind, xi, tol + 1e-9)) return Location{e, xi};
    }
    return std::nullopt;
}

double interpolate(const Mesh2D& mesh, const Eigen::VectorXd& nodal, const Location& loc) {
    const auto s = shape_eval(mesh, loc.element, loc.ref);
    double v = 0;
    for (int k = 0; k < mesh.nodes_per_element(); ++k) v += s.N(k) * nodal(mesh.elements[loc.element][k]);
    return v;
}

std::vector<std::array<int, 3>> sub_triangles(const Mesh2D& mesh, int e) {
    const auto& el = mesh.elements[e];
    if (mesh.kind == ElementKind::Triangle) return {{el[0], el[1], el[2]}};
    return {{el[0], el[1], el[2]}, {el[0], el[2], el[3]}};
}

std::vector<std::array<int, 2>> mesh_edges(const Mesh2D& mesh) {
    std::set<std::pair<int, int>> seen;
    std::vector<std::array<int, 2>> out;
    const int npe = mesh.nodes_per_element();
    for (const auto& el : mesh.elements)
        for (int k = 0; k < npe; ++k) {
            int a = el[k], b = el[(k + 1) % npe];
            auto key = std::minmax(a, b);
            if (seen.insert({key.first, key.second}).second) out.push_back({key.first, key.second});
        }
    return out;
}

std::vector<std::vector<int>> node_elements(const Mesh2D& mesh) {
    std::vector<std::vector<int>> adj(mesh.nodes.size());
    const int npe = mesh.nodes_per_element();
    for (int e = 0; e < mesh.num_elements(); ++e)
        for (int k = 0; k < npe; ++k) adj[mesh.elements[e][k]].push_back(e);
    return adj;
}

static size_t expected_size(const Mesh2D& mesh, FieldLocation loc) {
    return loc == FieldLocation::Node ? mesh.nodes.size() : mesh.elements.size();
}

void check_field(const Mesh2D& mesh, const ScalarField& f) {
    if (static_cast<size_t>(f.values.size()) != expected_size(mesh, f.location))
        throw InvalidArgument("field '" + f.name + "' length mismatch");
    if (!f.values.allFinite()) throw InvalidArgument("field '" + f.name + "' has non-finite values");
}

void check_field(const Mesh2D& mesh, const VectorField& f) {
    if (f.values.size() != expected_size(mesh, f.location)) throw InvalidArgument("field '" + f.name + "' length mismatch");
    for (const auto& v : f.values)
        if (!v.allFinite()) throw InvalidArgument("field '" + f.name + "' has non-finite values");
}

}  // namespace flowlab
