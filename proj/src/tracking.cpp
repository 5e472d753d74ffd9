#include "flowlab/tracking.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "flowlab/errors.hpp"
#include "flowlab/flow.hpp"
#include "flowlab/io.hpp"

namespace flowlab {

BoundaryVelocityResult boundary_velocity(const std::vector<Vec2>& u, const std::vector<Vec2>& normals,
                                         BoundaryMotion mode, const Vec2& direction) {
    if (u.size() != normals.size()) throw InvalidArgument("boundary_velocity: one normal per velocity");
    BoundaryVelocityResult r;
    r.v.resize(u.size());
    const Vec2 e = direction.normalized();
    for (std::size_t i = 0; i < u.size(); ++i) {
        const Vec2& n = normals[i];
        const double un = u[i].dot(n);
        switch (mode) {
            case BoundaryMotion::Lagrangian:
                r.v[i] = u[i];
                break;
            case BoundaryMotion::Normal:
                r.v[i] = un * n;
                break;
            case BoundaryMotion::Coordinate: {
                const double ne = n.dot(e);
                if (std::abs(ne) < 1e-8) {
                    r.degenerate.push_back(static_cast<int>(i));
                    r.v[i] = un * n;
                } else {
                    r.v[i] = (un / ne) * e;
                }
                break;
            }
        }
    }
    return r;
}

double mass_flux(const Polyline& p, const std::vector<Vec2>& normals, const std::vector<Vec2>& u,
                 const std::vector<Vec2>& v, double rho) {
    const int n = p.size();
    if (static_cast<int>(normals.size()) != n || static_cast<int>(u.size()) != n || static_cast<int>(v.size()) != n)
        throw InvalidArgument("mass_flux: one value per polyline node");
    double flux = 0;
    for (int s = 0; s < p.num_segments(); ++s) {
        const int a = s, b = (s + 1) % n;
        const double len = segment_length(p, s);
        flux += 0.5 * len * ((u[a] - v[a]).dot(normals[a]) + (u[b] - v[b]).dot(normals[b]));
    }
    return rho * flux;
}

namespace {

double signed_area2(const Vec2& a, const Vec2& b, const Vec2& c) { return cross2(b - a, c - a); }

}  // namespace

std::vector<int> inverted_elements(const Mesh2D& mesh) {
    std::vector<int> bad;
    const int npe = mesh.nodes_per_element();
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& el = mesh.elements[e];
        for (int k = 0; k < npe; ++k) {
            const Vec2& a = mesh.nodes[el[(k + npe - 1) % npe]];
            const Vec2& b = mesh.nodes[el[k]];
            const Vec2& c = mesh.nodes[el[(k + 1) % npe]];
            if (signed_area2(b, c, a) <= 0) {
                bad.push_back(e);
                break;
            }
        }
    }
    return bad;
}

std::vector<Vec2> mesh_displacement(const Mesh2D& mesh, const MeshMotionBC& bc, const MeshMotionParams& params) {
    const int N = mesh.num_nodes();
    if (bc.fixed.empty()) throw InvalidArgument("mesh update needs prescribed displacements");
    if (params.kind == MeshUpdateKind::Elastic && !(params.lame_mu > 0))
        throw InvalidArgument("mesh update needs lame_mu > 0");
    for (const auto& [node, n] : bc.slip)
        if (bc.fixed.count(node)) throw InvalidArgument("node " + std::to_string(node) + " is both fixed and slip");

    const double mean_area = mesh_area(mesh) / mesh.num_elements();
    const auto rule = element_rule(mesh, 2);
    const int npe = mesh.nodes_per_element();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(mesh.num_elements()) * npe * npe * 4);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const double scale = std::pow(mean_area / element_area(mesh, e), params.stiffening);
        const double lam = params.lame_lambda * scale, mu = params.lame_mu * scale;
        Eigen::MatrixXd Ke = Eigen::MatrixXd::Zero(2 * npe, 2 * npe);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const auto s = shape_eval(mesh, e, rule.points[q]);
            const double w = rule.weights[q] * s.detJ;
            for (int a = 0; a < npe; ++a)
                for (int b = 0; b < npe; ++b) {
                    const Vec2 ga = s.dN.row(a).transpose(), gb = s.dN.row(b).transpose();
                    const double dd = ga.dot(gb);
                    for (int i = 0; i < 2; ++i)
                        for (int j = 0; j < 2; ++j) {
                            double k;
                            if (params.kind == MeshUpdateKind::Laplace)
                                k = i == j ? dd : 0.0;
                            else
                                k = lam * ga(i) * gb(j) + mu * (ga(j) * gb(i) + (i == j ? dd : 0.0));
                            Ke(2 * a + i, 2 * b + j) += w * k;
                        }
                }
        }
        for (int a = 0; a < npe; ++a)
            for (int b = 0; b < npe; ++b)
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j)
                        trip.emplace_back(2 * mesh.elements[e][a] + i, 2 * mesh.elements[e][b] + j, Ke(2 * a + i, 2 * b + j));
    }
    LinearSystem sys;
    sys.num_nodes = N;
    sys.A.resize(2 * N, 2 * N);
    sys.A.setFromTriplets(trip.begin(), trip.end());
    sys.A.makeCompressed();
    sys.b = Eigen::VectorXd::Zero(2 * N);
    sys.rotation.assign(N, Mat2::Identity());

    if (!bc.slip.empty()) {
        std::vector<int> nodes;
        std::vector<Mat2> frames;
        for (const auto& [node, n] : bc.slip) {
            const Vec2 nn = n.normalized();
            Mat2 O;
            O.col(0) = Vec2(nn.y(), -nn.x());
            O.col(1) = nn;
            nodes.push_back(node);
            frames.push_back(O);
        }
        apply_rotated_slip(sys, nodes, frames);
    }
    std::map<int, double> rows;
    for (const auto& [node, d] : bc.fixed) {
        if (node < 0 || node >= N) throw InvalidArgument("mesh update: invalid node");
        rows[2 * node] = d.x();
        rows[2 * node + 1] = d.y();
    }
    constrain_rows(sys, rows);

    Eigen::VectorXd x;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(sys.A);
    if (ldlt.info() == Eigen::Success) x = ldlt.solve(sys.b);
    if (ldlt.info() != Eigen::Success || !x.allFinite()) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(sys.A);
        x = lu.solve(sys.b);
    }
    const double res = (sys.A * x - sys.b).norm() / std::max(1e-300, sys.b.norm());
    if (!x.allFinite() || res > 1e-8) throw SolverFailure(res, "mesh motion solve failed");
    std::vector<Vec2> d(N);
    for (int i = 0; i < N; ++i) d[i] = sys.rotation[i] * x.segment<2>(2 * i);
    return d;
}

namespace {

Mesh2D move_nodes(const Mesh2D& mesh, const std::vector<Vec2>& d, MeshUpdateReport* report) {
    Mesh2D out = mesh;
    double dmax = 0;
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        out.nodes[i] += d[i];
        dmax = std::max(dmax, d[i].norm());
    }
    out.grid.reset();
    auto bad = inverted_elements(out);
    if (!bad.empty()) throw InvertedElements(bad, "mesh update inverted " + std::to_string(bad.size()) + " elements");
    if (report) {
        auto [mn, mean] = mesh_quality(out);
        report->min_quality = mn;
        report->mean_quality = mean;
        report->max_displacement = dmax;
    }
    return out;
}

}  // namespace

Mesh2D elastic_mesh_update(const Mesh2D& mesh, const MeshMotionBC& bc, const MeshMotionParams& params,
                           MeshUpdateReport* report) {
    return move_nodes(mesh, mesh_displacement(mesh, bc, params), report);
}

Mesh2D laplace_mesh_update(const Mesh2D& mesh, const MeshMotionBC& bc, MeshUpdateReport* report) {
    MeshMotionParams p;
    p.kind = MeshUpdateKind::Laplace;
    p.stiffening = 0;
    return move_nodes(mesh, mesh_displacement(mesh, bc, p), report);
}

std::vector<Vec2> osculating_curvature(const Polyline& p) {
    const int n = p.size();
    if (n < 3) throw InvalidArgument("osculating curvature needs at least 3 nodes");
    std::vector<Vec2> k(n, Vec2::Zero());
    for (int i = 0; i < n; ++i) {
        if (!p.closed && (i == 0 || i == n - 1)) continue;
        const Vec2 a = p.at(i - 1) - p.at(i), c = p.at(i + 1) - p.at(i);
        const double d = 2 * cross2(a, c);
        const double scale = a.squaredNorm() + c.squaredNorm();
        if (std::abs(d) <= 1e-14 * scale) continue;
        // circumcenter relative to the node
        const Vec2 r = (c.y() * a.squaredNorm() - a.y() * c.squaredNorm()) / d * Vec2(1, 0) +
                       (a.x() * c.squaredNorm() - c.x() * a.squaredNorm()) / d * Vec2(0, 1);
        k[i] = r / r.squaredNorm();
    }
    return k;
}

std::vector<double> osculating_signed_curvature(const Polyline& p) {
    const auto kn = osculating_curvature(p);
    const auto nrm = nodal_normals(p);
    std::vector<double> k(kn.size());
    for (std::size_t i = 0; i < kn.size(); ++i) k[i] = -kn[i].dot(nrm[i]);
    return k;
}

double element_quality(const Mesh2D& mesh, int e) {
    const auto& el = mesh.elements[e];
    if (mesh.kind == ElementKind::Triangle) {
        const Vec2 &A = mesh.nodes[el[0]], &B = mesh.nodes[el[1]], &C = mesh.nodes[el[2]];
        if (signed_area2(A, B, C) <= 0) return 0.0;
        const double a = (B - C).norm(), b = (C - A).norm(), c = (A - B).norm();
        const double s = 0.5 * (a + b + c);
        return 8 * (s - a) * (s - b) * (s - c) / (a * b * c);
    }
    double q = 1.0;
    for (int k = 0; k < 4; ++k) {
        const Vec2& x = mesh.nodes[el[k]];
        const Vec2 e1 = mesh.nodes[el[(k + 1) % 4]] - x, e2 = mesh.nodes[el[(k + 3) % 4]] - x;
        const double c = cross2(e1, e2);
        if (c <= 0) return 0.0;
        q = std::min(q, 2 * c / (e1.squaredNorm() + e2.squaredNorm()));
    }
    return q;
}

std::pair<double, double> mesh_quality(const Mesh2D& mesh) {
    double mn = std::numeric_limits<double>::infinity(), sum = 0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const double q = element_quality(mesh, e);
        mn = std::min(mn, q);
        sum += q;
    }
    return {mn, sum / std::max(1, mesh.num_elements())};
}

namespace {

// 4m points counterclockwise on the square of half-width a, starting at the corner (a, -a).
std::vector<Vec2> square_ring(double a, int m) {
    std::vector<Vec2> pts;
    const Vec2 corners[4] = {Vec2(a, -a), Vec2(a, a), Vec2(-a, a), Vec2(-a, -a)};
    for (int s = 0; s < 4; ++s)
        for (int k = 0; k < m; ++k) {
            const double t = static_cast<double>(k) / m;
            pts.push_back((1 - t) * corners[s] + t * corners[(s + 1) % 4]);
        }
    return pts;
}

std::vector<Vec2> circle_ring(double r, int count, double start) {
    std::vector<Vec2> pts(count);
    for (int k = 0; k < count; ++k) {
        const double t = start + 2 * M_PI * k / count;
        pts[k] = r * Vec2(std::cos(t), std::sin(t));
    }
    return pts;
}

// Quads between two rings of equal length; inner ring counterclockwise.
void connect_rings(Mesh2D& m, const std::vector<int>& A, const std::vector<int>& B, int phase) {
    const int n = static_cast<int>(A.size());
    for (int k = 0; k < n; ++k) {
        const int k1 = (k + 1) % n;
        m.elements.push_back({A[k], B[k], B[k1], A[k1]});
        m.element_phase.push_back(phase);
    }
}

std::vector<int> add_points(Mesh2D& m, const std::vector<Vec2>& pts) {
    std::vector<int> idx;
    for (const auto& p : pts) {
        idx.push_back(m.num_nodes());
        m.nodes.push_back(p);
    }
    return idx;
}

}  // namespace

DropMesh make_drop_mesh(double radius, double L, int m, int inner_layers, int outer_layers) {
    if (!(radius > 0) || !(L > radius) || m < 1 || inner_layers < 1 || outer_layers < 1)
        throw InvalidArgument("drop mesh: need 0 < radius < half_width and positive counts");
    DropMesh d;
    Mesh2D& mesh = d.mesh;
    mesh.kind = ElementKind::Quad;
    const double a = 0.45 * radius;
    // square core
    for (int j = 0; j <= m; ++j)
        for (int i = 0; i <= m; ++i) mesh.nodes.emplace_back(-a + 2 * a * i / m, -a + 2 * a * j / m);
    auto core = [&](int i, int j) { return j * (m + 1) + i; };
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            mesh.elements.push_back({core(i, j), core(i + 1, j), core(i + 1, j + 1), core(i, j + 1)});
            mesh.element_phase.push_back(1);
        }
    std::vector<int> ring;
    for (int k = 0; k < m; ++k) ring.push_back(core(m, k));
    for (int k = 0; k < m; ++k) ring.push_back(core(m - k, m));
    for (int k = 0; k < m; ++k) ring.push_back(core(0, m - k));
    for (int k = 0; k < m; ++k) ring.push_back(core(k, 0));

    const auto sq = square_ring(a, m), circ = circle_ring(radius, 4 * m, -M_PI / 4), box = square_ring(L, m);
    for (int l = 1; l <= inner_layers; ++l) {
        const double s = static_cast<double>(l) / inner_layers;
        std::vector<Vec2> pts(4 * m);
        for (int k = 0; k < 4 * m; ++k) pts[k] = (1 - s) * sq[k] + s * circ[k];
        if (l == inner_layers) pts = circ;
        auto next = add_points(mesh, pts);
        connect_rings(mesh, ring, next, 1);
        ring = next;
    }
    const std::vector<int> interface_ring = ring;
    for (int l = 1; l <= outer_layers; ++l) {
        const double s = static_cast<double>(l) / outer_layers;
        std::vector<Vec2> pts(4 * m);
        for (int k = 0; k < 4 * m; ++k) pts[k] = (1 - s) * circ[k] + s * box[k];
        if (l == outer_layers) pts = box;
        auto next = add_points(mesh, pts);
        connect_rings(mesh, ring, next, 2);
        ring = next;
    }
    mesh.node_tags.assign(mesh.nodes.size(), 0u);
    for (int k = 0; k < 4 * m; ++k) {
        const int a0 = ring[k], b0 = ring[(k + 1) % (4 * m)];
        const Vec2 mid = 0.5 * (mesh.nodes[a0] + mesh.nodes[b0]);
        int t = tag::bottom;
        if (mid.x() > L * (1 - 1e-12))
            t = tag::right;
        else if (mid.y() > L * (1 - 1e-12))
            t = tag::top;
        else if (mid.x() < -L * (1 - 1e-12))
            t = tag::left;
        mesh.boundary_edges.push_back({a0, b0, t});
        mesh.add_tag(a0, tag::wall_node);
    }
    for (int n : interface_ring) mesh.add_tag(n, tag::interface_node);
    check_mesh(mesh);
    d.interface.nodes = interface_ring;
    d.interface.closed = true;
    compute_frames(mesh, d.interface);
    return d;
}

AnnulusMesh make_annulus_mesh(double r0, double r1, int n, int k, double grading) {
    if (!(r0 > 0) || !(r1 > r0) || n < 3 || k < 1 || !(grading > 0)) throw InvalidArgument("annulus mesh: bad sizes");
    AnnulusMesh a;
    a.mesh.kind = ElementKind::Quad;
    double total = 0, step = 1;
    for (int l = 0; l < k; ++l, step *= grading) total += step;
    std::vector<int> prev;
    double r = r0;
    step = (r1 - r0) / total;
    for (int l = 0; l <= k; ++l) {
        auto ring = add_points(a.mesh, circle_ring(l == k ? r1 : r, n, 0.0));
        if (l == 0) a.inner = ring;
        if (l > 0) connect_rings(a.mesh, prev, ring, 1);
        prev = ring;
        r += step;
        step *= grading;
    }
    a.outer = prev;
    a.mesh.node_tags.assign(a.mesh.nodes.size(), 0u);
    for (int i = 0; i < n; ++i) {
        a.mesh.boundary_edges.push_back({a.inner[(i + 1) % n], a.inner[i], tag::interface});
        a.mesh.boundary_edges.push_back({a.outer[i], a.outer[(i + 1) % n], tag::wall});
        a.mesh.add_tag(a.inner[i], tag::interface_node);
        a.mesh.add_tag(a.outer[i], tag::wall_node);
    }
    check_mesh(a.mesh);
    return a;
}

double wall_parameter_at_height(const Curve& wall, double ta, double tb, double y) {
    auto f = [&](double t) { return curve_eval(wall, t).C.y() - y; };
    double fa = f(ta);
    const double fb = f(tb);
    if (std::abs(fa) <= 1e-13 * std::max(1.0, std::abs(y))) return ta;
    if (std::abs(fb) <= 1e-13 * std::max(1.0, std::abs(y))) return tb;
    if (fa * fb > 0) throw InvalidArgument("wall branch does not reach the requested height");
    for (int it = 0; it < 200 && std::abs(tb - ta) > 1e-16; ++it) {
        const double tm = 0.5 * (ta + tb), fm = f(tm);
        if (fm == 0) return tm;
        if ((fm < 0) == (fa < 0)) {
            ta = tm;
            fa = fm;
        } else {
            tb = tm;
        }
    }
    return 0.5 * (ta + tb);
}

std::vector<double> wall_parameters_by_arclength(const Curve& wall, double ta, double tb, int n) {
    if (n < 1) throw InvalidArgument("arc-length spacing needs at least one interval");
    const int samples = 64 * n + 256;
    std::vector<double> th(samples + 1), len(samples + 1, 0.0);
    Vec2 prev = curve_eval(wall, ta).C.head<2>();
    for (int k = 0; k <= samples; ++k) {
        th[k] = ta + (tb - ta) * k / samples;
        const Vec2 x = curve_eval(wall, th[k]).C.head<2>();
        if (k > 0) len[k] = len[k - 1] + (x - prev).norm();
        prev = x;
    }
    std::vector<double> out(n + 1);
    out[0] = ta;
    out[n] = tb;
    for (int j = 1; j < n; ++j) {
        const double target = len.back() * j / n;
        const auto it = std::lower_bound(len.begin(), len.end(), target);
        const int k = std::max(1, static_cast<int>(it - len.begin()));
        const double w = (target - len[k - 1]) / (len[k] - len[k - 1]);
        out[j] = th[k - 1] + w * (th[k] - th[k - 1]);
    }
    return out;
}

TankMesh make_tank_mesh(const Curve& wall, double fill, int nx, int ny, double trc, double tlc, double trt, double tlt) {
    if (nx < 1 || ny < 1 || !(fill > 0)) throw InvalidArgument("tank mesh: bad sizes");
    TankMesh t;
    t.theta_right_corner = trc;
    t.theta_left_corner = tlc;
    auto P = [&](double th) { return Vec2(curve_eval(wall, th).C.head<2>()); };
    t.theta_left_kink = tlt;
    t.theta_right_kink = trt;
    const double kink_height = std::min(P(tlt).y(), P(trt).y());
    const bool above = fill > kink_height;
    const double tr = above ? wall_parameter_at_height(wall, trt, wall.first(), fill)
                            : wall_parameter_at_height(wall, trc, trt, fill);
    const double tl = above ? wall_parameter_at_height(wall, tlt, wall.last(), fill)
                            : wall_parameter_at_height(wall, tlc, tlt, fill);
    if (above) {
        if (ny < 2) throw InvalidArgument("tank mesh: a fill above the wall kinks needs ny >= 2");
        t.kink_row = std::clamp(static_cast<int>(std::lround(ny * kink_height / fill)), 1, ny - 1);
    }
    // wall parameters per row, evenly spaced in arc length; a kink row splits the spacing in two pieces
    auto rows = [&](double corner, double kink, double top) {
        if (t.kink_row < 0) return wall_parameters_by_arclength(wall, corner, top, ny);
        // uniform parameter steps below the kink place nodes symmetrically within each knot span
        std::vector<double> lo(t.kink_row + 1);
        for (int j = 0; j <= t.kink_row; ++j) lo[j] = corner + (kink - corner) * j / t.kink_row;
        const auto hi = wall_parameters_by_arclength(wall, kink, top, ny - t.kink_row);
        lo.insert(lo.end(), hi.begin() + 1, hi.end());
        return lo;
    };
    const std::vector<double> left_rows = rows(tlc, tlt, tl), right_rows = rows(trc, trt, tr);
    auto Lft = [&](int j) { return P(left_rows[j]); };
    auto Rgt = [&](int j) { return P(right_rows[j]); };
    const Vec2 B0 = P(tlc), B1 = P(trc), T0 = P(tl), T1 = P(tr);
    Mesh2D& m = t.mesh;
    m.kind = ElementKind::Quad;
    auto id = [&](int i, int j) { return j * (nx + 1) + i; };
    t.theta.assign((nx + 1) * (ny + 1), std::numeric_limits<double>::quiet_NaN());
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const double xi = static_cast<double>(i) / nx, eta = static_cast<double>(j) / ny;
            Vec2 x;
            if (i == 0) {
                x = Lft(j);
                t.theta[id(i, j)] = left_rows[j];
            } else if (i == nx) {
                x = Rgt(j);
                t.theta[id(i, j)] = right_rows[j];
            } else {
                const Vec2 B = (1 - xi) * B0 + xi * B1, T = (1 - xi) * T0 + xi * T1;
                x = (1 - xi) * Lft(j) + xi * Rgt(j) + (1 - eta) * B + eta * T -
                    ((1 - xi) * (1 - eta) * B0 + xi * (1 - eta) * B1 + (1 - xi) * eta * T0 + xi * eta * T1);
            }
            m.nodes.push_back(x);
        }
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) m.elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    m.node_tags.assign(m.nodes.size(), 0u);
    for (int i = 0; i < nx; ++i) {
        m.boundary_edges.push_back({id(i, 0), id(i + 1, 0), tag::wall});
        m.boundary_edges.push_back({id(i + 1, ny), id(i, ny), tag::free_surface});
    }
    for (int j = 0; j < ny; ++j) {
        m.boundary_edges.push_back({id(nx, j), id(nx, j + 1), tag::wall});
        m.boundary_edges.push_back({id(0, j + 1), id(0, j), tag::wall});
    }
    for (int j = 0; j <= ny; ++j) {
        t.right_wall.push_back(id(nx, j));
        t.left_wall.push_back(id(0, j));
        m.add_tag(id(nx, j), tag::wall_node);
        m.add_tag(id(0, j), tag::wall_node);
    }
    for (int i = nx; i >= 0; --i) {
        t.bottom.push_back(id(i, 0));
        m.add_tag(id(i, 0), tag::wall_node);
    }
    for (int i = 0; i <= nx; ++i) {
        t.surface.push_back(id(i, ny));
        m.add_tag(id(i, ny), tag::surface_node);
    }
    m.add_tag(id(0, 0), tag::corner_node);
    m.add_tag(id(nx, 0), tag::corner_node);
    if (t.kink_row > 0) {
        m.add_tag(id(0, t.kink_row), tag::corner_node);
        m.add_tag(id(nx, t.kink_row), tag::corner_node);
    }
    check_mesh(m);
    return t;
}

void write_quality_csv(const std::string& path, const std::vector<double>& time, const std::vector<double>& min_q,
                       const std::vector<double>& mean_q) {
    CsvTable t;
    t.header = {"time", "min_quality", "mean_quality"};
    for (std::size_t i = 0; i < time.size(); ++i) t.rows.push_back({time[i], min_q[i], mean_q[i]});
    t.write(path);
}

}  // namespace flowlab
