#include <doctest.h>

#include <cmath>
#include <random>

#include "flowlab/errors.hpp"
#include "flowlab/levelset.hpp"
#include "flowlab/surface.hpp"

using namespace flowlab;

namespace {

Polyline circle_polyline(int n, double r, double start = 0.0) {
    Polyline p;
    for (int k = 0; k < n; ++k) {
        const double t = start + 2 * M_PI * k / n;
        p.points.push_back(r * Vec2(std::cos(t), std::sin(t)));
    }
    return p;
}

}  // namespace

TEST_CASE("Laplace-Beltrami nodal forces") {
    Polyline line;
    line.closed = false;
    for (int k = 0; k < 6; ++k) line.points.emplace_back(0.3 * k, 0.1 * k);
    auto f = laplace_beltrami_force(line, 2.0);
    for (int k = 1; k < 5; ++k) CHECK(f[k].norm() < 1e-15);

    for (int n : {16, 64, 256}) {
        const double r = 0.5;
        auto p = circle_polyline(n, r, 0.1);
        auto lb = laplace_beltrami_force(p, 1.0);
        Vec2 sum = Vec2::Zero();
        double worst = 0;
        for (int i = 0; i < n; ++i) {
            sum += lb[i];
            const double l_node = 0.5 * (segment_length(p, i) + segment_length(p, (i + n - 1) % n));
            worst = std::max(worst, std::abs(lb[i].norm() - l_node / r) / (l_node / r));
            CHECK(lb[i].normalized().dot(-p.points[i].normalized()) > 1 - 1e-12);
        }
        CHECK(sum.norm() < 1e-12);
        CHECK(sum.norm() <= 1e-10 * perimeter(p));
        // relative error pi^2 / (6 n^2) of 2 sin(pi/n) against 2 pi / n
        CHECK(worst < 2.0 / (n * n));
    }
    // irregular closed curve: the resultant still vanishes
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(0.7, 1.3);
    Polyline blob;
    for (int k = 0; k < 100; ++k) {
        const double t = 2 * M_PI * k / 100;
        blob.points.push_back(U(rng) * Vec2(std::cos(t), std::sin(t)));
    }
    Vec2 s = Vec2::Zero();
    for (const auto& x : laplace_beltrami_force(blob, 3.0)) s += x;
    CHECK(s.norm() <= 1e-10 * 3.0 * perimeter(blob));

    Polyline bad;
    bad.points = {Vec2(0, 0), Vec2(0, 0), Vec2(1, 0)};
    CHECK_THROWS_AS(laplace_beltrami_force(bad, 1.0), InvalidArgument);
}

TEST_CASE("curvature load of an exact circle") {
    auto p = circle_polyline(64, 0.5);
    std::vector<double> k(64, 2.0);
    auto f = curvature_force(p, k, 1.0);
    Vec2 sum = Vec2::Zero();
    for (int i = 0; i < 64; ++i) {
        sum += f[i];
        // gamma kappa times the polygon's nodal length measure, pointing to the center
        const Vec2 expect = -2.0 * 0.5 * (segment_length(p, i) * segment_normal(p, i) +
                                          segment_length(p, (i + 63) % 64) * segment_normal(p, (i + 63) % 64));
        CHECK((f[i] - expect).norm() < 1e-15);
    }
    CHECK(sum.norm() < 1e-13);
}

TEST_CASE("CSF volume force") {
    // delta kernel integrates to one (5-point Gauss-Legendre is exact for the quartic)
    const double eps = 0.03;
    const double gx[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
    const double gw[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                          0.2369268850561891};
    double integral = 0;
    for (int q = 0; q < 5; ++q) integral += eps * gw[q] * smoothed_delta(eps * gx[q], eps);
    CHECK(std::abs(integral - 1.0) < 1e-12);

    // straight interface: no force
    auto m = build_structured_mesh(32, 32, {0, 0, 1, 1}, ElementKind::Quad);
    Eigen::VectorXd phi(m.num_nodes());
    for (int i = 0; i < m.num_nodes(); ++i) phi(i) = m.nodes[i].y() - 0.43;
    for (const auto& f : csf_force(m, phi, 1.0, 3.0 / 32)) CHECK(f.norm() < 1e-9);

    // circle r = 0.5: total line force gamma kappa perimeter = 2 pi
    const int n = 128;
    auto mc = build_structured_mesh(n, n, {-1, -1, 1, 1}, ElementKind::Quad);
    auto ls = init_signed_distance(mc, Shape::circle(Vec2::Zero(), 0.5), 0.5);
    const double e = 1.5 * 2.0 / n;
    auto f = csf_force(mc, ls.phi, 1.0, e);
    Eigen::VectorXd mag(mc.num_nodes());
    for (int i = 0; i < mc.num_nodes(); ++i) mag(i) = f[i].norm();
    const double total = integrate(mc, mag);
    MESSAGE("CSF total force " << total << " vs " << 2 * M_PI);
    CHECK(std::abs(total - 2 * M_PI) / (2 * M_PI) < 0.02);
    // points toward the drop center
    for (int i = 0; i < mc.num_nodes(); ++i)
        if (f[i].norm() > 1e-6) CHECK(f[i].dot(mc.nodes[i]) < 0);
}

TEST_CASE("surfactant transport") {
    const int n = 80;
    SurfactantField g{Eigen::VectorXd::Constant(n, 1.5)};

    // rigid rotation on a fixed curve keeps a uniform concentration
    auto p = circle_polyline(n, 1.0);
    std::vector<Vec2> rot(n), zero(n, Vec2::Zero());
    for (int i = 0; i < n; ++i) rot[i] = 0.7 * perp(p.points[i]);
    auto r = surfactant_step(g, p, rot, 0.01, 1.0, zero);
    CHECK((r.g.G.array() - 1.5).abs().maxCoeff() < 1e-13);

    // expanding circle r = r0 + a t with nodes moving radially: G = G0 r0 / r
    const double r0 = 0.5, a = 0.25, dt = 0.01;
    Polyline c = circle_polyline(n, r0);
    SurfactantField G{Eigen::VectorXd::Constant(n, 2.0)};
    const double m0 = surfactant_mass(c, G);
    double t = 0, worst_mass = 0;
    while (t < r0 / a - 1e-12) {
        const auto nrm = nodal_normals(c);
        std::vector<Vec2> u(n);
        for (int i = 0; i < n; ++i) u[i] = a * nrm[i];
        auto s = surfactant_step(G, c, u, dt, 1.0);
        G = s.g;
        c = s.curve;
        t += dt;
        worst_mass = std::max(worst_mass, std::abs(surfactant_mass(c, G) - m0) / m0);
    }
    const double radius = c.points[0].norm();
    CHECK(radius == doctest::Approx(2 * r0).epsilon(1e-12));
    const double expect = 2.0 * r0 / radius;
    MESSAGE("expanding circle: G " << G.G(0) << " expected " << expect << " mass drift " << worst_mass);
    CHECK((G.G.array() - expect).abs().maxCoeff() / expect < 0.005);
    CHECK(worst_mass < 1e-10);

    // spike diffusing on a large fixed circle: mass constant, variance grows like 2 D t
    const int m = 400;
    const double R = 10.0, D = 0.5;
    Polyline big = circle_polyline(m, R);
    const double ds = segment_length(big, 0);
    SurfactantField s{Eigen::VectorXd::Zero(m)};
    s.G(0) = 1.0 / ds;
    const double mass0 = surfactant_mass(big, s);
    std::vector<Vec2> still(m, Vec2::Zero());
    auto variance = [&](const SurfactantField& f) {
        double num = 0, den = 0;
        for (int i = 0; i < m; ++i) {
            const double arc = ds * (i <= m / 2 ? i : i - m);
            num += f.G(i) * arc * arc * ds;
            den += f.G(i) * ds;
        }
        return num / den;
    };
    const double step = 0.002;
    double v1 = 0;
    for (int k = 1; k <= 1000; ++k) {
        s = surfactant_step(s, big, still, step, D).g;
        CHECK(std::abs(surfactant_mass(big, s) - mass0) / mass0 < 1e-10);
        if (k == 500) v1 = variance(s);
    }
    const double rate = (variance(s) - v1) / (500 * step);
    MESSAGE("diffusion variance rate " << rate << " vs " << 2 * D);
    CHECK(rate == doctest::Approx(2 * D).epsilon(0.02));

    Polyline open = p;
    open.closed = false;
    CHECK_THROWS_AS(surfactant_step(g, open, rot, 0.01), InvalidArgument);
}
