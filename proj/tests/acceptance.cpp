// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "flowlab/bench.hpp"
#include "flowlab/levelset.hpp"
#include "flowlab/mac.hpp"
#include "flowlab/nurbs.hpp"
#include "flowlab/phasefield.hpp"
#include "flowlab/surface.hpp"
#include "flowlab/vof.hpp"

using namespace flowlab;

namespace {

// tolerances
constexpr double kDropJumpExact = 1e-8;
constexpr double kDropVelocity = 1e-8;
constexpr double kDropJumpOsculating = 0.02;
constexpr double kDimensionlessExact = 1e-12;
constexpr double kMoIdentity = 1e-14;
constexpr double kBubbleAreaLevelSet = 0.01;
constexpr double kBubbleAreaVof = 0.001;
constexpr double kBubbleCentroidAgreement = 0.05;
constexpr double kCircleRadius = 1e-13;
constexpr double kCircleCurvature = 1e-10;
constexpr double kPartitionOfUnity = 1e-13;
constexpr double kDerivativeFd = 1e-6;
constexpr double kWallDistance = 1e-10;
constexpr double kWallNormalVelocity = 1e-8;
constexpr double kTankAreaDrift = 0.01;
constexpr double kPlicArea = 1e-12;
constexpr double kTranslation = 1e-10;
constexpr double kTranslationMass = 1e-12;
constexpr double kHeightCurvature = 0.05;
constexpr double kHeightOrder = 1.8;
constexpr double kCrossingsFixed = 1e-12;
constexpr double kGradientDeviation = 0.05;
constexpr double kMassCorrection = 1e-10;
constexpr double kMacDivergence = 1e-10;
constexpr double kHydrostatic = 0.01;
constexpr double kRestFraction = 1e-2;
constexpr double kChMass = 1e-12;
constexpr double kLbResultant = 1e-10;
constexpr double kCsfVsLb = 0.03;
constexpr double kSurfactantMass = 1e-10;
constexpr double kExpandingCircle = 0.005;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what, double value) {
        if (!ok) pass = false;
        detail << (detail.tellp() > 0 ? "; " : "") << what << " " << value << (ok ? "" : " [fail]");
    }
};

Outcome static_drop() {
    Outcome o;
    auto c = BenchmarkConfig::defaults("static_drop");
    const auto exact = run_static_drop(c);
    o.require(exact.summary_value("jump_error_rel") <= kDropJumpExact, "analytic jump error", exact.summary_value("jump_error_rel"));
    o.require(exact.summary_value("max_velocity") <= kDropVelocity, "spurious velocity", exact.summary_value("max_velocity"));
    c.curvature = "osculating";
    c.interface_nodes = 64;
    const auto osc = run_static_drop(c);
    o.require(osc.summary_value("jump_error_rel") <= kDropJumpOsculating, "osculating jump error", osc.summary_value("jump_error_rel"));
    return o;
}

Outcome dimensionless() {
    Outcome o;
    const auto dn = dimensionless_numbers(BenchmarkConfig::defaults("rising_bubble"));
    o.require(std::abs(dn.Re - 35) <= kDimensionlessExact, "Re", dn.Re);
    o.require(std::abs(dn.Eo - 10) <= kDimensionlessExact, "Eo", dn.Eo);
    const double id = std::abs(dn.Mo - std::pow(dn.Eo, 3) / std::pow(dn.Re, 4)) / dn.Mo;
    o.require(id <= kMoIdentity, "Mo identity", id);
    return o;
}

Outcome rising_bubble() {
    Outcome o;
    Vec2 centroid[2];
    int k = 0;
    for (const char* method : {"levelset", "vof"}) {
        auto c = BenchmarkConfig::defaults("rising_bubble");
        c.method = method;
        c.output_dir = "acceptance_out";
        const auto rep = run_rising_bubble(c);
        rep.write(c.output_dir);
        const std::string m = method;
        bool rising = false;
        for (const auto& ch : rep.checks)
            if (ch.name == "centroid strictly rising after t = 0.2") rising = ch.pass;
        o.require(rising, m + " rising", rising);
        o.require(rep.summary_value("v_rise_initial") == 0.0, m + " v_rise(0)", rep.summary_value("v_rise_initial"));
        const double limit = k == 0 ? kBubbleAreaLevelSet : kBubbleAreaVof;
        o.require(rep.summary_value("area_drift_max") <= limit, m + " area drift", rep.summary_value("area_drift_max"));
        o.require(std::abs(rep.summary_value("final_time") - 3.0) < 1e-9, m + " final time", rep.summary_value("final_time"));
        centroid[k++] = Vec2(rep.summary_value("centroid_x"), rep.summary_value("centroid_y"));
    }
    const double agree = (centroid[0] - centroid[1]).norm() / centroid[1].norm();
    o.require(agree <= kBubbleCentroidAgreement, "centroid agreement", agree);
    return o;
}

Outcome nurbs_kernel() {
    Outcome o;
    const auto circle = make_unit_circle();
    double radius = 0;
    for (int i = 0; i < 1000; ++i) radius = std::max(radius, std::abs(curve_eval(circle, i / 999.0).C.norm() - 1));
    o.require(radius < kCircleRadius, "circle radius", radius);
    const auto half = make_circle(Vec2(0.1, 0.2), 0.5);
    double kap = 0;
    for (int i = 0; i < 200; ++i) kap = std::max(kap, std::abs(curve_curvature(half, i / 199.0) - 2.0));
    o.require(kap <= kCircleCurvature, "r = 0.5 curvature", kap);
    const auto wall = make_tank_wall();
    double pou = 0, fd = 0;
    for (int i = 0; i < 1000; ++i) {
        const double th = (i + 0.5) / 1000;
        pou = std::max(pou, std::abs(bspline_basis(wall.knots, 2, th).values.row(0).sum() - 1));
    }
    o.require(pou <= kPartitionOfUnity, "partition of unity", pou);
    for (const auto& c : {circle, wall})
        for (int i = 1; i < 200; ++i) {
            const double th = (i + 0.37) / 201.0, h = 1e-6;
            if (bspline_basis(c.knots, 2, th + h).span != bspline_basis(c.knots, 2, th - h).span) continue;
            const auto r = curve_eval(c, th), p = curve_eval(c, th + h), m = curve_eval(c, th - h);
            fd = std::max(fd, ((p.C - m.C) / (2 * h) - r.d1).norm() / r.d1.norm());
            fd = std::max(fd, ((p.d1 - m.d1) / (2 * h) - r.d2).norm() / std::max(1.0, r.d2.norm()));
        }
    o.require(fd <= kDerivativeFd, "derivative vs finite difference", fd);
    return o;
}

Outcome sloshing_tank() {
    Outcome o;
    auto c = BenchmarkConfig::defaults("sloshing_tank");
    c.output_dir = "acceptance_out";
    const auto rep = run_sloshing_tank(c);
    rep.write(c.output_dir);
    o.require(rep.summary_value("wall_distance_max") <= kWallDistance, "wall distance", rep.summary_value("wall_distance_max"));
    o.require(rep.summary_value("wall_normal_velocity_max") <= kWallNormalVelocity, "u.n",
              rep.summary_value("wall_normal_velocity_max"));
    o.require(rep.summary_value("area_drift_max") <= kTankAreaDrift, "area drift", rep.summary_value("area_drift_max"));
    o.require(rep.summary_value("inverted_elements") == 0, "inverted elements", rep.summary_value("inverted_elements"));
    o.require(std::abs(rep.summary_value("final_time") - 13.5) < 1e-9, "final time", rep.summary_value("final_time"));
    return o;
}

double height_function_error(int n) {
    const GridInfo g{n, n, {0, 0, 1, 1}};
    const double r = 0.25;
    const auto vf = init_volume_fraction(g, Shape::circle(Vec2(0.5123, 0.4929), r));
    double err = 0;
    for (int k = 0; k < n * n; ++k)
        if (is_interface_cell(vf.F(k)))
            if (auto kap = curvature_height_function(vf, k)) err = std::max(err, std::abs(*kap - 1 / r) * r);
    return err;
}

Outcome vof_kernel() {
    Outcome o;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(0, 1);
    double worst = 0;
    for (int t = 0; t < 10000; ++t) {
        const double th = 2 * M_PI * U(rng);
        const Vec2 n(std::cos(th), std::sin(th));
        const double F = U(rng), hx = 0.5 + U(rng), hy = 0.5 + U(rng);
        worst = std::max(worst, std::abs(plic_area(n, plic_alpha(n, F, hx, hy), hx, hy) - F * hx * hy) / (hx * hy));
    }
    o.require(worst <= kPlicArea, "PLIC area", worst);

    const GridInfo g{32, 16, {0, 0, 2, 1}};
    const double h = g.hx();
    const auto slab = init_volume_fraction(g, Shape::rectangle({0.3 + 0.37 * h, -1, 0.7 + 0.37 * h, 2}));
    FaceVelocity vel = zero_face_velocity(g);
    vel.u.setConstant(1.0);
    auto cur = slab;
    for (int s = 0; s < 4; ++s) cur = advect_geometric(cur, vel, h / 4, s);
    double err = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) err = std::max(err, std::abs(cur.F(g.cell(i, j)) - slab.F(g.cell(i - 1, j))));
    const double mass = std::abs(total_volume(cur) - total_volume(slab)) / total_volume(slab);
    o.require(err <= kTranslation, "translation", err);
    o.require(mass <= kTranslationMass, "translation mass", mass);

    const double e64 = height_function_error(64), e128 = height_function_error(128);
    const double order = std::log2(e64 / e128);
    o.require(e128 <= kHeightCurvature, "height curvature rel error", e128);
    o.require(order >= kHeightOrder, "height curvature order", order);
    return o;
}

Outcome levelset_kernel() {
    Outcome o;
    const auto m = build_structured_mesh(64, 64, {0, 0, 1, 1}, ElementKind::Quad);
    auto scaled = init_signed_distance(m, Shape::circle(Vec2(0.47, 0.52), 0.3), 6.0 / 64);
    scaled.phi *= 3;
    const auto r = reinitialize_narrow_band(m, scaled);
    const auto before = zero_set_crossings(m, scaled.phi), after = zero_set_crossings(m, r.phi);
    double moved = before.size() == after.size() ? 0 : 1;
    for (std::size_t k = 0; k < before.size() && k < after.size(); ++k)
        moved = std::max(moved, (before[k].x - after[k].x).norm());
    o.require(moved <= kCrossingsFixed, "crossing shift", moved);
    const double dev = gradient_deviation(m, r);
    o.require(dev <= kGradientDeviation, "gradient deviation", dev);

    const double eps = 1.5 / 64, target = M_PI * 0.09;
    const auto shrunk = init_signed_distance(m, Shape::circle(Vec2(0.5, 0.5), 0.3 * std::sqrt(0.99)), 0.1);
    for (double e : {eps, 0.0}) {
        const auto c = global_mass_correction(m, shrunk, target, e);
        const double rel = std::abs(phase1_area(m, c.field.phi, e) - target) / target;
        o.require(rel <= kMassCorrection, e > 0 ? "mass correction (smoothed)" : "mass correction (sharp)", rel);
    }
    return o;
}

Outcome mac_kernel() {
    Outcome o;
    const double h = 1.0 / 60;
    auto g = StaggeredGrid::make(64, 64, h);
    auto markers = seed_markers(g, [](const Vec2& x) { return x.y() < 1.0; });
    const MacParams still{1000, 1e-6, Vec2(0, -0.98)};
    const std::size_t count = markers.x.size();
    double div = 0;
    for (int s = 0; s < 20; ++s) div = std::max(div, mac_step(g, markers, 0.01, still).projection.max_divergence);
    double worst = 0;
    for (int i = 0; i < g.nx; ++i) {
        const double p0 = g.p(g.cell(i, 0)), p1 = g.p(g.cell(i, 1));
        worst = std::max(worst, std::abs(p0 + 0.5 * (p0 - p1) - 980.0) / 980.0);
    }
    o.require(div <= kMacDivergence, "divergence", div);
    o.require(worst <= kHydrostatic, "floor pressure", worst);
    o.require(markers.x.size() == count, "marker count", static_cast<double>(markers.x.size()));

    // half-filled box with a sloped surface
    auto b = StaggeredGrid::make(32, 32, 1.0 / 32);
    auto water = seed_markers(b, [](const Vec2& x) { return x.y() < 0.4 + 0.2 * x.x(); });
    const MacParams params{1000, 5e-3, Vec2(0, -0.98)};
    double peak = 0, last = 0;
    for (int s = 0; s < 1500; ++s) {
        const auto rep = mac_step(b, water, 0.01, params);
        div = std::max(div, rep.projection.max_divergence);
        peak = std::max(peak, rep.kinetic_energy);
        last = rep.kinetic_energy;
    }
    o.require(peak > 0 && last <= kRestFraction * peak, "final/peak kinetic energy", last / peak);
    o.require(div <= kMacDivergence, "divergence while settling", div);
    return o;
}

Outcome cahn_hilliard() {
    Outcome o;
    auto f = random_phase_field(64, 64, 1.0 / 64, 0.0, 0.05, 11, 1.0, 0.02, 1.0);
    const CahnHilliardSolver solver(f, 2e-4);
    const double scale = f.C.cwiseAbs().sum() * f.cell_area();
    double mass = 0;
    bool monotone = true;
    for (int s = 0; s < 100; ++s) {
        CahnHilliardReport rep;
        f = solver.step(f, &rep);
        mass = std::max(mass, std::abs(rep.mass_after - rep.mass_before) / scale);
        if (rep.energy_after > rep.energy_before) monotone = false;
    }
    o.require(mass <= kChMass, "mass per step", mass);
    o.require(monotone, "energy monotone", monotone);

    const double eps = 0.02, a = std::sqrt(2.0) * eps;
    std::vector<double> res;
    for (int n : {128, 256, 512}) {
        PhaseField p = PhaseField::make(n, 1, 1.0 / n, 1.0, eps, 1.0);
        for (int i = 0; i < n; ++i) p.C(i) = std::tanh((std::abs(i * p.h - 0.5) - 0.25) / a);
        res.push_back(chemical_potential(p).cwiseAbs().maxCoeff());
    }
    o.require(res[1] <= 0.5 * res[0] && res[2] <= 0.5 * res[1], "tanh residual ratio", res[2] / res[1]);
    return o;
}

Polyline circle_polyline(int n, double r, double start) {
    Polyline p;
    for (int k = 0; k < n; ++k) p.points.push_back(r * Vec2(std::cos(start + 2 * M_PI * k / n), std::sin(start + 2 * M_PI * k / n)));
    return p;
}

Outcome surface_module() {
    Outcome o;
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(0.7, 1.3);
    double resultant = 0;
    for (int trial = 0; trial < 2; ++trial) {
        Polyline p = circle_polyline(100, 0.5, 0.1);
        if (trial == 1)
            for (auto& x : p.points) x *= U(rng);
        Vec2 s = Vec2::Zero();
        for (const auto& f : laplace_beltrami_force(p, 3.0)) s += f;
        resultant = std::max(resultant, s.norm() / (3.0 * perimeter(p)));
    }
    o.require(resultant <= kLbResultant, "LB resultant / (gamma perimeter)", resultant);

    auto c = BenchmarkConfig::defaults("static_drop");
    c.curvature = "laplace_beltrami";
    const double lb = run_static_drop(c).summary_value("jump_mean");
    c.method = "levelset";
    const double csf = run_static_drop(c).summary_value("jump_mean");
    const double diff = std::abs(csf - lb) / lb;
    o.require(diff <= kCsfVsLb, "CSF vs LB jump", diff);

    const int n = 80;
    const double r0 = 0.5, speed = 0.25, dt = 0.01;
    Polyline curve = circle_polyline(n, r0, 0.0);
    SurfactantField G{Eigen::VectorXd::Constant(n, 2.0)};
    const double m0 = surfactant_mass(curve, G);
    double drift = 0;
    for (double t = 0; t < r0 / speed - 1e-12; t += dt) {
        const auto nrm = nodal_normals(curve);
        std::vector<Vec2> u(n);
        for (int i = 0; i < n; ++i) u[i] = speed * nrm[i];
        auto s = surfactant_step(G, curve, u, dt, 1.0);
        G = s.g;
        curve = s.curve;
        drift = std::max(drift, std::abs(surfactant_mass(curve, G) - m0) / m0);
    }
    const double expect = 2.0 * r0 / curve.points[0].norm();
    const double err = (G.G.array() - expect).abs().maxCoeff() / expect;
    o.require(drift <= kSurfactantMass, "surfactant mass", drift);
    o.require(std::abs(curve.points[0].norm() - 2 * r0) < 1e-12, "final radius", curve.points[0].norm());
    o.require(err <= kExpandingCircle, "expanding circle", err);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"static drop", static_drop},
        {"dimensionless numbers", dimensionless},
        {"rising bubble", rising_bubble},
        {"NURBS kernel", nurbs_kernel},
        {"sloshing tank", sloshing_tank},
        {"VOF kernel", vof_kernel},
        {"level-set kernel", levelset_kernel},
        {"MAC kernel", mac_kernel},
        {"Cahn-Hilliard", cahn_hilliard},
        {"surface module", surface_module},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        bool pass = false;
        std::string detail;
        try {
            Outcome o = criteria[k].second();
            pass = o.pass;
            detail = o.detail.str();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %zu %s (%.1f s): %s\n", pass ? "PASS" : "FAIL", k + 1, criteria[k].first, secs, detail.c_str());
        std::fflush(stdout);
        failed += !pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
