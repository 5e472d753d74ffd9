#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "flowlab/errors.hpp"
#include "flowlab/types.hpp"

namespace flowlab {

enum class DomainPolicy { Strict, Clamp };

template <class Scalar>
using Point3 = Eigen::Matrix<Scalar, 3, 1>;

template <class Scalar>
struct NurbsCurve {
    int degree = 2;
    std::vector<Scalar> knots;
    std::vector<Point3<Scalar>> points;
    std::vector<Scalar> weights;

    int size() const { return static_cast<int>(points.size()); }
    Scalar first() const { return knots[degree]; }
    Scalar last() const { return knots[size()]; }
};

template <class Scalar>
struct NurbsSurface {
    int degree_u = 1, degree_v = 1;
    std::vector<Scalar> knots_u, knots_v;
    int nu = 0, nv = 0;
    std::vector<Point3<Scalar>> points;  // points[i * nv + j]
    std::vector<Scalar> weights;

    const Point3<Scalar>& P(int i, int j) const { return points[i * nv + j]; }
    Scalar w(int i, int j) const { return weights[i * nv + j]; }
};

// Nonzero basis functions at theta: values(d, k) is the d-th derivative of N_{span-p+k, p}.
template <class Scalar>
struct BasisValues {
    int span = 0;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> values;
};

template <class Scalar>
void check_knots(const std::vector<Scalar>& knots, int p, int n) {
    if (p < 0) throw InvalidArgument("negative spline degree");
    if (static_cast<int>(knots.size()) != n + p + 1)
        throw InvalidArgument("knot count must equal control points + degree + 1");
    for (size_t i = 1; i < knots.size(); ++i)
        if (knots[i] < knots[i - 1]) throw InvalidArgument("knot vector must be non-decreasing");
    if (!(knots[n] > knots[p])) throw InvalidArgument("empty parameter domain");
}

template <class Scalar>
Scalar apply_domain(Scalar theta, Scalar lo, Scalar hi, DomainPolicy policy) {
    if (theta >= lo && theta <= hi) return theta;
    if (policy == DomainPolicy::Strict) throw InvalidArgument("parameter outside the knot domain");
    return std::clamp(theta, lo, hi);
}

// Largest k in [p, n-1] with knots[k] <= theta < knots[k+1]; the last nonempty span at the right end.
template <class Scalar>
int find_span(const std::vector<Scalar>& knots, int p, int n, Scalar theta) {
    if (theta >= knots[n]) {
        int k = n - 1;
        while (k > p && knots[k] == knots[k + 1]) --k;
        return k;
    }
    if (theta <= knots[p]) {
        int k = p;
        while (k < n - 1 && knots[k + 1] <= theta) ++k;
        return k;
    }
    int lo = p, hi = n;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (theta < knots[mid])
            hi = mid;
        else
            lo = mid;
    }
    return lo;
}

// Cox-deBoor recursion with the 0/0 = 0 convention; derivatives by the degree-lowering formula.
template <class Scalar>
BasisValues<Scalar> bspline_basis(const std::vector<Scalar>& knots, int p, Scalar theta, int max_order = 2,
                                  DomainPolicy policy = DomainPolicy::Strict) {
    const int n = static_cast<int>(knots.size()) - p - 1;
    check_knots(knots, p, n);
    theta = apply_domain(theta, knots[p], knots[n], policy);
    const int span = find_span(knots, p, n, theta);

    // table[k][j]: N_{span-k+j, k}, j = 0..k
    std::vector<std::vector<Scalar>> table(p + 1);
    table[0] = {Scalar(1)};
    auto ratio = [](Scalar num, Scalar den) { return den == Scalar(0) ? Scalar(0) : num / den; };
    for (int k = 1; k <= p; ++k) {
        table[k].assign(k + 1, Scalar(0));
        for (int j = 0; j <= k; ++j) {
            const int i = span - k + j;
            const Scalar left = (j >= 1) ? table[k - 1][j - 1] : Scalar(0);   // N_{i,k-1}
            const Scalar right = (j <= k - 1) ? table[k - 1][j] : Scalar(0);  // N_{i+1,k-1}
            table[k][j] = ratio(theta - knots[i], knots[i + k] - knots[i]) * left +
                          ratio(knots[i + k + 1] - theta, knots[i + k + 1] - knots[i + 1]) * right;
        }
    }
    // d-th derivative of N_{i,k}; zero outside the active index window of degree k
    auto deriv = [&](auto&& self, int i, int k, int d) -> Scalar {
        const int j = i - (span - k);
        if (j < 0 || j > k) return Scalar(0);
        if (d == 0) return table[k][j];
        if (k == 0) return Scalar(0);
        const Scalar a = ratio(Scalar(k), knots[i + k] - knots[i]);
        const Scalar b = ratio(Scalar(k), knots[i + k + 1] - knots[i + 1]);
        return a * self(self, i, k - 1, d - 1) - b * self(self, i + 1, k - 1, d - 1);
    };
    BasisValues<Scalar> out;
    out.span = span;
    out.values.resize(max_order + 1, p + 1);
    for (int d = 0; d <= max_order; ++d)
        for (int j = 0; j <= p; ++j) out.values(d, j) = deriv(deriv, span - p + j, p, d);
    return out;
}

template <class Scalar>
void check_curve(const NurbsCurve<Scalar>& c) {
    check_knots(c.knots, c.degree, c.size());
    if (c.weights.size() != c.points.size()) throw InvalidArgument("one weight per control point required");
    for (auto w : c.weights)
        if (!(w > Scalar(0))) throw InvalidArgument("NURBS weights must be positive");
}

template <class Scalar>
struct CurvePoint {
    Point3<Scalar> C, d1, d2;
};

// Rational evaluation. With A = sum N w P and W = sum N w:
//   C' = (A' - W' C) / W,  C'' = (A'' - 2 W' C' - W'' C) / W
template <class Scalar>
CurvePoint<Scalar> curve_eval(const NurbsCurve<Scalar>& c, Scalar theta, DomainPolicy policy = DomainPolicy::Strict) {
    const auto b = bspline_basis(c.knots, c.degree, theta, 2, policy);
    Point3<Scalar> A[3] = {Point3<Scalar>::Zero(), Point3<Scalar>::Zero(), Point3<Scalar>::Zero()};
    Scalar W[3] = {0, 0, 0};
    for (int j = 0; j <= c.degree; ++j) {
        const int i = b.span - c.degree + j;
        for (int d = 0; d < 3; ++d) {
            A[d] += b.values(d, j) * c.weights[i] * c.points[i];
            W[d] += b.values(d, j) * c.weights[i];
        }
    }
    CurvePoint<Scalar> r;
    r.C = A[0] / W[0];
    r.d1 = (A[1] - W[1] * r.C) / W[0];
    r.d2 = (A[2] - Scalar(2) * W[1] * r.d1 - W[2] * r.C) / W[0];
    return r;
}

// Rational basis R_{i,p} at theta: (index, value) for the p+1 nonzero functions.
template <class Scalar>
std::vector<std::pair<int, Scalar>> rational_basis(const NurbsCurve<Scalar>& c, Scalar theta) {
    const auto b = bspline_basis(c.knots, c.degree, theta, 0);
    Scalar W = 0;
    for (int j = 0; j <= c.degree; ++j) W += b.values(0, j) * c.weights[b.span - c.degree + j];
    std::vector<std::pair<int, Scalar>> out;
    for (int j = 0; j <= c.degree; ++j) {
        const int i = b.span - c.degree + j;
        out.emplace_back(i, b.values(0, j) * c.weights[i] / W);
    }
    return out;
}

template <class Scalar>
Scalar curve_curvature(const NurbsCurve<Scalar>& c, Scalar theta) {
    const auto r = curve_eval(c, theta);
    const Scalar speed = r.d1.norm();
    if (speed < Scalar(1e-12)) throw Error("vanishing curve derivative (cusp) at parameter");
    return r.d1.cross(r.d2).norm() / (speed * speed * speed);
}

// Positive when the curve turns left (counterclockwise) in the xy plane.
template <class Scalar>
Scalar curve_signed_curvature(const NurbsCurve<Scalar>& c, Scalar theta) {
    const auto r = curve_eval(c, theta);
    const Scalar speed = r.d1.norm();
    if (speed < Scalar(1e-12)) throw Error("vanishing curve derivative (cusp) at parameter");
    return r.d1.cross(r.d2).z() / (speed * speed * speed);
}

template <class Scalar>
struct SurfacePoint {
    Point3<Scalar> S, t1, t2;
};

template <class Scalar>
SurfacePoint<Scalar> surface_eval(const NurbsSurface<Scalar>& s, Scalar theta, Scalar iota,
                                  DomainPolicy policy = DomainPolicy::Strict) {
    const auto bu = bspline_basis(s.knots_u, s.degree_u, theta, 1, policy);
    const auto bv = bspline_basis(s.knots_v, s.degree_v, iota, 1, policy);
    Point3<Scalar> A = Point3<Scalar>::Zero(), Au = A, Av = A;
    Scalar W = 0, Wu = 0, Wv = 0;
    for (int a = 0; a <= s.degree_u; ++a)
        for (int b = 0; b <= s.degree_v; ++b) {
            const int i = bu.span - s.degree_u + a, j = bv.span - s.degree_v + b;
            const Scalar w = s.w(i, j);
            const auto& P = s.P(i, j);
            const Scalar N = bu.values(0, a) * bv.values(0, b);
            const Scalar Nu = bu.values(1, a) * bv.values(0, b);
            const Scalar Nv = bu.values(0, a) * bv.values(1, b);
            A += N * w * P;
            Au += Nu * w * P;
            Av += Nv * w * P;
            W += N * w;
            Wu += Nu * w;
            Wv += Nv * w;
        }
    SurfacePoint<Scalar> r;
    r.S = A / W;
    r.t1 = (Au - Wu * r.S) / W;
    r.t2 = (Av - Wv * r.S) / W;
    return r;
}

template <class Scalar>
struct TangentFrame {
    Point3<Scalar> t1n, t2n, n;
};

template <class Scalar>
TangentFrame<Scalar> orthonormal_frame(const Point3<Scalar>& t1, const Point3<Scalar>& t2) {
    const Scalar n1 = t1.norm();
    if (n1 < Scalar(1e-14)) throw Error("degenerate frame: zero first tangent");
    TangentFrame<Scalar> f;
    f.t1n = t1 / n1;
    const Point3<Scalar> r = t2 - t2.dot(f.t1n) * f.t1n;
    const Scalar n2 = r.norm();
    if (n2 < Scalar(1e-12) * std::max(Scalar(1), t2.norm())) throw Error("degenerate frame: parallel tangents");
    f.t2n = r / n2;
    f.n = f.t1n.cross(f.t2n);
    return f;
}

// Curve frame with the out-of-plane axis as second tangent; n lies in the xy plane.
template <class Scalar>
TangentFrame<Scalar> curve_frame(const NurbsCurve<Scalar>& c, Scalar theta) {
    const auto r = curve_eval(c, theta);
    return orthonormal_frame<Scalar>(r.d1, Point3<Scalar>(0, 0, 1));
}

template <class Scalar>
struct Rotation {
    Eigen::Matrix<Scalar, 3, 3> O;
    bool sign_fixed = false;  // normal flipped to make det(O) = +1
};

template <class Scalar>
Rotation<Scalar> rotation_matrix(const TangentFrame<Scalar>& f) {
    Rotation<Scalar> r;
    r.O.col(0) = f.t1n;
    r.O.col(1) = f.t2n;
    r.O.col(2) = f.n;
    const Eigen::Matrix<Scalar, 3, 3> I = Eigen::Matrix<Scalar, 3, 3>::Identity();
    if ((r.O.transpose() * r.O - I).cwiseAbs().maxCoeff() > Scalar(1e-10)) throw InvalidArgument("frame is not orthonormal");
    if (r.O.determinant() < 0) {
        r.O.col(2) = -r.O.col(2);
        r.sign_fixed = true;
    }
    return r;
}

template <class Scalar>
Scalar parametric_displacement(const NurbsCurve<Scalar>& c, Scalar theta, Scalar dt1) {
    const Scalar speed = curve_eval(c, theta).d1.norm();
    if (speed < Scalar(1e-14)) throw Error("zero tangent norm in parametric displacement");
    return dt1 / speed;
}

template <class Scalar>
std::pair<Scalar, Scalar> parametric_displacement(const NurbsSurface<Scalar>& s, Scalar theta, Scalar iota, Scalar dt1,
                                                  Scalar dt2) {
    const auto e = surface_eval(s, theta, iota);
    const Scalar n1 = e.t1.norm();
    if (n1 < Scalar(1e-14)) throw Error("zero tangent norm in parametric displacement");
    const Point3<Scalar> t1n = e.t1 / n1;
    const Scalar proj = e.t2.dot(t1n);
    const Scalar q = (e.t2 - proj * t1n).norm();
    if (q < Scalar(1e-14)) throw Error("zero tangent norm in parametric displacement");
    return {(dt1 - dt2 * proj / q) / n1, dt2 / q};
}

template <class Scalar>
struct ParameterUpdate {
    Scalar theta;
    bool clamped = false;
};

// Slide a curve point by a Cartesian displacement: only the tangential part is used.
template <class Scalar>
ParameterUpdate<Scalar> slide_along(const NurbsCurve<Scalar>& c, Scalar theta, const Point3<Scalar>& dx, Scalar lo,
                                    Scalar hi) {
    const auto f = curve_frame(c, theta);
    ParameterUpdate<Scalar> u;
    u.theta = theta + parametric_displacement(c, theta, Scalar(dx.dot(f.t1n)));
    if (u.theta < lo || u.theta > hi) {
        u.theta = std::clamp(u.theta, lo, hi);
        u.clamped = true;
    }
    return u;
}

template <class Scalar>
struct ClosestPoint {
    Scalar theta = 0;
    Scalar distance = 0;
    bool fallback = false;
};

template <class Scalar>
ClosestPoint<Scalar> closest_point(const NurbsCurve<Scalar>& c, const Point3<Scalar>& x, int starts_per_span = 4) {
    check_curve(c);
    ClosestPoint<Scalar> best;
    best.distance = std::numeric_limits<Scalar>::infinity();
    bool converged_any = false;
    for (int k = c.degree; k < c.size(); ++k) {
        const Scalar a = c.knots[k], b = c.knots[k + 1];
        if (!(b > a)) continue;
        // coarse samples for the global guard
        for (int s = 0; s <= 8 * starts_per_span; ++s) {
            const Scalar t = a + (b - a) * Scalar(s) / Scalar(8 * starts_per_span);
            const Scalar d = (curve_eval(c, t).C - x).norm();
            if (d < best.distance) {
                best.distance = d;
                best.theta = t;
            }
        }
        for (int s = 0; s < starts_per_span; ++s) {
            Scalar t = a + (b - a) * (Scalar(s) + Scalar(0.5)) / Scalar(starts_per_span);
            bool ok = false;
            for (int it = 0; it < 50; ++it) {
                const auto r = curve_eval(c, t);
                const Point3<Scalar> diff = r.C - x;
                const Scalar f = diff.dot(r.d1);
                const Scalar df = r.d1.dot(r.d1) + diff.dot(r.d2);
                if (!(std::abs(df) > Scalar(0))) break;
                Scalar tn = t - f / df;
                tn = std::clamp(tn, a, b);
                const Scalar step = std::abs(tn - t);
                t = tn;
                if (step < Scalar(1e-15) * std::max(Scalar(1), std::abs(b - a))) {
                    ok = true;
                    break;
                }
            }
            if (ok) converged_any = true;
            const Scalar d = (curve_eval(c, t).C - x).norm();
            if (d < best.distance) {
                best.distance = d;
                best.theta = t;
            }
        }
    }
    if (!converged_any) {
        // golden-section refinement around the best sample
        best.fallback = true;
        const Scalar h = (c.last() - c.first()) / Scalar(8 * starts_per_span * c.size());
        Scalar a = std::max(c.first(), best.theta - h), b = std::min(c.last(), best.theta + h);
        const Scalar g = (std::sqrt(Scalar(5)) - 1) / 2;
        for (int it = 0; it < 200; ++it) {
            const Scalar t1 = b - g * (b - a), t2 = a + g * (b - a);
            if ((curve_eval(c, t1).C - x).norm() < (curve_eval(c, t2).C - x).norm())
                b = t2;
            else
                a = t1;
        }
        best.theta = (a + b) / 2;
        best.distance = (curve_eval(c, best.theta).C - x).norm();
    }
    return best;
}

using Curve = NurbsCurve<double>;
using Surface = NurbsSurface<double>;
using Frame = TangentFrame<double>;

// Degree 2, 9 control points, knots [0 0 0 1/4 1/4 1/2 1/2 3/4 3/4 1 1 1], starting at (0,-1).
Curve make_unit_circle();
Curve make_circle(const Vec2& center, double radius);
// Curved-wall sloshing tank: quadratic, 18 control points, uniform interior knots of 1/16.
Curve make_tank_wall();
// Straight extrusion of a curve along z over [0, height].
Surface extrude(const Curve& c, double height);

void write_curve(std::ostream& os, const Curve& c);
Curve read_curve(std::istream& is);
void save_curve(const std::string& path, const Curve& c);
Curve load_curve(const std::string& path);
void write_surface(std::ostream& os, const Surface& s);
Surface read_surface(std::istream& is);

}  // namespace flowlab
