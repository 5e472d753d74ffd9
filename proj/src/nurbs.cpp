#include "flowlab/nurbs.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace flowlab {

Curve make_unit_circle() {
    Curve c;
    c.degree = 2;
    c.knots = {0, 0, 0, 0.25, 0.25, 0.5, 0.5, 0.75, 0.75, 1, 1, 1};
    const double xy[9][2] = {{0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}};
    const double s = std::sqrt(2.0) / 2;
    for (int i = 0; i < 9; ++i) {
        c.points.emplace_back(xy[i][0], xy[i][1], 0.0);
        c.weights.push_back(i % 2 == 0 ? 1.0 : s);
    }
    return c;
}

Curve make_circle(const Vec2& center, double radius) {
    Curve c = make_unit_circle();
    for (auto& p : c.points) p = Vec3(center.x(), center.y(), 0) + radius * p;
    return c;
}

Curve make_tank_wall() {
    Curve c;
    c.degree = 2;
    c.knots = {0, 0, 0};
    for (int i = 1; i <= 15; ++i) c.knots.push_back(i / 16.0);
    c.knots.insert(c.knots.end(), {1, 1, 1});
    const double xy[18][2] = {{10, 10}, {10, 5}, {10, 5}, {12, 4}, {8, 3}, {12, 2}, {8, 1}, {10, 0}, {10, 0},
                              {0, 0},   {0, 0},  {2, 1},  {-2, 2}, {2, 3}, {-2, 4}, {0, 5}, {0, 5}, {0, 10}};
    for (const auto& p : xy) {
        c.points.emplace_back(p[0], p[1], 0.0);
        c.weights.push_back(1.0);
    }
    return c;
}

Surface extrude(const Curve& c, double height) {
    Surface s;
    s.degree_u = c.degree;
    s.degree_v = 1;
    s.knots_u = c.knots;
    s.knots_v = {0, 0, 1, 1};
    s.nu = c.size();
    s.nv = 2;
    for (int i = 0; i < c.size(); ++i)
        for (int j = 0; j < 2; ++j) {
            s.points.push_back(c.points[i] + Vec3(0, 0, j * height));
            s.weights.push_back(c.weights[i]);
        }
    return s;
}

static void expect(std::istream& is, const std::string& word) {
    std::string w;
    if (!(is >> w) || w != word) throw Error("NURBS file: expected '" + word + "'");
}

template <class T>
static void write_list(std::ostream& os, const char* name, const std::vector<T>& v) {
    os << name << ' ' << v.size() << '\n';
    for (size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
    os << '\n';
}

static std::vector<double> read_list(std::istream& is, const std::string& name) {
    expect(is, name);
    size_t n = 0;
    if (!(is >> n)) throw Error("NURBS file: missing count for " + name);
    std::vector<double> v(n);
    for (auto& x : v)
        if (!(is >> x)) throw Error("NURBS file: truncated " + name);
    return v;
}

void write_curve(std::ostream& os, const Curve& c) {
    os.precision(17);
    os << "nurbs_curve\ndegree " << c.degree << '\n';
    write_list(os, "knots", c.knots);
    os << "control_points " << c.points.size() << '\n';
    for (const auto& p : c.points) os << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    write_list(os, "weights", c.weights);
}

Curve read_curve(std::istream& is) {
    Curve c;
    expect(is, "nurbs_curve");
    expect(is, "degree");
    if (!(is >> c.degree)) throw Error("NURBS file: bad degree");
    c.knots = read_list(is, "knots");
    expect(is, "control_points");
    size_t n = 0;
    if (!(is >> n)) throw Error("NURBS file: missing control point count");
    c.points.resize(n);
    for (auto& p : c.points)
        if (!(is >> p.x() >> p.y() >> p.z())) throw Error("NURBS file: truncated control points");
    c.weights = read_list(is, "weights");
    check_curve(c);
    return c;
}

void save_curve(const std::string& path, const Curve& c) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    write_curve(os, c);
}

Curve load_curve(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open NURBS file '" + path + "'");
    return read_curve(is);
}

void write_surface(std::ostream& os, const Surface& s) {
    os.precision(17);
    os << "nurbs_surface\ndegrees " << s.degree_u << ' ' << s.degree_v << '\n';
    write_list(os, "knots_u", s.knots_u);
    write_list(os, "knots_v", s.knots_v);
    os << "control_net " << s.nu << ' ' << s.nv << '\n';
    for (const auto& p : s.points) os << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    write_list(os, "weights", s.weights);
}

Surface read_surface(std::istream& is) {
    Surface s;
    expect(is, "nurbs_surface");
    expect(is, "degrees");
    if (!(is >> s.degree_u >> s.degree_v)) throw Error("NURBS file: bad degrees");
    s.knots_u = read_list(is, "knots_u");
    s.knots_v = read_list(is, "knots_v");
    expect(is, "control_net");
    if (!(is >> s.nu >> s.nv) || s.nu < 1 || s.nv < 1) throw Error("NURBS file: bad control net size");
    s.points.resize(static_cast<size_t>(s.nu) * s.nv);
    for (auto& p : s.points)
        if (!(is >> p.x() >> p.y() >> p.z())) throw Error("NURBS file: truncated control net");
    s.weights = read_list(is, "weights");
    check_knots(s.knots_u, s.degree_u, s.nu);
    check_knots(s.knots_v, s.degree_v, s.nv);
    if (s.weights.size() != s.points.size()) throw Error("NURBS file: weight count mismatch");
    return s;
}

}  // namespace flowlab
