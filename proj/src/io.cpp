#include "flowlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "flowlab/errors.hpp"

namespace flowlab {

static std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    os.precision(17);
    return os;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_vtk(const std::string& path, const Mesh2D& mesh, const std::vector<ScalarField>& scalars,
               const std::vector<VectorField>& vectors) {
    auto os = open_out(path);
    const int npe = mesh.nodes_per_element();
    os << "# vtk DataFile Version 3.0\nflowlab\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << mesh.num_nodes() << " double\n";
    for (const auto& p : mesh.nodes) os << p.x() << ' ' << p.y() << " 0\n";
    os << "CELLS " << mesh.num_elements() << ' ' << mesh.num_elements() * (npe + 1) << '\n';
    for (const auto& el : mesh.elements) {
        os << npe;
        for (int k = 0; k < npe; ++k) os << ' ' << el[k];
        os << '\n';
    }
    os << "CELL_TYPES " << mesh.num_elements() << '\n';
    for (int e = 0; e < mesh.num_elements(); ++e) os << (npe == 3 ? 5 : 9) << '\n';

    for (auto loc : {FieldLocation::Node, FieldLocation::Cell}) {
        bool header = false;
        auto start = [&] {
            if (header) return;
            header = true;
            if (loc == FieldLocation::Node)
                os << "POINT_DATA " << mesh.num_nodes() << '\n';
            else
                os << "CELL_DATA " << mesh.num_elements() << '\n';
        };
        for (const auto& f : scalars) {
            if (f.location != loc) continue;
            check_field(mesh, f);
            start();
            os << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
            for (Eigen::Index i = 0; i < f.values.size(); ++i) os << f.values(i) << '\n';
        }
        for (const auto& f : vectors) {
            if (f.location != loc) continue;
            check_field(mesh, f);
            start();
            os << "VECTORS " << f.name << " double\n";
            for (const auto& v : f.values) os << v.x() << ' ' << v.y() << " 0\n";
        }
    }
}

void write_vtk_points(const std::string& path, const std::vector<Vec2>& points) {
    auto os = open_out(path);
    os << "# vtk DataFile Version 3.0\nflowlab points\nASCII\nDATASET POLYDATA\n";
    os << "POINTS " << points.size() << " double\n";
    for (const auto& p : points) os << p.x() << ' ' << p.y() << " 0\n";
    os << "VERTICES " << points.size() << ' ' << 2 * points.size() << '\n';
    for (size_t i = 0; i < points.size(); ++i) os << "1 " << i << '\n';
}

void write_vtk_lines(const std::string& path, const std::vector<std::pair<Vec2, Vec2>>& segments) {
    auto os = open_out(path);
    os << "# vtk DataFile Version 3.0\nflowlab lines\nASCII\nDATASET POLYDATA\n";
    os << "POINTS " << 2 * segments.size() << " double\n";
    for (const auto& s : segments) os << s.first.x() << ' ' << s.first.y() << " 0\n" << s.second.x() << ' ' << s.second.y() << " 0\n";
    os << "LINES " << segments.size() << ' ' << 3 * segments.size() << '\n';
    for (size_t i = 0; i < segments.size(); ++i) os << "2 " << 2 * i << ' ' << 2 * i + 1 << '\n';
}

void write_mesh_text(const std::string& path, const Mesh2D& mesh) {
    auto os = open_out(path);
    os << "nodes " << mesh.num_nodes() << '\n';
    for (const auto& p : mesh.nodes) os << p.x() << ' ' << p.y() << '\n';
    os << "elements " << mesh.num_elements() << (mesh.kind == ElementKind::Quad ? " quad" : " tri") << '\n';
    for (const auto& el : mesh.elements) {
        for (int k = 0; k < mesh.nodes_per_element(); ++k) os << (k ? " " : "") << el[k];
        os << '\n';
    }
    os << "boundary " << mesh.boundary_edges.size() << '\n';
    for (const auto& b : mesh.boundary_edges) os << b.a << ' ' << b.b << ' ' << b.tag << '\n';
}

Mesh2D read_mesh_text(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open mesh file '" + path + "'");
    Mesh2D m;
    std::string word, kind;
    size_t n = 0;
    if (!(is >> word >> n) || word != "nodes") throw Error("mesh file: expected 'nodes <count>'");
    m.nodes.resize(n);
    for (auto& p : m.nodes)
        if (!(is >> p.x() >> p.y())) throw Error("mesh file: truncated node list");
    if (!(is >> word >> n >> kind) || word != "elements") throw Error("mesh file: expected 'elements <count> <kind>'");
    if (kind == "quad")
        m.kind = ElementKind::Quad;
    else if (kind == "tri")
        m.kind = ElementKind::Triangle;
    else
        throw Error("mesh file: unknown element kind '" + kind + "'");
    m.elements.resize(n);
    for (auto& el : m.elements) {
        el = {-1, -1, -1, -1};
        for (int k = 0; k < m.nodes_per_element(); ++k)
            if (!(is >> el[k])) throw Error("mesh file: truncated element list");
    }
    if (is >> word) {
        if (word != "boundary" || !(is >> n)) throw Error("mesh file: expected 'boundary <count>'");
        m.boundary_edges.resize(n);
        for (auto& b : m.boundary_edges)
            if (!(is >> b.a >> b.b >> b.tag)) throw Error("mesh file: truncated boundary list");
    }
    m.node_tags.assign(m.nodes.size(), 0u);
    check_mesh(m);
    return m;
}

void CsvTable::write(std::ostream& os) const {
    for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
        for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
        os << '\n';
    }
}

void CsvTable::write(const std::string& path) const {
    auto os = open_out(path);
    write(os);
}

}  // namespace flowlab
