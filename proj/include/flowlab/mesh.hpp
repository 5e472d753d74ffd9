#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "flowlab/types.hpp"

namespace flowlab {

enum class ElementKind { Triangle, Quad };

namespace tag {
// boundary edge tags
inline constexpr int left = 1;
inline constexpr int right = 2;
inline constexpr int bottom = 3;
inline constexpr int top = 4;
inline constexpr int wall = 5;
inline constexpr int free_surface = 6;
inline constexpr int interface = 7;

// node tag bits
inline constexpr unsigned wall_node = 1u;
inline constexpr unsigned surface_node = 2u;
inline constexpr unsigned interface_node = 4u;
inline constexpr unsigned corner_node = 8u;
}  // namespace tag

struct BoundaryEdge {
    int a = -1, b = -1;
    int tag = 0;
};

// Present when the mesh came from build_structured_mesh; cell (i,j) is element j*nx+i for quads.
struct GridInfo {
    int nx = 0, ny = 0;
    Rect extent;
    double hx() const { return extent.width() / nx; }
    double hy() const { return extent.height() / ny; }
    int node(int i, int j) const { return j * (nx + 1) + i; }
    int cell(int i, int j) const { return j * nx + i; }
};

struct Mesh2D {
    ElementKind kind = ElementKind::Quad;
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 4>> elements;  // triangles leave slot 3 at -1
    std::vector<BoundaryEdge> boundary_edges;
    std::vector<unsigned> node_tags;
    std::vector<int> element_phase;  // optional, 1 or 2
    std::optional<GridInfo> grid;

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_elements() const { return static_cast<int>(elements.size()); }
    int nodes_per_element() const { return kind == ElementKind::Quad ? 4 : 3; }
    bool has_tag(int node, unsigned bit) const { return !node_tags.empty() && (node_tags[node] & bit); }
    void add_tag(int node, unsigned bit);
};

Mesh2D build_structured_mesh(int nx, int ny, const Rect& extent, ElementKind kind);

// Convenience for meshes assembled by hand; computes nothing, only validates orientation.
void check_mesh(const Mesh2D& mesh);

struct ShapeValues {
    Eigen::Matrix<double, 4, 1> N = Eigen::Matrix<double, 4, 1>::Zero();
    Eigen::Matrix<double, 4, 2> dN = Eigen::Matrix<double, 4, 2>::Zero();  // physical gradients
    double detJ = 0;
    Vec2 x = Vec2::Zero();
};

// Reference triangle is (0,0),(1,0),(0,1); reference quad is [-1,1]^2.
ShapeValues shape_eval(const Mesh2D& mesh, int element, const Vec2& ref_point);

struct QuadratureRule {
    std::vector<Vec2> points;
    std::vector<double> weights;
    int degree = 0;
};

QuadratureRule triangle_rule(int degree = 2);
QuadratureRule quad_rule(int degree = 2);
QuadratureRule element_rule(const Mesh2D& mesh, int degree = 2);
// On [0,1]; degree 3 by default.
QuadratureRule edge_rule(int degree = 3);

double integrate(const Mesh2D& mesh, const std::function<double(const Vec2&)>& f, int degree = 2);
double integrate(const Mesh2D& mesh, const Eigen::VectorXd& nodal, int degree = 2);
double element_area(const Mesh2D& mesh, int element);
double mesh_area(const Mesh2D& mesh);
Vec2 element_centroid(const Mesh2D& mesh, int element);
// Characteristic size: sqrt of area for quads, sqrt(2*area) for triangles.
double element_size(const Mesh2D& mesh, int element);

// Lumped nodal areas (row sums of the consistent mass matrix).
Eigen::VectorXd lumped_mass(const Mesh2D& mesh);

// Element containing x and its reference coordinates; nullopt if outside.
struct Location {
    int element = -1;
    Vec2 ref = Vec2::Zero();
};
std::optional<Location> locate(const Mesh2D& mesh, const Vec2& x);
double interpolate(const Mesh2D& mesh, const Eigen::VectorXd& nodal, const Location& loc);

// Triangles covering each element (quads split along the 0-2 diagonal), as node index triples.
std::vector<std::array<int, 3>> sub_triangles(const Mesh2D& mesh, int element);

// Unique undirected element edges.
std::vector<std::array<int, 2>> mesh_edges(const Mesh2D& mesh);

// Node-to-element adjacency.
std::vector<std::vector<int>> node_elements(const Mesh2D& mesh);

enum class FieldLocation { Node, Cell };

struct ScalarField {
    std::string name;
    FieldLocation location = FieldLocation::Node;
    Eigen::VectorXd values;
    std::string unit;
};

struct VectorField {
    std::string name;
    FieldLocation location = FieldLocation::Node;
    std::vector<Vec2> values;
    std::string unit;
};

void check_field(const Mesh2D& mesh, const ScalarField& f);
void check_field(const Mesh2D& mesh, const VectorField& f);

}  // namespace flowlab
