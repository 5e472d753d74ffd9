#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "flowlab/mesh.hpp"

namespace flowlab {

// Legacy ASCII VTK unstructured grid with POINT_DATA / CELL_DATA sections.
void write_vtk(const std::string& path, const Mesh2D& mesh, const std::vector<ScalarField>& scalars = {},
               const std::vector<VectorField>& vectors = {});

// Points (markers) or polylines as VTK polydata.
void write_vtk_points(const std::string& path, const std::vector<Vec2>& points);
void write_vtk_lines(const std::string& path, const std::vector<std::pair<Vec2, Vec2>>& segments);

// Plain text mesh format:
//   nodes N / x y ... / elements M tri|quad / i j k [l] ... / boundary K / a b tag ...
void write_mesh_text(const std::string& path, const Mesh2D& mesh);
Mesh2D read_mesh_text(const std::string& path);

// 17 significant digits, the round-trip precision of a double.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    void write(std::ostream& os) const;
    void write(const std::string& path) const;
};

}  // namespace flowlab
