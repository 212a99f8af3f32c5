#include "mixedwave/vtk.hpp"

#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace mixedwave {

namespace {

void header(std::ostream& os, const char* title) {
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
}

void triangle_cells(std::ostream& os, int num_cells, bool duplicated, const Mesh& m) {
  os << "CELLS " << num_cells << ' ' << 4 * num_cells << '\n';
  for (int t = 0; t < num_cells; ++t) {
    os << 3;
    for (int i = 0; i < 3; ++i) {
      os << ' ' << (duplicated ? 3 * t + i : m.triangles()[t][i]);
    }
    os << '\n';
  }
  os << "CELL_TYPES " << num_cells << '\n';
  for (int t = 0; t < num_cells; ++t) {
    os << "5\n";
  }
}

}  // namespace

void write_vtk_mesh(std::ostream& os, const Mesh& m) {
  const auto flags = os.flags();
  os << std::setprecision(17);
  header(os, "mixedwave mesh");
  os << "POINTS " << m.num_vertices() << " double\n";
  for (const Vec2& v : m.vertices()) {
    os << v.x() << ' ' << v.y() << " 0\n";
  }
  triangle_cells(os, m.num_triangles(), false, m);
  os.flags(flags);
}

void write_vtk_solution(std::ostream& os, const FieldP0& p, const FieldBDM1& u, const std::optional<FieldP1>& pt) {
  const Mesh& m = p.mesh();
  if (!m.same_as(u.mesh()) || (pt && !m.same_as(pt->mesh()))) {
    throw std::invalid_argument("write_vtk_solution: fields live on different meshes");
  }
  const int nt = m.num_triangles();
  const auto flags = os.flags();
  os << std::setprecision(17);
  header(os, "mixedwave solution");
  os << "POINTS " << 3 * nt << " double\n";
  for (int t = 0; t < nt; ++t) {
    for (int i = 0; i < 3; ++i) {
      const Vec2& v = m.vertex(t, i);
      os << v.x() << ' ' << v.y() << " 0\n";
    }
  }
  triangle_cells(os, nt, true, m);
  if (pt) {
    os << "POINT_DATA " << 3 * nt << "\nSCALARS pressure_postprocessed double 1\nLOOKUP_TABLE default\n";
    for (int t = 0; t < nt; ++t) {
      for (int i = 0; i < 3; ++i) {
        os << pt->value(t, m.vertex(t, i)).x() << '\n';
      }
    }
  }
  os << "CELL_DATA " << nt << "\nSCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (int t = 0; t < nt; ++t) {
    os << p.coeffs[t] << '\n';
  }
  os << "VECTORS velocity double\n";
  for (int t = 0; t < nt; ++t) {
    const Vec2 v = u.value(t, m.centroid(t));
    os << v.x() << ' ' << v.y() << " 0\n";
  }
  os.flags(flags);
}

}  // namespace mixedwave
