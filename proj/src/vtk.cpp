#include "nct/vtk.hpp"

#include <cstdio>
#include <fstream>

namespace nct {

void export_vtk(const Mesh& mesh, const SchemeState& state, const FieldP0& s_h,
                const std::string& path, const std::string& title) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  char buf[160];

  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (const Vec2& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g 0\n", v.x, v.y);
    out << buf;
  }
  out << "CELLS " << mesh.n_triangles() << " " << 4 * mesh.n_triangles() << "\n";
  for (const Triangle& tri : mesh.triangles) {
    out << "3 " << tri.v[0] << " " << tri.v[1] << " " << tri.v[2] << "\n";
  }
  out << "CELL_TYPES " << mesh.n_triangles() << "\n";
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) out << "5\n";

  out << "CELL_DATA " << mesh.n_triangles() << "\n";
  auto scalars = [&](const char* name, auto&& value_at) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
      std::snprintf(buf, sizeof(buf), "%.17g\n", value_at(t));
      out << buf;
    }
  };
  scalars("c", [&](std::size_t t) { return state.c.values[t]; });
  scalars("theta", [&](std::size_t t) { return state.theta.values[t]; });
  scalars("p", [&](std::size_t t) {
    return p1nc_evaluate(mesh, state.p, static_cast<Index>(t),
                         mesh.triangles[t].centroid);
  });
  const FieldP0 residual = div_residual(mesh, state.u, s_h);
  scalars("div_u_residual", [&](std::size_t t) { return residual.values[t]; });
  for (std::size_t i = 0; i < state.extra_species.size(); ++i) {
    const std::string name = "c_species_" + std::to_string(i + 2);
    scalars(name.c_str(),
            [&](std::size_t t) { return state.extra_species[i].values[t]; });
  }
  out << "VECTORS u double\n";
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const Vec2 u = rt0_evaluate(mesh, state.u, static_cast<Index>(t),
                                mesh.triangles[t].centroid);
    std::snprintf(buf, sizeof(buf), "%.17g %.17g 0\n", u.x, u.y);
    out << buf;
  }
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path);
}

}  // namespace nct
