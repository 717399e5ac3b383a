#ifndef NCT_VTK_HPP
#define NCT_VTK_HPP

#include <string>

#include "nct/mesh.hpp"
#include "nct/scheme.hpp"

namespace nct {

/// Legacy ASCII unstructured-grid snapshot: triangles as cell type 5, all
/// fields as CELL_DATA (`c`, `theta`, `p` at the centroid, `div_u_residual`,
/// vector `u` at the centroid). Values printed with round-trip precision.
void export_vtk(const Mesh& mesh, const SchemeState& state, const FieldP0& s_h,
                const std::string& path, const std::string& title = "nct state");

}  // namespace nct

#endif
