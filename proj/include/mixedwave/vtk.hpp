#pragma once

#include <iosfwd>
#include <optional>

#include "mixedwave/postprocess.hpp"

namespace mixedwave {

/// Legacy ASCII unstructured grid with triangle cells only.
void write_vtk_mesh(std::ostream& os, const Mesh& m);

/// Legacy ASCII file with every cell carrying its own three points, so the
/// discontinuous linear pressure can be stored as POINT_DATA. The constant
/// pressure and the velocity at the centroid are CELL_DATA.
void write_vtk_solution(std::ostream& os, const FieldP0& p, const FieldBDM1& u,
                        const std::optional<FieldP1>& pt = std::nullopt);

}  // namespace mixedwave
