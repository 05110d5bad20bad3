#ifndef PFS_SHAPES_HPP
#define PFS_SHAPES_HPP

#include <string>

#include "pfs/projection.hpp"

namespace pfs {

/// Axis-aligned box centred at the origin.
TriangleMesh make_box(double lx, double ly, double lz);

inline TriangleMesh make_cube(double edge = 1.0) { return make_box(edge, edge, edge); }

/// Icosphere of the given radius, centred at the origin.
TriangleMesh make_icosphere(double radius = 1.0, int subdivisions = 4);

/// Tapered L-prism: an L cross-section with arms of unequal width and length,
/// extruded with the top face shrunk and shifted, so the shape has no mirror
/// or rotational symmetry. Bounding box 2 x 1.7 x 1.2, centred at the origin.
TriangleMesh make_l_prism();

/// "builtin:cube" | "builtin:box" | "builtin:sphere" | "builtin:lprism".
/// Throws UnsupportedFormat for unknown names.
TriangleMesh make_builtin(const std::string& name);

bool is_builtin_name(const std::string& name);

}  // namespace pfs

#endif
