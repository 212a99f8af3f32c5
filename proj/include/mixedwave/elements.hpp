#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "mixedwave/mesh.hpp"

namespace mixedwave {

/// Quadrature on the reference triangle (0,0),(1,0),(0,1). Weights sum to
/// the reference area 1/2.
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Symmetric rule exact for polynomials up to `degree` (1..6). Rules are
/// built once and cached. Throws std::invalid_argument out of range.
const QuadratureRule& quadrature(int degree);

/// Gauss-Legendre rule on [-1, 1].
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};

/// Gauss-Legendre with 1..4 points.
const LineRule& gauss_legendre(int num_points);

/// Values of the six BDM1 basis functions on the reference triangle.
///
/// Local dof 2i+k is the k-th Legendre moment (k = 0: 1, k = 1: s) of v.n
/// on local edge i, the edge opposite local vertex i. The edge parameter
/// s runs over [-1, 1] from the lower to the higher local vertex index and
/// moments are taken with respect to arc length.
struct BDM1Values {
  std::array<Vec2, 6> values;
  std::array<double, 6> divergence;
};

BDM1Values bdm1_eval(const Vec2& ref_point);

/// Edge geometry on the reference triangle, in dof order.
struct ReferenceEdge {
  int from = 0;  // lower local vertex
  int to = 0;    // higher local vertex
  Vec2 normal;   // outward unit normal
};

const std::array<ReferenceEdge, 3>& reference_edges();
Vec2 reference_vertex(int local);

/// Coefficients of the dual basis in the monomial vector basis
/// (1,0),(x,0),(y,0),(0,1),(0,x),(0,y); column j holds basis function j.
const Eigen::Matrix<double, 6, 6>& bdm1_coefficients();

/// Affine map x = origin + J * xhat of a physical triangle.
struct AffineMap {
  Vec2 origin;
  Mat2 jacobian;
  double det = 0.0;

  Vec2 to_physical(const Vec2& ref) const { return origin + jacobian * ref; }
  Vec2 to_reference(const Vec2& x) const;
};

/// Throws std::invalid_argument when |det J| < 1e-14.
AffineMap affine_map(const Vec2& v0, const Vec2& v1, const Vec2& v2);
AffineMap affine_map(const Mesh& m, int triangle);

/// Contravariant Piola transform v = J vhat / det J.
inline Vec2 piola_map(const AffineMap& map, const Vec2& ref_vector) {
  return map.jacobian * ref_vector / map.det;
}

/// Piola transform for the triangle with the given physical vertices.
Vec2 piola_map(const std::array<Vec2, 3>& triangle, const Vec2& ref_vector);

/// Global numbering of BDM1 and P0 unknowns.
///
/// Global BDM1 dof 2e+k is the k-th Legendre moment of v.n_e on edge e,
/// with n_e the stored edge normal and s running from the lower to the
/// higher global vertex. `bdm_signs` converts local to global functionals.
struct DofMap {
  std::vector<std::array<int, 6>> bdm_dofs;
  std::vector<std::array<double, 6>> bdm_signs;
  int num_bdm = 0;
  int num_p0 = 0;

  int p0_dof(int triangle) const { return triangle; }
};

DofMap build_dofmap(const Mesh& m);

/// A mesh together with its dof numbering; fields refer to one of these.
struct Discretization {
  std::shared_ptr<const Mesh> mesh;
  DofMap dofs;
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;

DiscretizationPtr make_discretization(std::shared_ptr<const Mesh> mesh);
DiscretizationPtr make_discretization(Mesh mesh);

}  // namespace mixedwave
