#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include <Eigen/Core>

#include "mixedwave/elements.hpp"

namespace mixedwave {

/// Regularity of analytic data. Piecewise-smooth data must have its kinks
/// on mesh lines at every level (for the L-shape: the axes x = 0, y = 0).
enum class Smoothness { smooth, piecewise_smooth_axis_aligned };

struct ScalarFunction {
  std::function<double(const Vec2&, double)> eval;
  Smoothness smoothness = Smoothness::smooth;

  double operator()(const Vec2& x, double t) const { return eval(x, t); }
  explicit operator bool() const { return static_cast<bool>(eval); }
};

struct VectorFunction {
  std::function<Vec2(const Vec2&, double)> eval;
  Smoothness smoothness = Smoothness::smooth;

  Vec2 operator()(const Vec2& x, double t) const { return eval(x, t); }
  explicit operator bool() const { return static_cast<bool>(eval); }
};

ScalarFunction constant_scalar(double c);
VectorFunction constant_vector(const Vec2& c);

/// Elementwise constant field, one coefficient per triangle.
struct FieldP0 {
  DiscretizationPtr space;
  Eigen::VectorXd coeffs;

  FieldP0() = default;
  explicit FieldP0(DiscretizationPtr s);
  FieldP0(DiscretizationPtr s, Eigen::VectorXd c);

  const Mesh& mesh() const { return *space->mesh; }
  int components() const { return 1; }
  Vec2 value(int triangle, const Vec2& /*x*/) const { return Vec2(coeffs[triangle], 0.0); }
};

/// Elementwise linear field in the centroid basis {1, x - x_c, y - y_c}.
/// For triangle t and component c the coefficients sit at
/// 3 * (components * t + c) + {0, 1, 2}.
struct FieldP1 {
  DiscretizationPtr space;
  int num_components = 1;
  Eigen::VectorXd coeffs;

  FieldP1() = default;
  FieldP1(DiscretizationPtr s, int components);

  const Mesh& mesh() const { return *space->mesh; }
  int components() const { return num_components; }
  double* local(int triangle, int component = 0) {
    return coeffs.data() + 3 * (num_components * triangle + component);
  }
  const double* local(int triangle, int component = 0) const {
    return coeffs.data() + 3 * (num_components * triangle + component);
  }
  /// Element mean of one component (the constant coefficient).
  double mean(int triangle, int component = 0) const { return local(triangle, component)[0]; }
  Vec2 value(int triangle, const Vec2& x) const;
};

/// H(div)-conforming BDM1 field over the global edge-moment dofs.
struct FieldBDM1 {
  DiscretizationPtr space;
  Eigen::VectorXd coeffs;

  FieldBDM1() = default;
  explicit FieldBDM1(DiscretizationPtr s);
  FieldBDM1(DiscretizationPtr s, Eigen::VectorXd c);

  const Mesh& mesh() const { return *space->mesh; }
  int components() const { return 2; }
  /// Signed local coefficients of triangle t, so that the field there is
  /// sum_j local[j] * Piola(phi_j).
  std::array<double, 6> local(int triangle) const;
  Vec2 value(int triangle, const Vec2& x) const;
  Vec2 value_ref(int triangle, const AffineMap& map, const Vec2& ref) const;
  /// Constant divergence on a triangle.
  double divergence(int triangle) const;
};

/// pi_h^0: elementwise mean with the degree-6 rule.
FieldP0 project_p0(const ScalarFunction& f, double t, const DiscretizationPtr& space);

/// pi_h^1: elementwise L2 projection onto linears (componentwise for vectors).
FieldP1 project_p1(const ScalarFunction& f, double t, const DiscretizationPtr& space);
FieldP1 project_p1(const VectorFunction& f, double t, const DiscretizationPtr& space);

/// rho_h: BDM1 interpolant from edge moments of u.n (composite 4-point Gauss, 8 panels per edge).
FieldBDM1 interpolate_bdm1(const VectorFunction& u, double t, const DiscretizationPtr& space);

/// Exact L2 projection of a fine P0 field onto the parent mesh.
/// Throws std::invalid_argument if `coarse` is not the parent of the fine mesh.
FieldP0 restrict_p0(const FieldP0& fine, const DiscretizationPtr& coarse);

/// Exact L2 projection of a fine P1 field onto elementwise linears of the
/// parent mesh.
FieldP1 restrict_p1(const FieldP1& fine, const DiscretizationPtr& coarse);

/// Coarse elementwise linear field re-expressed on a nested fine mesh.
FieldP1 prolongate_p1(const FieldP1& coarse, const DiscretizationPtr& fine);

/// Elementwise linear L2 projection of a BDM1 field (identity on the
/// polynomial level; only changes the representation).
FieldP1 to_p1(const FieldBDM1& u);

/// Number of refinement steps from `coarse` to `fine` along the parent
/// chain: 0 if they are the same mesh, -1 if `coarse` is not an ancestor.
int nesting_depth(const Mesh& coarse, const Mesh& fine);

/// Index of the ancestor `depth` levels above fine triangle `t`.
int ancestor_triangle(const Mesh& fine, int t, int depth);

/// L2 norm of one field with the degree-6 rule.
template <class Field>
double l2_norm(const Field& f) {
  const Mesh& m = f.mesh();
  const QuadratureRule& rule = quadrature(6);
  double sum = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const AffineMap map = affine_map(m, t);
    double local = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      local += rule.weights[q] * f.value(t, map.to_physical(rule.points[q])).squaredNorm();
    }
    sum += local * map.det;
  }
  return std::sqrt(sum);
}

/// L2 norm of fine - coarse over the fine mesh, with the coarse field
/// evaluated through the nesting links. Both fields must have the same
/// number of components; the coarse mesh must be an ancestor of (or equal
/// to) the fine one.
template <class FineField, class CoarseField>
double diff_norm_nested(const FineField& fine, const CoarseField& coarse) {
  if (fine.components() != coarse.components()) {
    throw std::invalid_argument("diff_norm_nested: component count mismatch");
  }
  const Mesh& fm = fine.mesh();
  const Mesh& cm = coarse.mesh();
  const int depth = nesting_depth(cm, fm);
  if (depth < 0) {
    throw std::invalid_argument("diff_norm_nested: meshes are not nested");
  }
  const QuadratureRule& rule = quadrature(6);
  double sum = 0.0;
  for (int t = 0; t < fm.num_triangles(); ++t) {
    const int parent = ancestor_triangle(fm, t, depth);
    const AffineMap map = affine_map(fm, t);
    double local = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 x = map.to_physical(rule.points[q]);
      local += rule.weights[q] * (fine.value(t, x) - coarse.value(parent, x)).squaredNorm();
    }
    sum += local * map.det;
  }
  return std::sqrt(sum);
}

/// Exact L2 distance between two fields on the same mesh.
double l2_distance(const FieldP0& a, const FieldP0& b);
double l2_distance(const FieldP1& a, const FieldP1& b);

/// L2 distance of a field to an analytic function at time t.
double l2_error(const FieldP0& f, const ScalarFunction& exact, double t);
double l2_error(const FieldP1& f, const ScalarFunction& exact, double t);
double l2_error(const FieldBDM1& f, const VectorFunction& exact, double t);

}  // namespace mixedwave
