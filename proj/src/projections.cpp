#include "mixedwave/projections.hpp"

#include <array>
#include <stdexcept>

#include <Eigen/Dense>

namespace mixedwave {

namespace {

// Basis values of the six BDM1 functions at the reference vertices.
const std::array<BDM1Values, 3>& vertex_values() {
  static const std::array<BDM1Values, 3> v = {bdm1_eval(reference_vertex(0)),
                                              bdm1_eval(reference_vertex(1)),
                                              bdm1_eval(reference_vertex(2))};
  return v;
}

// Second moments about the centroid: int_K (x-xc)(x-xc)^T.
Mat2 second_moments(const Mesh& m, int t) {
  const Vec2 c = m.centroid(t);
  Mat2 s = Mat2::Zero();
  for (int i = 0; i < 3; ++i) {
    const Vec2 d = m.vertex(t, i) - c;
    s += d * d.transpose();
  }
  return s * (m.area(t) / 12.0);
}

// Elementwise L2 projection onto {1, x-xc, y-yc} of an evaluator defined on
// the physical triangle; writes three coefficients per component.
template <class Eval>
void project_local_p1(const Mesh& m, int t, int components, Eval&& eval, double* out) {
  const QuadratureRule& rule = quadrature(6);
  const AffineMap map = affine_map(m, t);
  const Vec2 c = m.centroid(t);
  Eigen::Matrix<double, 3, 2> rhs = Eigen::Matrix<double, 3, 2>::Zero();
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const Vec2 x = map.to_physical(rule.points[q]);
    const Vec2 v = eval(x);
    const double w = rule.weights[q] * map.det;
    const Eigen::Vector3d basis(1.0, x.x() - c.x(), x.y() - c.y());
    rhs.col(0) += w * v.x() * basis;
    rhs.col(1) += w * v.y() * basis;
  }
  const Mat2 moments = second_moments(m, t);
  const double area = m.area(t);
  for (int k = 0; k < components; ++k) {
    const Vec2 slope = moments.ldlt().solve(rhs.col(k).tail<2>());
    out[3 * k] = rhs(0, k) / area;
    out[3 * k + 1] = slope.x();
    out[3 * k + 2] = slope.y();
  }
}

void require_space(const DiscretizationPtr& space, const char* who) {
  if (!space || !space->mesh) {
    throw std::invalid_argument(std::string(who) + ": missing discretization");
  }
}

}  // namespace

ScalarFunction constant_scalar(double c) {
  return {[c](const Vec2&, double) { return c; }, Smoothness::smooth};
}

VectorFunction constant_vector(const Vec2& c) {
  return {[c](const Vec2&, double) { return c; }, Smoothness::smooth};
}

FieldP0::FieldP0(DiscretizationPtr s) : space(std::move(s)) {
  require_space(space, "FieldP0");
  coeffs = Eigen::VectorXd::Zero(space->dofs.num_p0);
}

FieldP0::FieldP0(DiscretizationPtr s, Eigen::VectorXd c) : space(std::move(s)), coeffs(std::move(c)) {
  require_space(space, "FieldP0");
  if (coeffs.size() != space->dofs.num_p0) {
    throw std::invalid_argument("FieldP0: coefficient count does not match the mesh");
  }
}

FieldP1::FieldP1(DiscretizationPtr s, int components) : space(std::move(s)), num_components(components) {
  require_space(space, "FieldP1");
  if (components != 1 && components != 2) {
    throw std::invalid_argument("FieldP1: one or two components supported");
  }
  coeffs = Eigen::VectorXd::Zero(3 * components * space->mesh->num_triangles());
}

Vec2 FieldP1::value(int triangle, const Vec2& x) const {
  const Vec2 d = x - mesh().centroid(triangle);
  Vec2 v = Vec2::Zero();
  for (int k = 0; k < num_components; ++k) {
    const double* c = local(triangle, k);
    v[k] = c[0] + c[1] * d.x() + c[2] * d.y();
  }
  return v;
}

FieldBDM1::FieldBDM1(DiscretizationPtr s) : space(std::move(s)) {
  require_space(space, "FieldBDM1");
  coeffs = Eigen::VectorXd::Zero(space->dofs.num_bdm);
}

FieldBDM1::FieldBDM1(DiscretizationPtr s, Eigen::VectorXd c) : space(std::move(s)), coeffs(std::move(c)) {
  require_space(space, "FieldBDM1");
  if (coeffs.size() != space->dofs.num_bdm) {
    throw std::invalid_argument("FieldBDM1: coefficient count does not match the mesh");
  }
}

std::array<double, 6> FieldBDM1::local(int triangle) const {
  const auto& dofs = space->dofs.bdm_dofs[triangle];
  const auto& signs = space->dofs.bdm_signs[triangle];
  std::array<double, 6> c{};
  for (int j = 0; j < 6; ++j) {
    c[j] = signs[j] * coeffs[dofs[j]];
  }
  return c;
}

Vec2 FieldBDM1::value_ref(int triangle, const AffineMap& map, const Vec2& ref) const {
  const BDM1Values basis = bdm1_eval(ref);
  const auto c = local(triangle);
  Vec2 v = Vec2::Zero();
  for (int j = 0; j < 6; ++j) {
    v += c[j] * basis.values[j];
  }
  return piola_map(map, v);
}

Vec2 FieldBDM1::value(int triangle, const Vec2& x) const {
  const AffineMap map = affine_map(mesh(), triangle);
  return value_ref(triangle, map, map.to_reference(x));
}

double FieldBDM1::divergence(int triangle) const {
  static const BDM1Values basis = bdm1_eval(Vec2::Zero());
  const auto c = local(triangle);
  double div = 0.0;
  for (int j = 0; j < 6; ++j) {
    div += c[j] * basis.divergence[j];
  }
  return div / mesh().jacobian(triangle).determinant();
}

FieldP0 project_p0(const ScalarFunction& f, double t, const DiscretizationPtr& space) {
  FieldP0 out(space);
  const Mesh& m = *space->mesh;
  const QuadratureRule& rule = quadrature(6);
  for (int k = 0; k < m.num_triangles(); ++k) {
    const AffineMap map = affine_map(m, k);
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      sum += rule.weights[q] * f(map.to_physical(rule.points[q]), t);
    }
    // Reference weights sum to 1/2, so the mean is 2 * sum.
    out.coeffs[k] = 2.0 * sum;
  }
  return out;
}

FieldP1 project_p1(const ScalarFunction& f, double t, const DiscretizationPtr& space) {
  FieldP1 out(space, 1);
  const Mesh& m = *space->mesh;
  for (int k = 0; k < m.num_triangles(); ++k) {
    project_local_p1(m, k, 1, [&](const Vec2& x) { return Vec2(f(x, t), 0.0); }, out.local(k));
  }
  return out;
}

FieldP1 project_p1(const VectorFunction& f, double t, const DiscretizationPtr& space) {
  FieldP1 out(space, 2);
  const Mesh& m = *space->mesh;
  for (int k = 0; k < m.num_triangles(); ++k) {
    project_local_p1(m, k, 2, [&](const Vec2& x) { return f(x, t); }, out.local(k));
  }
  return out;
}

// Composite 4-point Gauss per edge. The commuting diagram is only as sharp as
// these edge integrals, and a single panel leaves 1e-4 on the coarsest mesh.
constexpr int kEdgePanels = 8;

FieldBDM1 interpolate_bdm1(const VectorFunction& u, double t, const DiscretizationPtr& space) {
  FieldBDM1 out(space);
  const Mesh& m = *space->mesh;
  const LineRule& line = gauss_legendre(4);
  for (int e = 0; e < m.num_edges(); ++e) {
    const Edge& edge = m.edges()[e];
    const Vec2 a = m.vertices()[edge.vertices[0]];
    const Vec2 b = m.vertices()[edge.vertices[1]];
    const double half_length = 0.5 * (b - a).norm();
    double m0 = 0.0;
    double m1 = 0.0;
    for (int panel = 0; panel < kEdgePanels; ++panel) {
      const double mid = -1.0 + (2.0 * panel + 1.0) / kEdgePanels;
      for (std::size_t q = 0; q < line.points.size(); ++q) {
        const double s = mid + line.points[q] / kEdgePanels;
        const Vec2 x = 0.5 * (a + b) + 0.5 * s * (b - a);
        const double flux = u(x, t).dot(edge.normal) * line.weights[q] * half_length / kEdgePanels;
        m0 += flux;
        m1 += flux * s;
      }
    }
    out.coeffs[2 * e] = m0;
    out.coeffs[2 * e + 1] = m1;
  }
  return out;
}

int nesting_depth(const Mesh& coarse, const Mesh& fine) {
  const Mesh* cur = &fine;
  int depth = 0;
  while (cur) {
    if (cur == &coarse ||
        (cur->num_triangles() == coarse.num_triangles() && cur->same_as(coarse))) {
      return depth;
    }
    cur = cur->parent().get();
    ++depth;
  }
  return -1;
}

int ancestor_triangle(const Mesh& fine, int t, int depth) {
  const Mesh* cur = &fine;
  for (int k = 0; k < depth; ++k) {
    if (!cur->parent()) {
      throw std::invalid_argument("ancestor_triangle: parent chain too short");
    }
    t = cur->parent_triangle(t);
    cur = cur->parent().get();
  }
  return t;
}

FieldP0 restrict_p0(const FieldP0& fine, const DiscretizationPtr& coarse) {
  const Mesh& fm = fine.mesh();
  const Mesh& cm = *coarse->mesh;
  const int depth = nesting_depth(cm, fm);
  if (depth < 0) {
    throw std::invalid_argument("restrict_p0: meshes are not nested");
  }
  FieldP0 out(coarse);
  for (int t = 0; t < fm.num_triangles(); ++t) {
    const int p = ancestor_triangle(fm, t, depth);
    out.coeffs[p] += fine.coeffs[t] * fm.area(t);
  }
  for (int p = 0; p < cm.num_triangles(); ++p) {
    out.coeffs[p] /= cm.area(p);
  }
  return out;
}

FieldP1 restrict_p1(const FieldP1& fine, const DiscretizationPtr& coarse) {
  const Mesh& fm = fine.mesh();
  const Mesh& cm = *coarse->mesh;
  const int depth = nesting_depth(cm, fm);
  if (depth < 0) {
    throw std::invalid_argument("restrict_p1: meshes are not nested");
  }
  const int nc = fine.components();
  // Accumulate int_child f * {1, x-xc, y-yc} with the coarse centroid; the
  // integrand is quadratic on every child so the degree-2 rule is exact.
  const QuadratureRule& rule = quadrature(2);
  std::vector<Eigen::Matrix<double, 3, 2>> rhs(cm.num_triangles(), Eigen::Matrix<double, 3, 2>::Zero());
  for (int t = 0; t < fm.num_triangles(); ++t) {
    const int p = ancestor_triangle(fm, t, depth);
    const Vec2 c = cm.centroid(p);
    const AffineMap map = affine_map(fm, t);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 x = map.to_physical(rule.points[q]);
      const Vec2 v = fine.value(t, x);
      const Eigen::Vector3d basis(1.0, x.x() - c.x(), x.y() - c.y());
      const double w = rule.weights[q] * map.det;
      rhs[p].col(0) += w * v.x() * basis;
      rhs[p].col(1) += w * v.y() * basis;
    }
  }
  FieldP1 out(coarse, nc);
  for (int p = 0; p < cm.num_triangles(); ++p) {
    const Mat2 moments = second_moments(cm, p);
    for (int k = 0; k < nc; ++k) {
      const Vec2 slope = moments.ldlt().solve(rhs[p].col(k).tail<2>());
      double* c = out.local(p, k);
      c[0] = rhs[p](0, k) / cm.area(p);
      c[1] = slope.x();
      c[2] = slope.y();
    }
  }
  return out;
}

FieldP1 prolongate_p1(const FieldP1& coarse, const DiscretizationPtr& fine) {
  const Mesh& cm = coarse.mesh();
  const Mesh& fm = *fine->mesh;
  const int depth = nesting_depth(cm, fm);
  if (depth < 0) {
    throw std::invalid_argument("prolongate_p1: meshes are not nested");
  }
  const int nc = coarse.components();
  FieldP1 out(fine, nc);
  for (int t = 0; t < fm.num_triangles(); ++t) {
    const int p = ancestor_triangle(fm, t, depth);
    const Vec2 shift = fm.centroid(t) - cm.centroid(p);
    for (int k = 0; k < nc; ++k) {
      const double* c = coarse.local(p, k);
      double* f = out.local(t, k);
      f[0] = c[0] + c[1] * shift.x() + c[2] * shift.y();
      f[1] = c[1];
      f[2] = c[2];
    }
  }
  return out;
}

FieldP1 to_p1(const FieldBDM1& u) {
  const Mesh& m = u.mesh();
  FieldP1 out(u.space, 2);
  const auto& vv = vertex_values();
  for (int t = 0; t < m.num_triangles(); ++t) {
    const AffineMap map = affine_map(m, t);
    const auto c = u.local(t);
    std::array<Vec2, 3> values;
    for (int i = 0; i < 3; ++i) {
      Vec2 v = Vec2::Zero();
      for (int j = 0; j < 6; ++j) {
        v += c[j] * vv[i].values[j];
      }
      values[i] = piola_map(map, v);
    }
    // Barycentric gradients: rows of J^{-1} for lambda_1, lambda_2.
    const Mat2 jinv = map.jacobian.inverse();
    const Vec2 g1 = jinv.row(0).transpose();
    const Vec2 g2 = jinv.row(1).transpose();
    const Vec2 g0 = -g1 - g2;
    for (int k = 0; k < 2; ++k) {
      double* out_c = out.local(t, k);
      out_c[0] = (values[0][k] + values[1][k] + values[2][k]) / 3.0;
      const Vec2 grad = values[0][k] * g0 + values[1][k] * g1 + values[2][k] * g2;
      out_c[1] = grad.x();
      out_c[2] = grad.y();
    }
  }
  return out;
}

double l2_distance(const FieldP0& a, const FieldP0& b) {
  if (a.space != b.space && !a.mesh().same_as(b.mesh())) {
    throw std::invalid_argument("l2_distance: fields live on different meshes");
  }
  const Mesh& m = a.mesh();
  double sum = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const double d = a.coeffs[t] - b.coeffs[t];
    sum += m.area(t) * d * d;
  }
  return std::sqrt(sum);
}

double l2_distance(const FieldP1& a, const FieldP1& b) {
  if (a.components() != b.components()) {
    throw std::invalid_argument("l2_distance: component count mismatch");
  }
  if (a.space != b.space && !a.mesh().same_as(b.mesh())) {
    throw std::invalid_argument("l2_distance: fields live on different meshes");
  }
  const Mesh& m = a.mesh();
  double sum = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const Mat2 moments = second_moments(m, t);
    for (int k = 0; k < a.components(); ++k) {
      const double* ca = a.local(t, k);
      const double* cb = b.local(t, k);
      const Vec2 dg(ca[1] - cb[1], ca[2] - cb[2]);
      const double d0 = ca[0] - cb[0];
      sum += m.area(t) * d0 * d0 + dg.dot(moments * dg);
    }
  }
  return std::sqrt(sum);
}

namespace {

template <class Field, class Exact>
double l2_error_impl(const Field& f, Exact&& exact) {
  const Mesh& m = f.mesh();
  const QuadratureRule& rule = quadrature(6);
  double sum = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const AffineMap map = affine_map(m, t);
    double local = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 x = map.to_physical(rule.points[q]);
      local += rule.weights[q] * (f.value(t, x) - exact(x)).squaredNorm();
    }
    sum += local * map.det;
  }
  return std::sqrt(sum);
}

}  // namespace

double l2_error(const FieldP0& f, const ScalarFunction& exact, double t) {
  return l2_error_impl(f, [&](const Vec2& x) { return Vec2(exact(x, t), 0.0); });
}

double l2_error(const FieldP1& f, const ScalarFunction& exact, double t) {
  if (f.components() != 1) {
    throw std::invalid_argument("l2_error: scalar reference for a vector field");
  }
  return l2_error_impl(f, [&](const Vec2& x) { return Vec2(exact(x, t), 0.0); });
}

double l2_error(const FieldBDM1& f, const VectorFunction& exact, double t) {
  return l2_error_impl(f, [&](const Vec2& x) { return exact(x, t); });
}

}  // namespace mixedwave
