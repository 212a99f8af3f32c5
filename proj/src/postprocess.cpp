#include "mixedwave/postprocess.hpp"

#include <stdexcept>

namespace mixedwave {

namespace {

const std::vector<BDM1Values>& basis_at_quadrature() {
  static const std::vector<BDM1Values> values = [] {
    std::vector<BDM1Values> v;
    for (const Vec2& p : quadrature(6).points) {
      v.push_back(bdm1_eval(p));
    }
    return v;
  }();
  return values;
}

}  // namespace

LocalP1 local_reconstruct(const Mesh& m, int element, const std::function<Vec2(const Vec2&)>& dtu,
                          const std::function<Vec2(const Vec2&)>& g, double p_mean,
                          const std::function<double(const Vec2&)>& b) {
  const AffineMap map = affine_map(m, element);
  const QuadratureRule& rule = quadrature(6);
  Vec2 rhs = Vec2::Zero();
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const Vec2 x = map.to_physical(rule.points[q]);
    Vec2 v = -b(x) * dtu(x);
    if (g) {
      v += g(x);
    }
    rhs += rule.weights[q] * map.det * v;
  }
  const Vec2 slope = rhs / m.area(element);
  return {p_mean, slope.x(), slope.y()};
}

PressureReconstructor::PressureReconstructor(DiscretizationPtr space, std::function<double(const Vec2&)> b)
    : space_(std::move(space)) {
  const Mesh& m = *space_->mesh;
  const QuadratureRule& rule = quadrature(6);
  const auto& basis = basis_at_quadrature();
  weighted_basis_.resize(m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const AffineMap map = affine_map(m, t);
    // int_K b J phi / det dx = J sum_q w_q b(x_q) phi(xhat_q)
    Eigen::Matrix<double, 2, 6> w = Eigen::Matrix<double, 2, 6>::Zero();
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double bq = rule.weights[q] * b(map.to_physical(rule.points[q]));
      for (int j = 0; j < 6; ++j) {
        w.col(j) += bq * basis[q].values[j];
      }
    }
    weighted_basis_[t] = map.jacobian * w;
  }
}

std::vector<Vec2> PressureReconstructor::source_integrals(const VectorFunction& g, double t) const {
  if (!g) {
    return {};
  }
  const Mesh& m = *space_->mesh;
  const QuadratureRule& rule = quadrature(6);
  std::vector<Vec2> out(m.num_triangles(), Vec2::Zero());
  for (int k = 0; k < m.num_triangles(); ++k) {
    const AffineMap map = affine_map(m, k);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      out[k] += rule.weights[q] * map.det * g(map.to_physical(rule.points[q]), t);
    }
  }
  return out;
}

FieldP1 PressureReconstructor::reconstruct(const Eigen::VectorXd& dtu, const Eigen::VectorXd& p_mean,
                                           const std::vector<Vec2>& g_integrals) const {
  const Mesh& m = *space_->mesh;
  const DofMap& dofs = space_->dofs;
  if (dtu.size() != dofs.num_bdm || p_mean.size() != dofs.num_p0) {
    throw std::invalid_argument("PressureReconstructor: field sizes do not match the mesh");
  }
  if (!g_integrals.empty() && static_cast<int>(g_integrals.size()) != m.num_triangles()) {
    throw std::invalid_argument("PressureReconstructor: source integral count does not match the mesh");
  }
  FieldP1 out(space_, 1);
  for (int t = 0; t < m.num_triangles(); ++t) {
    Eigen::Matrix<double, 6, 1> c;
    for (int j = 0; j < 6; ++j) {
      c[j] = dofs.bdm_signs[t][j] * dtu[dofs.bdm_dofs[t][j]];
    }
    Vec2 rhs = -(weighted_basis_[t] * c);
    if (!g_integrals.empty()) {
      rhs += g_integrals[t];
    }
    const Vec2 slope = rhs / m.area(t);
    double* local = out.local(t);
    local[0] = p_mean[t];
    local[1] = slope.x();
    local[2] = slope.y();
  }
  return out;
}

PostprocessedPressure PressureReconstructor::halfstep(const SolutionState& prev, const SolutionState& next,
                                                      double tau, const std::vector<Vec2>& g_prev,
                                                      const std::vector<Vec2>& g_next) const {
  const Eigen::VectorXd dtu = (next.u.coeffs - prev.u.coeffs) / tau;
  const Eigen::VectorXd mean = 0.5 * (next.p.coeffs + prev.p.coeffs);
  std::vector<Vec2> g;
  if (!g_prev.empty()) {
    g.resize(g_prev.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      g[k] = 0.5 * (g_prev[k] + g_next[k]);
    }
  }
  return {reconstruct(dtu, mean, g), 0.5 * (prev.time + next.time)};
}

PostprocessedPressure postprocess_halfstep(const HalfStepContext& ctx,
                                           const std::function<double(const Vec2&)>& b) {
  if (!(ctx.tau > 0.0)) {
    throw std::invalid_argument("postprocess_halfstep: tau must be positive");
  }
  PressureReconstructor rec(ctx.u_next.space, b);
  const auto g_prev = rec.source_integrals(ctx.g, ctx.t_prev);
  const auto g_next = rec.source_integrals(ctx.g, ctx.t_next);
  SolutionState prev{0, ctx.t_prev, ctx.p_prev, ctx.u_prev};
  SolutionState next{1, ctx.t_next, ctx.p_next, ctx.u_next};
  return rec.halfstep(prev, next, ctx.tau, g_prev, g_next);
}

PostprocessedPressure postprocess_generic(const FieldBDM1& dtu, const FieldP0& p, const VectorFunction& g,
                                          double t, const std::function<double(const Vec2&)>& b) {
  PressureReconstructor rec(dtu.space, b);
  return {rec.reconstruct(dtu.coeffs, p.coeffs, rec.source_integrals(g, t)), t};
}

PostprocessedPressure postprocess_generic(const VectorFunction& dtu, const FieldP0& p, const VectorFunction& g,
                                          double t, const std::function<double(const Vec2&)>& b) {
  const Mesh& m = p.mesh();
  FieldP1 out(p.space, 1);
  const auto dtu_at = [&](const Vec2& x) { return dtu(x, t); };
  std::function<Vec2(const Vec2&)> g_at;
  if (g) {
    g_at = [&](const Vec2& x) { return g(x, t); };
  }
  for (int k = 0; k < m.num_triangles(); ++k) {
    const LocalP1 c = local_reconstruct(m, k, dtu_at, g_at, p.coeffs[k], b);
    std::copy(c.begin(), c.end(), out.local(k));
  }
  return {out, t};
}

}  // namespace mixedwave
