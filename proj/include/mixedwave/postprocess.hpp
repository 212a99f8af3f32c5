#pragma once

#include <array>
#include <functional>
#include <vector>

#include "mixedwave/timestepper.hpp"

namespace mixedwave {

/// Elementwise linear pressure with its time label.
struct PostprocessedPressure {
  FieldP1 field;
  double time = 0.0;
};

/// Local P1 coefficients {mean, d/dx, d/dy} in the centroid basis.
using LocalP1 = std::array<double, 3>;

/// Solves on one element
///
///   (grad pt, grad q)_K = (g - b dtu, grad q)_K   for all linear q,
///   (pt, 1)_K = p_mean |K|.
///
/// Gradients of linears are constants and the gradient Gram matrix is
/// |K| I, so the slope is the mean of g - b dtu and the constant is p_mean.
/// `g` may be empty (zero).
LocalP1 local_reconstruct(const Mesh& m, int element, const std::function<Vec2(const Vec2&)>& dtu,
                          const std::function<Vec2(const Vec2&)>& g, double p_mean,
                          const std::function<double(const Vec2&)>& b);

/// Reconstruction driven by a discrete BDM1 time derivative. The
/// element integrals of b * Piola(phi_j) are precomputed, so each call
/// costs one small product per element plus the source quadrature.
class PressureReconstructor {
public:
  PressureReconstructor(DiscretizationPtr space, std::function<double(const Vec2&)> b);

  const DiscretizationPtr& space() const { return space_; }

  /// int_K g(t) for every element; empty result for an empty g.
  std::vector<Vec2> source_integrals(const VectorFunction& g, double t) const;

  /// Local solves with dtu given by global BDM1 coefficients, element means
  /// `p_mean` and optional element integrals of g.
  FieldP1 reconstruct(const Eigen::VectorXd& dtu, const Eigen::VectorXd& p_mean,
                      const std::vector<Vec2>& g_integrals) const;

  /// Fully discrete form at t^{n-1/2}: dtu = (u^n - u^{n-1}) / tau,
  /// p_mean = (p^n + p^{n-1}) / 2, g averaged over the endpoint integrals.
  PostprocessedPressure halfstep(const SolutionState& prev, const SolutionState& next, double tau,
                                 const std::vector<Vec2>& g_prev, const std::vector<Vec2>& g_next) const;

private:
  DiscretizationPtr space_;
  // Per element: int_K b Piola(phi_j) for the six local functions.
  std::vector<Eigen::Matrix<double, 2, 6>> weighted_basis_;
};

struct HalfStepContext {
  const FieldBDM1& u_prev;
  const FieldBDM1& u_next;
  const FieldP0& p_prev;
  const FieldP0& p_next;
  double tau;
  VectorFunction g;  // may be empty
  double t_prev;
  double t_next;
};

/// Post-processed pressure at t^{n-1/2} from two consecutive discrete states.
PostprocessedPressure postprocess_halfstep(const HalfStepContext& ctx,
                                           const std::function<double(const Vec2&)>& b);

/// Post-processing with a caller-supplied time derivative at time t.
PostprocessedPressure postprocess_generic(const FieldBDM1& dtu, const FieldP0& p, const VectorFunction& g,
                                          double t, const std::function<double(const Vec2&)>& b);

PostprocessedPressure postprocess_generic(const VectorFunction& dtu, const FieldP0& p, const VectorFunction& g,
                                          double t, const std::function<double(const Vec2&)>& b);

}  // namespace mixedwave
