#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mixedwave/postprocess.hpp"

namespace mixedwave {

/// Analytic solution together with the derivatives needed for residual
/// checks and for post-processing with an exact time derivative.
struct ExactSolution {
  ScalarFunction p;
  VectorFunction u;
  ScalarFunction dp_dt;
  VectorFunction du_dt;
  VectorFunction grad_p;
  ScalarFunction div_u;
};

struct TestCase {
  std::string name;
  Problem problem;
  double a = 1.0;  // constant coefficients used by the residual identity
  double b = 1.0;
  std::optional<ExactSolution> exact;
};

/// a = 2, b = 1, f = g = 0, p = sin(pi x) sin(pi y) cos(pi t),
/// u = -(cos(pi x) sin(pi y), sin(pi x) cos(pi y)) sin(pi t).
TestCase smooth_case();

/// Same data with p0 = sin(pi x) sin(pi y) on [-1,0]^2 and zero elsewhere
/// (kinks along x = 0 and y = 0), u0 = 0. No closed-form solution.
TestCase nonsmooth_case();

/// Solution affine in time whose semi-discrete solution is exactly
/// (pi_h p, rho_h u), so Crank-Nicolson has no time error:
/// p = (1 + t) P with P = xy(1 - x^2)(1 - y^2), u = (x^2, xy) + t (1 - y, x).
TestCase manufactured_case();

/// Static variant: the manufactured solution frozen at t = 0.
TestCase static_case();

/// Looks up "smooth", "nonsmooth", "manufactured" or "static".
/// Throws std::invalid_argument for other names.
TestCase make_case(std::string_view name);

/// max over recorded times of the spatial L2 norm. Throws
/// std::invalid_argument when nothing was recorded.
double tracking_norm(std::span<const double> values);

class TrackingNorm {
public:
  void record(double value);
  std::size_t count() const { return count_; }
  double value() const;

private:
  double max_ = 0.0;
  std::size_t count_ = 0;
};

/// Experimental orders log(e_{i-1}/e_i) / log(x_{i-1}/x_i) for each
/// consecutive pair. Pairs with a nonpositive error yield NaN. Throws
/// std::invalid_argument on length mismatch, fewer than two entries, or
/// parameters that are not positive and strictly decreasing.
std::vector<double> eoc(std::span<const double> errors, std::span<const double> params);

struct ConvergenceRow {
  double param = 0.0;
  std::array<double, 3> error{};              // u, p, p~
  std::array<std::optional<double>, 3> rate;  // empty on the first row
};

struct ConvergenceTable {
  std::string param_name;                  // "h" or "tau"
  std::array<std::string, 3> error_labels;  // for the text rendering
  std::vector<ConvergenceRow> rows;
  std::vector<double> energy_drift;         // per row, max relative drift

  /// Recomputes the rate columns from the error columns.
  void fill_rates();
};

/// CSV with header param,err_u,eoc_u,err_p,eoc_p,err_pt,eoc_pt.
void write_csv(std::ostream& os, const ConvergenceTable& table);
void write_text(std::ostream& os, const ConvergenceTable& table);

/// Errors of one run measured against projections of the exact solution:
/// |||pi^1 u - u_h|||, |||pi^0 p - p_h||| over t^n and |||pi^1 p - p~_h|||
/// over t^{n-1/2}.
struct ExactErrors {
  double err_u = 0.0;
  double err_p = 0.0;
  double err_pt = 0.0;
  double energy_drift = 0.0;
  int steps = 0;
};

/// One run of `tc` on build_lshape(n) with step tau up to `final_time`.
ExactErrors errors_against_exact(const TestCase& tc, int n, double tau, double final_time = 1.0);

/// h-study against the exact solution (param h = 1/n).
ConvergenceTable study_smooth_h(const TestCase& tc, std::span<const int> levels, double tau,
                                double final_time = 1.0, int threads = 1);

/// tau-study against the exact solution on build_lshape(n).
ConvergenceTable study_smooth_tau(const TestCase& tc, int n, std::span<const double> taus,
                                  double final_time = 1.0, int threads = 1);

/// Distances between the runs on build_lshape(n) and its uniform refinement
/// with the same tau: |||u_{h/2} - u_h|||, |||pi_h p_{h/2} - p_h||| and
/// |||pi^1_h pt_{h/2} - pt_h|||.
ExactErrors errors_against_refined_mesh(const TestCase& tc, int n, double tau, double final_time = 1.0);

/// Distances between runs with tau and tau/2 on build_lshape(n). Full-step
/// fields are compared at coincident times; each coarse half-step
/// reconstruction is compared with the mean of the two fine half-step
/// reconstructions adjacent to it.
ExactErrors errors_against_half_step(const TestCase& tc, int n, double tau, double final_time = 1.0);

ConvergenceTable study_nonsmooth_h(const TestCase& tc, std::span<const int> levels, double tau,
                                   double final_time = 1.0, int threads = 1);

ConvergenceTable study_nonsmooth_tau(const TestCase& tc, int n, std::span<const double> taus,
                                     double final_time = 1.0, int threads = 1);

}  // namespace mixedwave
