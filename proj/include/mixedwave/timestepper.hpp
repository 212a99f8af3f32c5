#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/SparseCholesky>

#include "mixedwave/assembly.hpp"

namespace mixedwave {

/// Raised when a linear solve fails or misses its residual contract.
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Uniform grid t^n = n * tau on [0, T] with tau = T / N.
struct TimeGrid {
  double final_time = 1.0;
  int steps = 1;

  double tau() const { return final_time / steps; }
  double time(int n) const { return n * tau(); }
  /// t^{n-1/2}
  double half_time(int n) const { return (n - 0.5) * tau(); }
};

/// Throws std::invalid_argument unless N >= 1 and T > 0.
TimeGrid make_time_grid(double final_time, int steps);

/// Grid with the given step; T / tau must be an integer within 1e-12.
TimeGrid time_grid_from_step(double final_time, double tau);

/// Data of the first-order acoustic system. Empty source or initial-data
/// functions are treated as zero.
struct Problem {
  ProblemCoefficients coeffs;
  ScalarFunction f;
  VectorFunction g;
  ScalarFunction p0;
  VectorFunction u0;
};

struct SystemMatrices {
  SparseMatrix mass_p;  // M_a
  SparseMatrix mass_u;  // M_b
  SparseMatrix div;     // D
};

SystemMatrices assemble_system(const ProblemCoefficients& coeffs, const Discretization& space);

struct SolutionState {
  int step = 0;
  double time = 0.0;
  FieldP0 p;
  FieldBDM1 u;
};

/// (M_a p, p) + (M_b u, u)
double discrete_energy(const SystemMatrices& sys, const SolutionState& s);

/// Factorised Crank-Nicolson step matrix
///
///   [ M_a/tau    D/2   ] [p]   [rp]
///   [ -D^T/2   M_b/tau ] [u] = [ru]
///
/// M_a is diagonal, so p is eliminated and the symmetric Schur complement
/// M_b/tau + tau/4 D^T M_a^{-1} D is factorised once (sparse LDL^T with AMD
/// ordering). Every solve checks the block residual against 1e-11 relative
/// and applies one step of iterative refinement if needed. Negative tau is
/// accepted and integrates backwards.
class StepOperator {
public:
  StepOperator(std::shared_ptr<const SystemMatrices> sys, double tau);

  double tau() const { return tau_; }
  const SystemMatrices& matrices() const { return *sys_; }
  const std::shared_ptr<const SystemMatrices>& system() const { return sys_; }

  void solve(const Eigen::VectorXd& rp, const Eigen::VectorXd& ru, Eigen::VectorXd& p,
             Eigen::VectorXd& u) const;

  /// ||A x - r|| / ||r|| of the most recent solve.
  double last_relative_residual() const { return last_residual_; }

  static constexpr double kResidualTolerance = 1e-11;

private:
  double residual(const Eigen::VectorXd& rp, const Eigen::VectorXd& ru, const Eigen::VectorXd& p,
                  const Eigen::VectorXd& u, Eigen::VectorXd& res_p, Eigen::VectorXd& res_u) const;
  void solve_once(const Eigen::VectorXd& rp, const Eigen::VectorXd& ru, Eigen::VectorXd& p,
                  Eigen::VectorXd& u) const;

  std::shared_ptr<const SystemMatrices> sys_;
  double tau_;
  Eigen::VectorXd inv_mass_p_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> schur_;
  mutable double last_residual_ = 0.0;
};

/// Source loads at one time level; empty vectors stand for zero.
struct SourceLoads {
  Eigen::VectorXd f;
  Eigen::VectorXd g;
};

SourceLoads assemble_sources(const Problem& problem, double t, const Discretization& space);

/// p = pi_h p0, u = rho_h u0 at n = 0.
SolutionState init_state(const Problem& problem, const DiscretizationPtr& space);

/// One Crank-Nicolson step from t^{n-1} to t^n = t^{n-1} + tau, with the
/// sources averaged over the two endpoint loads.
SolutionState step(const StepOperator& op, const SolutionState& state, const SourceLoads& prev,
                   const SourceLoads& next);

/// Receives every transition of a run. start() sees the initial state.
class Observer {
public:
  virtual ~Observer() = default;
  virtual void start(const SolutionState& /*initial*/) {}
  virtual void step(const SolutionState& prev, const SolutionState& next, double tau) = 0;
};

/// A single time evolution that can be advanced one step at a time, so
/// that several runs can be compared in lockstep.
class Simulation {
public:
  Simulation(Problem problem, DiscretizationPtr space, TimeGrid grid);
  Simulation(Problem problem, DiscretizationPtr space, TimeGrid grid,
             std::shared_ptr<const SystemMatrices> sys);

  const Problem& problem() const { return problem_; }
  const DiscretizationPtr& space() const { return space_; }
  const TimeGrid& grid() const { return grid_; }
  const SystemMatrices& matrices() const { return op_.matrices(); }
  const std::shared_ptr<const SystemMatrices>& system() const { return op_.system(); }
  const StepOperator& op() const { return op_; }

  const SolutionState& state() const { return state_; }
  const SolutionState& previous() const { return previous_; }
  bool done() const { return state_.step >= grid_.steps; }
  double energy() const { return discrete_energy(matrices(), state_); }

  void advance();

private:
  Problem problem_;
  DiscretizationPtr space_;
  TimeGrid grid_;
  StepOperator op_;
  SolutionState state_;
  SolutionState previous_;
  SourceLoads loads_;
  bool has_sources_;
};

/// Advances `sim` to the final time, notifying every observer after each step.
SolutionState run(Simulation& sim, std::span<Observer* const> observers = {});

/// Runs N steps, notifying every observer after each one.
SolutionState run(const Problem& problem, const DiscretizationPtr& space, const TimeGrid& grid,
                  std::span<Observer* const> observers = {});

/// Records E^n at every step.
class EnergyRecorder : public Observer {
public:
  explicit EnergyRecorder(std::shared_ptr<const SystemMatrices> sys) : sys_(std::move(sys)) {}

  void start(const SolutionState& initial) override;
  void step(const SolutionState& prev, const SolutionState& next, double tau) override;

  const std::vector<double>& energies() const { return energies_; }
  const std::vector<double>& times() const { return times_; }
  /// max_n |E^n - E^0| / E^0 (absolute drift when E^0 = 0).
  double max_relative_drift() const;

private:
  std::shared_ptr<const SystemMatrices> sys_;
  std::vector<double> energies_;
  std::vector<double> times_;
};

}  // namespace mixedwave
