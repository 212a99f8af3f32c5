#include "mixedwave/timestepper.hpp"

#include <cmath>
#include <sstream>

namespace mixedwave {

TimeGrid make_time_grid(double final_time, int steps) {
  if (steps < 1) {
    throw std::invalid_argument("time grid: step count must be at least 1");
  }
  if (!(final_time > 0.0)) {
    throw std::invalid_argument("time grid: final time must be positive");
  }
  return TimeGrid{final_time, steps};
}

TimeGrid time_grid_from_step(double final_time, double tau) {
  if (!(tau > 0.0)) {
    throw std::invalid_argument("time grid: tau must be positive");
  }
  const double ratio = final_time / tau;
  const double steps = std::round(ratio);
  if (steps < 1.0 || std::abs(steps * tau - final_time) > 1e-12) {
    std::ostringstream msg;
    msg << "time grid: T = " << final_time << " is not an integer multiple of tau = " << tau;
    throw std::invalid_argument(msg.str());
  }
  return make_time_grid(final_time, static_cast<int>(steps));
}

SystemMatrices assemble_system(const ProblemCoefficients& coeffs, const Discretization& space) {
  return {assemble_mass_p0(coeffs, space), assemble_mass_bdm1(coeffs, space), assemble_div(space)};
}

double discrete_energy(const SystemMatrices& sys, const SolutionState& s) {
  return s.p.coeffs.dot(sys.mass_p * s.p.coeffs) + s.u.coeffs.dot(sys.mass_u * s.u.coeffs);
}

StepOperator::StepOperator(std::shared_ptr<const SystemMatrices> sys, double tau)
    : sys_(std::move(sys)), tau_(tau) {
  if (!sys_) {
    throw std::invalid_argument("StepOperator: missing system matrices");
  }
  if (tau == 0.0 || !std::isfinite(tau)) {
    throw std::invalid_argument("StepOperator: tau must be nonzero and finite");
  }
  const SystemMatrices& s = *sys_;
  if (s.mass_p.rows() != s.div.rows() || s.mass_u.rows() != s.div.cols()) {
    throw std::invalid_argument("StepOperator: matrix dimensions are inconsistent");
  }
  inv_mass_p_ = s.mass_p.diagonal().cwiseInverse();
  if (!inv_mass_p_.allFinite()) {
    throw SolverError("StepOperator: singular pressure mass matrix");
  }
  const Eigen::SparseMatrix<double> dt = s.div.transpose();
  const Eigen::SparseMatrix<double> d = s.div;
  Eigen::SparseMatrix<double> schur = s.mass_u / tau;
  schur += (0.25 * tau) * (dt * inv_mass_p_.asDiagonal() * d);
  schur.makeCompressed();
  schur_.compute(schur);
  if (schur_.info() != Eigen::Success) {
    throw SolverError("StepOperator: factorization of the step matrix failed");
  }
}

void StepOperator::solve_once(const Eigen::VectorXd& rp, const Eigen::VectorXd& ru, Eigen::VectorXd& p,
                              Eigen::VectorXd& u) const {
  const SystemMatrices& s = *sys_;
  const Eigen::VectorXd scaled = inv_mass_p_.cwiseProduct(rp);
  const Eigen::VectorXd rhs = ru + (0.5 * tau_) * (s.div.transpose() * scaled);
  u = schur_.solve(rhs);
  if (schur_.info() != Eigen::Success) {
    throw SolverError("StepOperator: back substitution failed");
  }
  p = tau_ * inv_mass_p_.cwiseProduct(rp - 0.5 * (s.div * u));
}

double StepOperator::residual(const Eigen::VectorXd& rp, const Eigen::VectorXd& ru, const Eigen::VectorXd& p,
                              const Eigen::VectorXd& u, Eigen::VectorXd& res_p,
                              Eigen::VectorXd& res_u) const {
  const SystemMatrices& s = *sys_;
  res_p = rp - (s.mass_p * p / tau_ + 0.5 * (s.div * u));
  res_u = ru - (s.mass_u * u / tau_ - 0.5 * (s.div.transpose() * p));
  const double rhs_norm = std::sqrt(rp.squaredNorm() + ru.squaredNorm());
  const double res_norm = std::sqrt(res_p.squaredNorm() + res_u.squaredNorm());
  return rhs_norm > 0.0 ? res_norm / rhs_norm : res_norm;
}

void StepOperator::solve(const Eigen::VectorXd& rp, const Eigen::VectorXd& ru, Eigen::VectorXd& p,
                         Eigen::VectorXd& u) const {
  solve_once(rp, ru, p, u);
  Eigen::VectorXd res_p;
  Eigen::VectorXd res_u;
  last_residual_ = residual(rp, ru, p, u, res_p, res_u);
  if (last_residual_ > kResidualTolerance) {
    Eigen::VectorXd dp;
    Eigen::VectorXd du;
    solve_once(res_p, res_u, dp, du);
    p += dp;
    u += du;
    last_residual_ = residual(rp, ru, p, u, res_p, res_u);
  }
  if (!(last_residual_ <= kResidualTolerance)) {
    std::ostringstream msg;
    msg << "StepOperator: relative residual " << last_residual_ << " exceeds " << kResidualTolerance;
    throw SolverError(msg.str());
  }
}

SourceLoads assemble_sources(const Problem& problem, double t, const Discretization& space) {
  SourceLoads loads;
  if (problem.f) {
    loads.f = assemble_load(problem.f, t, space);
  }
  if (problem.g) {
    loads.g = assemble_load(problem.g, t, space);
  }
  return loads;
}

SolutionState init_state(const Problem& problem, const DiscretizationPtr& space) {
  SolutionState s;
  s.p = problem.p0 ? project_p0(problem.p0, 0.0, space) : FieldP0(space);
  s.u = problem.u0 ? interpolate_bdm1(problem.u0, 0.0, space) : FieldBDM1(space);
  return s;
}

SolutionState step(const StepOperator& op, const SolutionState& state, const SourceLoads& prev,
                   const SourceLoads& next) {
  const SystemMatrices& s = op.matrices();
  const double tau = op.tau();
  Eigen::VectorXd rp = s.mass_p * state.p.coeffs / tau - 0.5 * (s.div * state.u.coeffs);
  Eigen::VectorXd ru = s.mass_u * state.u.coeffs / tau + 0.5 * (s.div.transpose() * state.p.coeffs);
  if (prev.f.size() > 0) {
    rp += 0.5 * (prev.f + next.f);
  }
  if (prev.g.size() > 0) {
    ru += 0.5 * (prev.g + next.g);
  }
  SolutionState out;
  out.step = state.step + 1;
  out.time = state.time + tau;
  out.p = FieldP0(state.p.space);
  out.u = FieldBDM1(state.u.space);
  op.solve(rp, ru, out.p.coeffs, out.u.coeffs);
  return out;
}

Simulation::Simulation(Problem problem, DiscretizationPtr space, TimeGrid grid)
    : Simulation(problem, space, grid,
                 std::make_shared<const SystemMatrices>(assemble_system(problem.coeffs, *space))) {}

Simulation::Simulation(Problem problem, DiscretizationPtr space, TimeGrid grid,
                       std::shared_ptr<const SystemMatrices> sys)
    : problem_(std::move(problem)),
      space_(std::move(space)),
      grid_(grid),
      op_(std::move(sys), grid.tau()),
      has_sources_(static_cast<bool>(problem_.f) || static_cast<bool>(problem_.g)) {
  state_ = init_state(problem_, space_);
  previous_ = state_;
  if (has_sources_) {
    loads_ = assemble_sources(problem_, 0.0, *space_);
  }
}

void Simulation::advance() {
  if (done()) {
    throw std::logic_error("Simulation: already at the final time");
  }
  SourceLoads next;
  // Exact node times keep the source evaluations free of accumulated drift.
  const double t_next = grid_.time(state_.step + 1);
  if (has_sources_) {
    next = assemble_sources(problem_, t_next, *space_);
  }
  SolutionState s = step(op_, state_, loads_, next);
  s.time = t_next;
  previous_ = std::move(state_);
  state_ = std::move(s);
  loads_ = std::move(next);
}

SolutionState run(const Problem& problem, const DiscretizationPtr& space, const TimeGrid& grid,
                  std::span<Observer* const> observers) {
  Simulation sim(problem, space, grid);
  return run(sim, observers);
}

SolutionState run(Simulation& sim, std::span<Observer* const> observers) {
  for (Observer* o : observers) {
    o->start(sim.state());
  }
  while (!sim.done()) {
    sim.advance();
    for (Observer* o : observers) {
      o->step(sim.previous(), sim.state(), sim.grid().tau());
    }
  }
  return sim.state();
}

void EnergyRecorder::start(const SolutionState& initial) {
  energies_.assign(1, discrete_energy(*sys_, initial));
  times_.assign(1, initial.time);
}

void EnergyRecorder::step(const SolutionState& /*prev*/, const SolutionState& next, double /*tau*/) {
  energies_.push_back(discrete_energy(*sys_, next));
  times_.push_back(next.time);
}

double EnergyRecorder::max_relative_drift() const {
  if (energies_.empty()) {
    return 0.0;
  }
  const double e0 = energies_.front();
  double drift = 0.0;
  for (double e : energies_) {
    drift = std::max(drift, std::abs(e - e0));
  }
  return e0 > 0.0 ? drift / e0 : drift;
}

}  // namespace mixedwave
