#include "mixedwave/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace mixedwave {

namespace {

constexpr double kPi = std::numbers::pi;

ExactSolution smooth_exact() {
  ExactSolution e;
  e.p.eval = [](const Vec2& x, double t) {
    return std::sin(kPi * x.x()) * std::sin(kPi * x.y()) * std::cos(kPi * t);
  };
  e.u.eval = [](const Vec2& x, double t) {
    return Vec2(-std::cos(kPi * x.x()) * std::sin(kPi * x.y()) * std::sin(kPi * t),
                -std::sin(kPi * x.x()) * std::cos(kPi * x.y()) * std::sin(kPi * t));
  };
  e.dp_dt.eval = [](const Vec2& x, double t) {
    return -kPi * std::sin(kPi * x.x()) * std::sin(kPi * x.y()) * std::sin(kPi * t);
  };
  e.du_dt.eval = [](const Vec2& x, double t) {
    return Vec2(-kPi * std::cos(kPi * x.x()) * std::sin(kPi * x.y()) * std::cos(kPi * t),
                -kPi * std::sin(kPi * x.x()) * std::cos(kPi * x.y()) * std::cos(kPi * t));
  };
  e.grad_p.eval = [](const Vec2& x, double t) {
    return Vec2(kPi * std::cos(kPi * x.x()) * std::sin(kPi * x.y()) * std::cos(kPi * t),
                kPi * std::sin(kPi * x.x()) * std::cos(kPi * x.y()) * std::cos(kPi * t));
  };
  e.div_u.eval = [](const Vec2& x, double t) {
    return 2.0 * kPi * std::sin(kPi * x.x()) * std::sin(kPi * x.y()) * std::sin(kPi * t);
  };
  return e;
}

// P vanishes on every line x, y in {-1, 0, 1}, hence on the whole boundary.
double bubble(const Vec2& x) {
  return x.x() * x.y() * (1.0 - x.x() * x.x()) * (1.0 - x.y() * x.y());
}

Vec2 bubble_grad(const Vec2& x) {
  const double px = x.x();
  const double py = x.y();
  return Vec2(py * (1.0 - py * py) * (1.0 - 3.0 * px * px), px * (1.0 - px * px) * (1.0 - 3.0 * py * py));
}

Vec2 steady_velocity(const Vec2& x) { return Vec2(x.x() * x.x(), x.x() * x.y()); }

Vec2 drift_velocity(const Vec2& x) { return Vec2(1.0 - x.y(), x.x()); }

template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, count));
  std::vector<std::exception_ptr> errors(count);
  if (threads == 1) {
    for (int i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) {
      th.join();
    }
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

std::function<double(const Vec2&)> b_of(const TestCase& tc) {
  return tc.problem.coeffs.b ? tc.problem.coeffs.b : [](const Vec2&) { return 1.0; };
}

// Half-step reconstructions of one run, produced as the run advances.
class HalfStepTracker {
public:
  HalfStepTracker(const Simulation& sim, const std::function<double(const Vec2&)>& b)
      : sim_(sim), rec_(sim.space(), b) {
    g_prev_ = rec_.source_integrals(sim.problem().g, sim.state().time);
  }

  // Call after sim.advance().
  PostprocessedPressure update() {
    auto g_next = rec_.source_integrals(sim_.problem().g, sim_.state().time);
    PostprocessedPressure out =
        rec_.halfstep(sim_.previous(), sim_.state(), sim_.grid().tau(), g_prev_, g_next);
    g_prev_ = std::move(g_next);
    return out;
  }

private:
  const Simulation& sim_;
  PressureReconstructor rec_;
  std::vector<Vec2> g_prev_;
};

std::string format_number(const char* fmt, double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

ConvergenceTable make_table(const std::string& param_name, std::vector<double> params,
                            const std::vector<ExactErrors>& results) {
  ConvergenceTable table;
  table.param_name = param_name;
  table.error_labels = {"|||u|||", "|||p|||", "|||pt|||"};
  for (std::size_t i = 0; i < params.size(); ++i) {
    ConvergenceRow row;
    row.param = params[i];
    row.error = {results[i].err_u, results[i].err_p, results[i].err_pt};
    table.rows.push_back(row);
    table.energy_drift.push_back(results[i].energy_drift);
  }
  table.fill_rates();
  return table;
}

void check_levels(std::span<const int> levels) {
  if (levels.empty()) {
    throw std::invalid_argument("study: no mesh levels given");
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1 || (i > 0 && levels[i] <= levels[i - 1])) {
      throw std::invalid_argument("study: mesh levels must be positive and increasing");
    }
  }
}

void check_taus(std::span<const double> taus) {
  if (taus.empty()) {
    throw std::invalid_argument("study: no time steps given");
  }
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!(taus[i] > 0.0) || (i > 0 && taus[i] >= taus[i - 1])) {
      throw std::invalid_argument("study: time steps must be positive and decreasing");
    }
  }
}

}  // namespace

TestCase smooth_case() {
  TestCase tc;
  tc.name = "smooth";
  tc.a = 2.0;
  tc.b = 1.0;
  tc.exact = smooth_exact();
  tc.problem.coeffs = constant_coefficients(tc.a, tc.b);
  tc.problem.p0 = tc.exact->p;
  tc.problem.u0 = tc.exact->u;
  return tc;
}

TestCase nonsmooth_case() {
  TestCase tc;
  tc.name = "nonsmooth";
  tc.a = 2.0;
  tc.b = 1.0;
  tc.problem.coeffs = constant_coefficients(tc.a, tc.b);
  tc.problem.p0.eval = [](const Vec2& x, double) {
    if (x.x() > 0.0 || x.y() > 0.0) {
      return 0.0;
    }
    return std::sin(kPi * x.x()) * std::sin(kPi * x.y());
  };
  tc.problem.p0.smoothness = Smoothness::piecewise_smooth_axis_aligned;
  return tc;
}

TestCase manufactured_case() {
  TestCase tc;
  tc.name = "manufactured";
  tc.a = 2.0;
  tc.b = 1.0;
  const double a = tc.a;
  const double b = tc.b;
  ExactSolution e;
  e.p.eval = [](const Vec2& x, double t) { return (1.0 + t) * bubble(x); };
  e.u.eval = [](const Vec2& x, double t) -> Vec2 { return steady_velocity(x) + t * drift_velocity(x); };
  e.dp_dt.eval = [](const Vec2& x, double) { return bubble(x); };
  e.du_dt.eval = [](const Vec2& x, double) -> Vec2 { return drift_velocity(x); };
  e.grad_p.eval = [](const Vec2& x, double t) -> Vec2 { return (1.0 + t) * bubble_grad(x); };
  e.div_u.eval = [](const Vec2& x, double) { return 3.0 * x.x(); };
  tc.exact = e;
  tc.problem.coeffs = constant_coefficients(a, b);
  tc.problem.f.eval = [a](const Vec2& x, double) { return a * bubble(x) + 3.0 * x.x(); };
  tc.problem.g.eval = [b](const Vec2& x, double t) -> Vec2 {
    return b * drift_velocity(x) + (1.0 + t) * bubble_grad(x);
  };
  tc.problem.p0 = e.p;
  tc.problem.u0 = e.u;
  return tc;
}

TestCase static_case() {
  TestCase tc;
  tc.name = "static";
  tc.a = 2.0;
  tc.b = 1.0;
  ExactSolution e;
  e.p.eval = [](const Vec2& x, double) { return bubble(x); };
  e.u.eval = [](const Vec2& x, double) -> Vec2 { return steady_velocity(x); };
  e.dp_dt = constant_scalar(0.0);
  e.du_dt = constant_vector(Vec2::Zero());
  e.grad_p.eval = [](const Vec2& x, double) -> Vec2 { return bubble_grad(x); };
  e.div_u.eval = [](const Vec2& x, double) { return 3.0 * x.x(); };
  tc.exact = e;
  tc.problem.coeffs = constant_coefficients(tc.a, tc.b);
  tc.problem.f.eval = [](const Vec2& x, double) { return 3.0 * x.x(); };
  tc.problem.g.eval = [](const Vec2& x, double) -> Vec2 { return bubble_grad(x); };
  tc.problem.p0 = e.p;
  tc.problem.u0 = e.u;
  return tc;
}

TestCase make_case(std::string_view name) {
  if (name == "smooth") {
    return smooth_case();
  }
  if (name == "nonsmooth") {
    return nonsmooth_case();
  }
  if (name == "manufactured") {
    return manufactured_case();
  }
  if (name == "static") {
    return static_case();
  }
  throw std::invalid_argument("unknown test case '" + std::string(name) + "'");
}

double tracking_norm(std::span<const double> values) {
  if (values.empty()) {
    throw std::invalid_argument("tracking_norm: no recorded values");
  }
  return *std::max_element(values.begin(), values.end());
}

void TrackingNorm::record(double value) {
  max_ = count_ == 0 ? value : std::max(max_, value);
  ++count_;
}

double TrackingNorm::value() const {
  if (count_ == 0) {
    throw std::invalid_argument("tracking_norm: no recorded values");
  }
  return max_;
}

std::vector<double> eoc(std::span<const double> errors, std::span<const double> params) {
  if (errors.size() != params.size()) {
    throw std::invalid_argument("eoc: errors and parameters differ in length");
  }
  if (errors.size() < 2) {
    throw std::invalid_argument("eoc: need at least two entries");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!(params[i] > 0.0) || (i > 0 && !(params[i] < params[i - 1]))) {
      throw std::invalid_argument("eoc: parameters must be positive and strictly decreasing");
    }
  }
  std::vector<double> rates;
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (!(errors[i - 1] > 0.0) || !(errors[i] > 0.0)) {
      rates.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    rates.push_back(std::log(errors[i - 1] / errors[i]) / std::log(params[i - 1] / params[i]));
  }
  return rates;
}

void ConvergenceTable::fill_rates() {
  for (auto& row : rows) {
    row.rate = {};
  }
  if (rows.size() < 2) {
    return;
  }
  std::vector<double> params;
  for (const auto& row : rows) {
    params.push_back(row.param);
  }
  for (int c = 0; c < 3; ++c) {
    std::vector<double> errors;
    for (const auto& row : rows) {
      errors.push_back(row.error[c]);
    }
    const auto rates = eoc(errors, params);
    for (std::size_t i = 0; i < rates.size(); ++i) {
      rows[i + 1].rate[c] = rates[i];
    }
  }
}

void write_csv(std::ostream& os, const ConvergenceTable& table) {
  os << "param,err_u,eoc_u,err_p,eoc_p,err_pt,eoc_pt\n";
  for (const auto& row : table.rows) {
    os << format_number("%.10g", row.param);
    for (int c = 0; c < 3; ++c) {
      os << ',' << format_number("%.9e", row.error[c]) << ',';
      if (row.rate[c]) {
        os << format_number("%.6f", *row.rate[c]);
      }
    }
    os << '\n';
  }
}

void write_text(std::ostream& os, const ConvergenceTable& table) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-12s", table.param_name.c_str());
  os << buf;
  for (const auto& label : table.error_labels) {
    std::snprintf(buf, sizeof buf, " %12s %6s", label.c_str(), "eoc");
    os << buf;
  }
  os << '\n';
  for (const auto& row : table.rows) {
    std::snprintf(buf, sizeof buf, "%-12.6g", row.param);
    os << buf;
    for (int c = 0; c < 3; ++c) {
      const std::string rate = row.rate[c] ? format_number("%.2f", *row.rate[c]) : "";
      std::snprintf(buf, sizeof buf, " %12.6f %6s", row.error[c], rate.c_str());
      os << buf;
    }
    os << '\n';
  }
}

ExactErrors errors_against_exact(const TestCase& tc, int n, double tau, double final_time) {
  if (!tc.exact) {
    throw std::invalid_argument("errors_against_exact: case '" + tc.name + "' has no exact solution");
  }
  const ExactSolution& ex = *tc.exact;
  const auto space = make_discretization(build_lshape(n));
  Simulation sim(tc.problem, space, time_grid_from_step(final_time, tau));
  HalfStepTracker halfsteps(sim, b_of(tc));
  EnergyRecorder energy(sim.system());

  TrackingNorm eu;
  TrackingNorm ep;
  TrackingNorm ept;
  const auto record_full = [&](const SolutionState& s) {
    eu.record(l2_distance(project_p1(ex.u, s.time, space), to_p1(s.u)));
    ep.record(l2_distance(project_p0(ex.p, s.time, space), s.p));
  };
  energy.start(sim.state());
  record_full(sim.state());
  while (!sim.done()) {
    sim.advance();
    energy.step(sim.previous(), sim.state(), tau);
    record_full(sim.state());
    const PostprocessedPressure pt = halfsteps.update();
    ept.record(l2_distance(project_p1(ex.p, pt.time, space), pt.field));
  }
  return {eu.value(), ep.value(), ept.value(), energy.max_relative_drift(), sim.grid().steps};
}

ExactErrors errors_against_refined_mesh(const TestCase& tc, int n, double tau, double final_time) {
  auto coarse_mesh = std::make_shared<const Mesh>(build_lshape(n));
  const auto coarse = make_discretization(coarse_mesh);
  const auto fine = make_discretization(refine_uniform(coarse_mesh));
  const TimeGrid grid = time_grid_from_step(final_time, tau);
  Simulation sc(tc.problem, coarse, grid);
  Simulation sf(tc.problem, fine, grid);
  HalfStepTracker hc(sc, b_of(tc));
  HalfStepTracker hf(sf, b_of(tc));
  EnergyRecorder energy(sf.system());

  TrackingNorm eu;
  TrackingNorm ep;
  TrackingNorm ept;
  const auto record_full = [&] {
    eu.record(l2_distance(to_p1(sf.state().u), prolongate_p1(to_p1(sc.state().u), fine)));
    ep.record(l2_distance(restrict_p0(sf.state().p, coarse), sc.state().p));
  };
  energy.start(sf.state());
  record_full();
  while (!sc.done()) {
    sc.advance();
    sf.advance();
    energy.step(sf.previous(), sf.state(), tau);
    record_full();
    const PostprocessedPressure ptc = hc.update();
    const PostprocessedPressure ptf = hf.update();
    ept.record(l2_distance(restrict_p1(ptf.field, coarse), ptc.field));
  }
  return {eu.value(), ep.value(), ept.value(), energy.max_relative_drift(), grid.steps};
}

ExactErrors errors_against_half_step(const TestCase& tc, int n, double tau, double final_time) {
  const auto space = make_discretization(build_lshape(n));
  const TimeGrid coarse_grid = time_grid_from_step(final_time, tau);
  const TimeGrid fine_grid = make_time_grid(final_time, 2 * coarse_grid.steps);
  auto sys = std::make_shared<const SystemMatrices>(assemble_system(tc.problem.coeffs, *space));
  Simulation sc(tc.problem, space, coarse_grid, sys);
  Simulation sf(tc.problem, space, fine_grid, sys);
  HalfStepTracker hc(sc, b_of(tc));
  HalfStepTracker hf(sf, b_of(tc));
  EnergyRecorder energy(sys);

  TrackingNorm eu;
  TrackingNorm ep;
  TrackingNorm ept;
  const auto record_full = [&] {
    eu.record(l2_distance(to_p1(sf.state().u), to_p1(sc.state().u)));
    ep.record(l2_distance(sf.state().p, sc.state().p));
  };
  energy.start(sf.state());
  record_full();
  while (!sc.done()) {
    sf.advance();
    energy.step(sf.previous(), sf.state(), fine_grid.tau());
    const PostprocessedPressure first = hf.update();
    sf.advance();
    energy.step(sf.previous(), sf.state(), fine_grid.tau());
    const PostprocessedPressure second = hf.update();
    sc.advance();
    record_full();
    const PostprocessedPressure ptc = hc.update();
    FieldP1 mean = first.field;
    mean.coeffs = 0.5 * (first.field.coeffs + second.field.coeffs);
    ept.record(l2_distance(mean, ptc.field));
  }
  return {eu.value(), ep.value(), ept.value(), energy.max_relative_drift(), coarse_grid.steps};
}

ConvergenceTable study_smooth_h(const TestCase& tc, std::span<const int> levels, double tau,
                                double final_time, int threads) {
  check_levels(levels);
  std::vector<ExactErrors> results(levels.size());
  parallel_for(static_cast<int>(levels.size()), threads,
               [&](int i) { results[i] = errors_against_exact(tc, levels[i], tau, final_time); });
  std::vector<double> params;
  for (int n : levels) {
    params.push_back(1.0 / n);
  }
  return make_table("h", params, results);
}

ConvergenceTable study_smooth_tau(const TestCase& tc, int n, std::span<const double> taus,
                                  double final_time, int threads) {
  check_taus(taus);
  std::vector<ExactErrors> results(taus.size());
  parallel_for(static_cast<int>(taus.size()), threads,
               [&](int i) { results[i] = errors_against_exact(tc, n, taus[i], final_time); });
  return make_table("tau", {taus.begin(), taus.end()}, results);
}

ConvergenceTable study_nonsmooth_h(const TestCase& tc, std::span<const int> levels, double tau,
                                   double final_time, int threads) {
  check_levels(levels);
  std::vector<ExactErrors> results(levels.size());
  parallel_for(static_cast<int>(levels.size()), threads,
               [&](int i) { results[i] = errors_against_refined_mesh(tc, levels[i], tau, final_time); });
  std::vector<double> params;
  for (int n : levels) {
    params.push_back(1.0 / n);
  }
  return make_table("h", params, results);
}

ConvergenceTable study_nonsmooth_tau(const TestCase& tc, int n, std::span<const double> taus,
                                     double final_time, int threads) {
  check_taus(taus);
  std::vector<ExactErrors> results(taus.size());
  parallel_for(static_cast<int>(taus.size()), threads,
               [&](int i) { results[i] = errors_against_half_step(tc, n, taus[i], final_time); });
  return make_table("tau", {taus.begin(), taus.end()}, results);
}

}  // namespace mixedwave
