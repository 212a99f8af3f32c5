// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mixedwave/analysis.hpp"
#include "mixedwave/commands.hpp"
#include "support.hpp"

using namespace mixedwave;

namespace {

// Tolerances.
constexpr double kSmoothRate = 2.0;
constexpr double kSmoothHBand = 0.15;
constexpr double kSmoothTauBand = 0.3;
constexpr double kMagnitudeFactor = 2.0;
constexpr double kRoughRate = 1.0;
constexpr double kRoughBand = 0.3;
// A tau-study pair counts as unsaturated when its finer error is at least
// this multiple of the spatial error at the same h.
constexpr double kSaturationFactor = 4.0;
constexpr double kEnergyDrift = 1e-9;
constexpr double kCommuting = 1e-9;
constexpr double kMeanPreservation = 1e-13;
constexpr double kDenseStep = 1e-10;
constexpr double kDuality = 1e-12;
constexpr double kLocalSolve = 1e-11;

// Reference rows h = 2^-2 .. 2^-5 of the smooth h-study: u, p, p~.
constexpr double kTable1[4][3] = {
    {0.492260, 0.444531, 0.492531},
    {0.142499, 0.136521, 0.144388},
    {0.037066, 0.036047, 0.037627},
    {0.009359, 0.009128, 0.009499},
};

const char* kColumns[3] = {"u", "p", "pt"};

int failures = 0;

void report(int id, bool pass, const std::string& title, const std::string& detail) {
  std::printf("[%s] C%d %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += pass ? 0 : 1;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string table_text(const ConvergenceTable& t) {
  std::ostringstream os;
  write_text(os, t);
  return os.str();
}

std::string table_csv(const ConvergenceTable& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

double max_drift(const ConvergenceTable& t) {
  double d = 0.0;
  for (double x : t.energy_drift) {
    d = std::max(d, x);
  }
  return d;
}

bool finest_pair_within(const ConvergenceTable& t, double rate, double band, std::string& detail) {
  bool ok = true;
  const auto& last = t.rows.back();
  for (int c = 0; c < 3; ++c) {
    const double r = last.rate[c].value_or(std::nan(""));
    ok = ok && std::abs(r - rate) <= band;
    detail += std::string(c ? ", " : "") + "eoc_" + kColumns[c] + " = " + fmt("%.3f", r);
  }
  return ok;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const TestCase smooth = smooth_case();
  const TestCase rough = nonsmooth_case();
  std::vector<double> drifts;

  // C1
  const std::vector<int> levels{4, 8, 16, 32};
  const ConvergenceTable t1 = study_smooth_h(smooth, levels, 1e-3);
  std::cout << "smooth h-study, tau = 1/1000\n" << table_text(t1);
  drifts.push_back(max_drift(t1));
  {
    std::string detail;
    const bool rates = finest_pair_within(t1, kSmoothRate, kSmoothHBand, detail);
    double worst = 1.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      for (int c = 0; c < 3; ++c) {
        const double ratio = kTable1[i][c] / t1.rows[i].error[c];
        worst = std::max({worst, ratio, 1.0 / ratio});
      }
    }
    const bool magnitude = worst <= kMagnitudeFactor;
    detail += "; worst magnitude ratio to the reference table = " + fmt("%.2f", worst) + " (limit " +
              fmt("%.1f", kMagnitudeFactor) + ")";
    report(1, rates && magnitude, "smooth h-study", detail);
  }

  // C2
  const std::vector<double> taus{0.25, 0.125, 0.0625, 0.03125};
  const ConvergenceTable t2 = study_smooth_tau(smooth, 32, taus);
  std::cout << "smooth tau-study, h = 1/32\n" << table_text(t2);
  drifts.push_back(max_drift(t2));
  {
    bool ok = true;
    std::string detail;
    for (int c = 0; c < 3; ++c) {
      const double floor = t1.rows.back().error[c];
      int counted = 0;
      std::string rates;
      for (std::size_t i = 1; i < t2.rows.size(); ++i) {
        if (t2.rows[i].error[c] < kSaturationFactor * floor) {
          break;
        }
        const double r = *t2.rows[i].rate[c];
        ok = ok && std::abs(r - kSmoothRate) <= kSmoothTauBand;
        rates += (counted ? " " : "") + fmt("%.3f", r);
        ++counted;
      }
      ok = ok && counted > 0;
      detail += std::string(c ? "; " : "") + "eoc_" + kColumns[c] + " [" + rates + "]";
    }
    detail += " over pairs with error >= " + fmt("%.0f", kSaturationFactor) + " x spatial error";
    report(2, ok, "smooth tau-study before saturation", detail);
  }

  // C3
  {
    const std::vector<int> rough_levels{4, 8, 16};
    const ConvergenceTable t3 = study_nonsmooth_h(rough, rough_levels, 1e-3);
    std::cout << "nonsmooth h-study against h/2, tau = 1/1000\n" << table_text(t3);
    const std::vector<double> rough_taus{0.25, 0.125, 0.0625, 0.03125};
    const ConvergenceTable t4 = study_nonsmooth_tau(rough, 32, rough_taus);
    std::cout << "nonsmooth tau-study against tau/2, h = 1/32\n" << table_text(t4);
    drifts.push_back(max_drift(t3));
    drifts.push_back(max_drift(t4));
    std::string d3;
    std::string d4;
    const bool ok3 = finest_pair_within(t3, kRoughRate, kRoughBand, d3);
    const bool ok4 = finest_pair_within(t4, kRoughRate, kRoughBand, d4);
    report(3, ok3 && ok4, "nonsmooth studies", "h: " + d3 + "; tau: " + d4);
  }

  // C4
  {
    double worst = 0.0;
    for (double d : drifts) {
      worst = std::max(worst, d);
    }
    report(4, worst <= kEnergyDrift, "energy conservation",
           "max relative drift over all study runs = " + fmt("%.2e", worst));
  }

  // C5
  {
    constexpr double pi = std::numbers::pi;
    VectorFunction u;
    u.eval = [](const Vec2& x, double) {
      return Vec2(std::cos(pi * x.x()) * std::sin(pi * x.y()), std::sin(pi * x.x()) * std::exp(x.y()));
    };
    const auto div = [](const Vec2& x) {
      return -pi * std::sin(pi * x.x()) * std::sin(pi * x.y()) + std::sin(pi * x.x()) * std::exp(x.y());
    };
    double worst = 0.0;
    for (int n : {1, 2, 4, 8}) {
      const auto space = make_discretization(build_lshape(n));
      const Mesh& m = *space->mesh;
      const FieldBDM1 ru = interpolate_bdm1(u, 0.0, space);
      double sum = 0.0;
      for (int t = 0; t < m.num_triangles(); ++t) {
        const double mean = oracle::integrate(oracle::triangle(m, t), div, 12) / m.area(t);
        sum += m.area(t) * std::pow(ru.divergence(t) - mean, 2);
      }
      worst = std::max(worst, std::sqrt(sum));
    }
    report(5, worst <= kCommuting, "commuting diagram", "max ||div rho_h u - pi_h div u|| = " + fmt("%.2e", worst));
  }

  // C6
  {
    double worst = 0.0;
    for (const TestCase* tc : {&smooth, &rough}) {
      const auto space = make_discretization(build_lshape(8));
      Simulation sim(tc->problem, space, make_time_grid(1.0, 64));
      PressureReconstructor rec(space, tc->problem.coeffs.b);
      const Mesh& m = *space->mesh;
      while (!sim.done()) {
        sim.advance();
        const PostprocessedPressure pt = rec.halfstep(sim.previous(), sim.state(), sim.grid().tau(), {}, {});
        for (int t = 0; t < m.num_triangles(); ++t) {
          const double target = 0.5 * (sim.previous().p.coeffs[t] + sim.state().p.coeffs[t]);
          const double mean =
              oracle::integrate(oracle::triangle(m, t), [&](const Vec2& x) { return pt.field.value(t, x).x(); }, 2) /
              m.area(t);
          worst = std::max(worst, std::abs(mean - target));
        }
      }
    }
    report(6, worst <= kMeanPreservation, "post-processing mean preservation",
           "max |mean(pt) - p^{n-1/2}| = " + fmt("%.2e", worst));
  }

  // C7
  {
    std::mt19937 rng(oracle::kSeed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const auto rand_vec = [&](int n) {
      Eigen::VectorXd v(n);
      for (int i = 0; i < n; ++i) {
        v[i] = uni(rng);
      }
      return v;
    };

    const auto space = make_discretization(build_lshape(1));
    const auto sys = std::make_shared<const SystemMatrices>(assemble_system(constant_coefficients(2.0, 1.0), *space));
    const double tau = 0.1;
    const StepOperator op(sys, tau);
    const int np = space->dofs.num_p0;
    const int nu = space->dofs.num_bdm;
    SolutionState s0;
    s0.p = FieldP0(space, rand_vec(np));
    s0.u = FieldBDM1(space, rand_vec(nu));
    const SolutionState s1 = step(op, s0, {}, {});
    const Eigen::MatrixXd Ma(sys->mass_p);
    const Eigen::MatrixXd Mb(sys->mass_u);
    const Eigen::MatrixXd D(sys->div);
    Eigen::MatrixXd lhs(np + nu, np + nu);
    Eigen::MatrixXd rhs(np + nu, np + nu);
    lhs << Ma / tau, 0.5 * D, -0.5 * D.transpose(), Mb / tau;
    rhs << Ma / tau, -0.5 * D, 0.5 * D.transpose(), Mb / tau;
    Eigen::VectorXd x0(np + nu);
    x0 << s0.p.coeffs, s0.u.coeffs;
    const Eigen::VectorXd x1 = lhs.fullPivLu().solve(rhs * x0);
    Eigen::VectorXd got(np + nu);
    got << s1.p.coeffs, s1.u.coeffs;
    const double step_err = (got - x1).cwiseAbs().maxCoeff();

    const oracle::PhysicalBDM1 ref_edges({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)});
    Eigen::Matrix<double, 6, 6> dual;
    for (int j = 0; j < 6; ++j) {
      const auto phi = [j](const Vec2& x) { return bdm1_eval(x).values[j]; };
      for (int i = 0; i < 3; ++i) {
        const auto [p, q, n] = ref_edges.edge(i);
        const auto mom = oracle::edge_moments(phi, p, q, n);
        dual(2 * i, j) = mom[0];
        dual(2 * i + 1, j) = mom[1];
      }
    }
    const double dual_err = (dual - Eigen::Matrix<double, 6, 6>::Identity()).cwiseAbs().maxCoeff();

    const auto space2 = make_discretization(build_lshape(2));
    const Mesh& m2 = *space2->mesh;
    const FieldBDM1 dtu(space2, rand_vec(space2->dofs.num_bdm));
    const FieldP0 pm(space2, rand_vec(space2->dofs.num_p0));
    const auto b = [](const Vec2& x) { return 1.0 + 0.25 * x.x() * x.x(); };
    VectorFunction g;
    g.eval = [](const Vec2& x, double) { return Vec2(x.x() * x.y(), 1.0 - x.y() * x.y()); };
    const PostprocessedPressure pt = postprocess_generic(dtu, pm, g, 0.0, b);
    double local_err = 0.0;
    for (int t = 0; t < m2.num_triangles(); ++t) {
      const auto r = [&](const Vec2& x) { return Vec2(g(x, 0.0) - b(x) * dtu.value(t, x)); };
      const auto ref = oracle::kkt_postprocess(oracle::triangle(m2, t), r, pm.coeffs[t]);
      for (int i = 0; i < 3; ++i) {
        local_err = std::max(local_err, std::abs(pt.field.value(t, m2.vertex(t, i)).x() - ref[i]));
      }
    }
    const bool ok = step_err <= kDenseStep && dual_err <= kDuality && local_err <= kLocalSolve;
    report(7, ok, "oracle equivalence",
           "dense step " + fmt("%.2e", step_err) + ", duality " + fmt("%.2e", dual_err) + ", local solve " +
               fmt("%.2e", local_err));
  }

  // C8
  {
    const auto dir = std::filesystem::temp_directory_path() / "mixedwave_acceptance";
    std::filesystem::remove_all(dir);
    const RunConfig cfg = parse_config(
        read_settings("case = nonsmooth, study = tau, levels = 8, taus = 0.25 0.125 0.0625"),
        {{"output", dir.string()}});
    std::ostringstream log;
    bool ok = cmd_convergence(cfg, log) == kExitOk;
    const auto read = [&] {
      std::ifstream is(dir / "nonsmooth_tau.csv");
      std::stringstream ss;
      ss << is.rdbuf();
      return ss.str();
    };
    const std::string first = read();
    ok = ok && cmd_convergence(cfg, log) == kExitOk && read() == first && !first.empty();
    const std::string csv1 = table_csv(t2);
    const std::string csv2 = table_csv(study_smooth_tau(smooth, 32, taus, 1.0, 2));
    ok = ok && csv1 == csv2;
    std::filesystem::remove_all(dir);
    report(8, ok, "determinism", "repeated CLI runs and a 2-thread rerun of the tau-study give identical CSV bytes");
  }

  std::printf("%d of 8 criteria failed, %.1f s\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
