#include "mixedwave/commands.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>

#include "mixedwave/analysis.hpp"
#include "mixedwave/vtk.hpp"

namespace mixedwave {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  return os;
}

int guarded(std::ostream& log, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SolverError& e) {
    log << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    log << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

void prepare_output(const RunConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) {
    throw ConfigError("output", "cannot create '" + config.output_dir.string() + "': " + ec.message());
  }
}

}  // namespace

int cmd_run(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    if (config.study != StudyKind::single) {
      throw ConfigError("study", "'run' executes a single simulation; use 'convergence' for studies");
    }
    prepare_output(config);
    const TestCase tc = make_case(config.case_name);
    const auto space = make_discretization(build_lshape(config.levels.front()));
    Simulation sim(tc.problem, space, make_time_grid(config.final_time, config.steps));
    const auto b = tc.problem.coeffs.b ? tc.problem.coeffs.b : [](const Vec2&) { return 1.0; };
    PressureReconstructor rec(space, b);
    EnergyRecorder energy(sim.system());

    auto g_prev = rec.source_integrals(tc.problem.g, 0.0);
    std::optional<PostprocessedPressure> pt;
    energy.start(sim.state());
    while (!sim.done()) {
      sim.advance();
      energy.step(sim.previous(), sim.state(), sim.grid().tau());
      auto g_next = rec.source_integrals(tc.problem.g, sim.state().time);
      pt = rec.halfstep(sim.previous(), sim.state(), sim.grid().tau(), g_prev, g_next);
      g_prev = std::move(g_next);
    }

    const Mesh& m = *space->mesh;
    char line[256];
    std::snprintf(line, sizeof line, "case %s  n = %d  triangles = %d  dofs = %d + %d  steps = %d  tau = %.6g\n",
                  tc.name.c_str(), config.levels.front(), m.num_triangles(), space->dofs.num_bdm,
                  space->dofs.num_p0, sim.grid().steps, sim.grid().tau());
    log << line;
    std::snprintf(line, sizeof line, "energy E^0 = %.12e  E^N = %.12e  max relative drift = %.3e\n",
                  energy.energies().front(), energy.energies().back(), energy.max_relative_drift());
    log << line;
    if (tc.exact) {
      const double t = sim.state().time;
      std::snprintf(line, sizeof line, "final errors: |u - u_h| = %.6e  |p - p_h| = %.6e  |p - pt_h| = %.6e\n",
                    l2_error(sim.state().u, tc.exact->u, t), l2_error(sim.state().p, tc.exact->p, t),
                    l2_error(pt->field, tc.exact->p, pt->time));
      log << line;
    }

    if (config.export_fields) {
      auto os = open_output(config.output_dir / "solution.vtk");
      write_vtk_solution(os, sim.state().p, sim.state().u, pt->field);
    }
    if (config.export_energy) {
      auto os = open_output(config.output_dir / "energy.csv");
      os << "step,time,energy\n";
      for (std::size_t i = 0; i < energy.energies().size(); ++i) {
        std::snprintf(line, sizeof line, "%zu,%.10g,%.17g\n", i, energy.times()[i], energy.energies()[i]);
        os << line;
      }
    }
    if (config.export_matrices) {
      auto mp = open_output(config.output_dir / "mass_p.mtx");
      write_coordinate(mp, sim.matrices().mass_p);
      auto mu = open_output(config.output_dir / "mass_u.mtx");
      write_coordinate(mu, sim.matrices().mass_u);
      auto d = open_output(config.output_dir / "div.mtx");
      write_coordinate(d, sim.matrices().div);
    }
    return kExitOk;
  });
}

int cmd_convergence(const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    if (config.study == StudyKind::single) {
      throw ConfigError("study", "'convergence' needs study = h or study = tau");
    }
    prepare_output(config);
    const TestCase tc = make_case(config.case_name);
    const bool nested = !tc.exact;
    ConvergenceTable table;
    if (config.study == StudyKind::h) {
      table = nested ? study_nonsmooth_h(tc, config.levels, config.tau, config.final_time, config.threads)
                     : study_smooth_h(tc, config.levels, config.tau, config.final_time, config.threads);
    } else {
      const int n = config.levels.front();
      table = nested ? study_nonsmooth_tau(tc, n, config.taus, config.final_time, config.threads)
                     : study_smooth_tau(tc, n, config.taus, config.final_time, config.threads);
    }
    const std::string stem = config.case_name + "_" + to_string(config.study);
    {
      auto os = open_output(config.output_dir / (stem + ".csv"));
      write_csv(os, table);
    }
    {
      auto os = open_output(config.output_dir / (stem + ".txt"));
      write_text(os, table);
    }
    write_text(log, table);
    if (config.export_energy) {
      auto os = open_output(config.output_dir / (stem + "_energy.csv"));
      os << "param,max_relative_drift\n";
      char line[64];
      for (std::size_t i = 0; i < table.rows.size(); ++i) {
        std::snprintf(line, sizeof line, "%.10g,%.6e\n", table.rows[i].param, table.energy_drift[i]);
        os << line;
      }
    }
    return kExitOk;
  });
}

int cmd_mesh_info(int n, const std::string& vtk_path, std::ostream& log) {
  return guarded(log, [&] {
    const Mesh m = build_lshape(n);
    const MeshStats stats = mesh_stats(m);
    const DofMap dofs = build_dofmap(m);
    int boundary = 0;
    for (const Edge& e : m.edges()) {
      boundary += e.boundary ? 1 : 0;
    }
    const std::string problems = check_invariants(m);
    char line[256];
    std::snprintf(line, sizeof line,
                  "n = %d\nvertices = %d\nedges = %d (boundary %d)\ntriangles = %d\n"
                  "h = %.6g\ngamma = %.6g\nBDM1 dofs = %d\nP0 dofs = %d\ninvariants: %s\n",
                  n, m.num_vertices(), m.num_edges(), boundary, m.num_triangles(), stats.h, stats.gamma,
                  dofs.num_bdm, dofs.num_p0, problems.empty() ? "ok" : problems.c_str());
    log << line;
    if (!vtk_path.empty()) {
      auto os = open_output(vtk_path);
      write_vtk_mesh(os, m);
    }
    return problems.empty() ? kExitOk : kExitFailure;
  });
}

}  // namespace mixedwave
