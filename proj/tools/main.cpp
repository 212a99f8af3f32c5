#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mixedwave/commands.hpp"

namespace {

struct Overrides {
  std::string config;
  std::vector<std::string> set;
  mixedwave::Settings flags;
};

// Each flag becomes a key = value override so it goes through the same
// validation as the file.
void add_setting_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "settings file (key = value lines)");
  cmd->add_option("--set", o.set, "extra key=value override (repeatable)");
  const auto flag = [&](const char* name, const char* key, const char* help) {
    cmd->add_option_function<std::string>(
        name, [&o, key](const std::string& v) { o.flags.emplace_back(key, v); }, help);
  };
  flag("--case", "case", "smooth | nonsmooth | manufactured | static");
  flag("--study", "study", "single | h | tau");
  flag("--levels", "levels", "mesh levels n, space separated");
  flag("--tau", "tau", "time step");
  flag("--N", "N", "number of time steps");
  flag("--taus", "taus", "time steps of a tau-study, space separated");
  flag("--T", "T", "final time");
  flag("-o,--output", "output", "output directory");
  flag("--fields", "fields", "write VTK fields (true/false)");
  flag("--energy", "energy", "write the energy log (true/false)");
  flag("--matrices", "matrices", "write system matrices (true/false)");
  flag("-j,--threads", "threads", "threads for independent study rows");
  cmd->add_flag_callback("--deep", [&o] { o.flags.emplace_back("deep", "true"); }, "allow levels above 32");
}

mixedwave::RunConfig load(const Overrides& o) {
  mixedwave::Settings overrides;
  for (const auto& s : o.set) {
    auto parsed = mixedwave::read_settings(s);
    overrides.insert(overrides.end(), parsed.begin(), parsed.end());
  }
  overrides.insert(overrides.end(), o.flags.begin(), o.flags.end());
  if (o.config.empty()) {
    return mixedwave::parse_config({}, overrides);
  }
  return mixedwave::parse_config_file(o.config, overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed BDM1-P0 finite elements for the acoustic wave system on the L-shape"};
  app.require_subcommand(1);

  Overrides run_opts;
  auto* run = app.add_subcommand("run", "single simulation with field export");
  add_setting_flags(run, run_opts);

  Overrides conv_opts;
  auto* conv = app.add_subcommand("convergence", "h- or tau-convergence study");
  add_setting_flags(conv, conv_opts);

  int mesh_n = 4;
  std::string mesh_vtk;
  auto* info = app.add_subcommand("mesh-info", "mesh counts and quality");
  info->add_option("-n,--level", mesh_n, "cells per unit length")->check(CLI::PositiveNumber);
  info->add_option("--vtk", mesh_vtk, "write the mesh to this VTK file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mixedwave::kExitConfig;
  }

  try {
    if (*run) {
      return mixedwave::cmd_run(load(run_opts), std::cout);
    }
    if (*conv) {
      return mixedwave::cmd_convergence(load(conv_opts), std::cout);
    }
  } catch (const mixedwave::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return mixedwave::kExitConfig;
  }
  return mixedwave::cmd_mesh_info(mesh_n, mesh_vtk, std::cout);
}
