// mu_ch command-line tool: simulate, certify, viscous, sweep, peakon-verify,
// characteristics.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "mu_ch/dispatch.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Periodic mu-Camassa-Holm numerical laboratory"};
  app.set_version_flag("--version", std::string(mu_ch::kVersion));
  app.require_subcommand(1, 1);

  std::string config;
  std::string out_dir;
  std::optional<double> epsilon;
  std::optional<std::int64_t> n;
  std::optional<double> t_end;
  bool gnuplot = false;
  bool parallel = false;
  bool no_wall_times = false;

  const std::map<std::string, std::string> about = {
      {"simulate", "integrate the inviscid equation and write diagnostics and snapshots"},
      {"certify", "evaluate every blow-up and global-existence criterion on the initial data"},
      {"viscous", "run the viscous approximation and its monitors"},
      {"sweep", "compare viscous solutions across a decreasing list of epsilon values"},
      {"peakon-verify", "compare a peakon run against the exact translating profile"},
      {"characteristics", "track particle paths and check the conserved momentum density"}};
  for (const std::string& name : mu_ch::commands()) {
    CLI::App* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (default: output.directory from the config)");
    sub->add_option("--epsilon", epsilon, "override viscous.epsilon");
    sub->add_option("--n", n, "override the grid size");
    sub->add_option("--t-end", t_end, "override t_end");
    sub->add_flag("--gnuplot", gnuplot, "also write a gnuplot script for the CSV outputs");
    sub->add_flag("--no-wall-times", no_wall_times, "omit wall-clock stamps from the manifest");
    if (name == "sweep") sub->add_flag("--parallel", parallel, "run the epsilon values concurrently");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mu_ch::kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  mu_ch::Overrides overrides{epsilon, n, t_end};
  mu_ch::DispatchOptions opt;
  opt.out_dir = out_dir;
  opt.gnuplot = gnuplot;
  opt.parallel = parallel;
  opt.wall_times = !no_wall_times;
  return mu_ch::run_command(command, config, overrides, opt, std::cout, std::cerr);
}
