#pragma once

// Command execution behind the mu_ch tool. Each command writes its outputs to
// an output directory and finishes with a manifest.

#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mu_ch/certificates.hpp"
#include "mu_ch/characteristics.hpp"
#include "mu_ch/config.hpp"
#include "mu_ch/dynamics.hpp"
#include "mu_ch/errors.hpp"
#include "mu_ch/exact.hpp"
#include "mu_ch/io.hpp"
#include "mu_ch/viscous.hpp"

namespace mu_ch {

enum ExitCode : int { kExitOk = 0, kExitIo = 1, kExitConfig = 2, kExitInternal = 3 };

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"simulate", "certify", "viscous", "sweep", "peakon-verify",
                                             "characteristics"};
  return c;
}

struct Overrides {
  std::optional<double> epsilon;
  std::optional<std::int64_t> n;
  std::optional<double> t_end;
};

/// Applies command-line overrides to the raw config document so they go
/// through the same validation as the file.
inline void apply_overrides(Json& j, const Overrides& o) {
  if (!j.is_object()) return;
  if (o.n) j["n"] = *o.n;
  if (o.t_end) j["t_end"] = *o.t_end;
  if (o.epsilon) {
    if (!j.contains("viscous") || !j["viscous"].is_object()) j["viscous"] = Json::object();
    j["viscous"]["epsilon"] = *o.epsilon;
  }
}

struct DispatchOptions {
  std::filesystem::path out_dir;
  bool gnuplot = false;
  bool parallel = false;
  /// Wall-clock stamps in the manifest; off makes the manifest reproducible too.
  bool wall_times = true;
};

namespace detail {

inline std::string now_or_blank(bool on) {
  return on ? utc_timestamp(std::chrono::system_clock::now()) : std::string();
}

inline std::string certificate_digest(const PeriodicField& u0, double kappa) {
  return sha256_hex(to_json(certify_all(u0, kappa)).dump());
}

inline void finish(OutputSet& out, RunManifest& m, const DispatchOptions& opt) {
  if (opt.gnuplot) {
    std::vector<std::string> csv;
    for (const std::string& n : out.names()) {
      if (n.size() > 4 && n.substr(n.size() - 4) == ".csv") csv.push_back(n);
    }
    out.write("plot.gp", gnuplot_script(csv));
  }
  m.finished = now_or_blank(opt.wall_times);
  write_manifest(out, m);
}

inline RunManifest start_manifest(const std::string& command, const RunConfig& cfg, const DispatchOptions& opt) {
  RunManifest m;
  m.command = command;
  m.config = to_json(cfg);
  m.started = now_or_blank(opt.wall_times);
  return m;
}

}  // namespace detail

/// Runs one command. Errors propagate as exceptions; `run_command` maps them
/// to exit codes.
inline void execute(const std::string& command, const RunConfig& cfg, const DispatchOptions& opt,
                    std::ostream& log) {
  OutputSet out(opt.out_dir.empty() ? std::filesystem::path(cfg.output.directory) : opt.out_dir);
  RunManifest m = detail::start_manifest(command, cfg, opt);
  const PeriodicField u0 = initial_field(cfg);
  m.certificate_digest = detail::certificate_digest(u0, cfg.kappa);

  if (command == "simulate") {
    const Trajectory traj = run(u0, cfg.kappa, run_options(cfg));
    out.write("diagnostics.csv", series_csv(traj.diagnostics()));
    out.write_json("snapshots.json", snapshots_json(traj));
    m.termination = std::string(to_string(traj.termination));
    if (traj.event) m.break_event = to_json(*traj.event);
    m.extra = {{"steps", traj.steps}, {"t_final", traj.frames.back().state.t}};
    log << "simulate: " << m.termination << " at t = " << traj.frames.back().state.t << "\n";
    if (traj.event) log << "  blow-up estimate t* = " << traj.event->t_blowup_estimate() << "\n";
  } else if (command == "certify") {
    const CertificateReport r = certify_all(u0, cfg.kappa);
    const Json j = to_json(r);
    out.write_json("certificates.json", j);
    m.termination = "certified";
    log << j.dump(2) << "\n";
    if (r.internal_contradiction) {
      detail::finish(out, m, opt);
      throw InternalAssertion("certificates contradict each other: blow-up and global both applicable");
    }
  } else if (command == "viscous") {
    const ViscousConfig vc = viscous_config(cfg);
    const ViscousRun vr = run_viscous(u0, cfg.kappa, vc);
    out.write("diagnostics.csv", series_csv(vr.trajectory.diagnostics()));
    out.write("monitors.csv", monitors_csv(vr.monitors));
    const DissipationDefect dd = monitor_dissipation(vr.monitors);
    const OleinikReport ol = monitor_oleinik(vr.monitors, vc.t_lo);
    const Json summary = {{"epsilon", vc.epsilon},
                          {"L0", vr.monitors.L0},
                          {"dissipation_defect", dd.max_defect},
                          {"oleinik_worst_margin", ol.worst_margin},
                          {"oleinik_pass", ol.pass()},
                          {"integrability", vr.monitors.series.back().integrability},
                          {"alpha", vc.alpha}};
    out.write_json("viscous_summary.json", summary);
    m.termination = std::string(to_string(vr.trajectory.termination));
    m.extra = summary;
    log << "viscous: " << summary.dump() << "\n";
  } else if (command == "sweep") {
    if (cfg.viscous.epsilon_list.size() < 2) {
      throw ConfigError("$.viscous.epsilon_list: sweep needs at least two values");
    }
    std::vector<double> times = cfg.viscous.sweep_times;
    if (times.empty()) times.push_back(cfg.t_end);
    ViscousConfig vc = viscous_config(cfg, cfg.viscous.epsilon_list.front());
    const SweepResult r = epsilon_sweep(u0, cfg.kappa, vc, cfg.viscous.epsilon_list, times, opt.parallel);
    out.write_json("sweep.json", to_json(r));
    m.termination = "reached_end";
    log << "sweep: " << to_json(r)["table"].dump() << "\n";
  } else if (command == "peakon-verify") {
    const auto* pk = std::get_if<PeakonIc>(&cfg.ic);
    if (!pk) throw ConfigError("$.ic: peakon-verify needs a peakon initial condition");
    if (cfg.kappa != 0.0) throw ConfigError("$.kappa: the peakon is a traveling wave only for kappa = 0");
    RunOptions ro = run_options(cfg);
    ro.detector.enabled = false;
    const Trajectory traj = run(u0, cfg.kappa, ro);
    const std::vector<TranslateError> err = compare_to_translate(traj, pk->c);
    out.write("peakon.csv", translate_csv(err, traj));
    m.termination = std::string(to_string(traj.termination));
    m.extra = {{"final_l2_error", err.back().l2_error}, {"t_final", err.back().t}};
    log << "peakon-verify: final L2 error " << err.back().l2_error << " at t = " << err.back().t << "\n";
  } else if (command == "characteristics") {
    const Trajectory traj = run(u0, cfg.kappa, run_options(cfg));
    const std::vector<double> seeds = uniform_seeds(static_cast<std::size_t>(cfg.characteristics.seeds));
    const auto paths = evolve_characteristics(traj, seeds, cfg.characteristics.substeps);
    out.write("characteristics.csv", characteristics_csv(paths, cfg.kappa));
    double worst = 0.0, worst_riccati = 0.0, min_qx = std::numeric_limits<double>::infinity();
    for (const CharacteristicPath& p : paths) {
      worst = std::max(worst, characteristic_invariant_defect(p, cfg.kappa));
      for (const auto& s : p.samples) min_qx = std::min(min_qx, s.qx);
      for (const auto& r : slope_riccati_residual(traj, p)) worst_riccati = std::max(worst_riccati, r.residual);
    }
    m.termination = std::string(to_string(traj.termination));
    m.extra = {{"invariant_defect", worst}, {"min_qx", min_qx}, {"riccati_residual", worst_riccati}};
    log << "characteristics: " << m.extra.dump() << "\n";
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  detail::finish(out, m, opt);
}

/// Maps failures to exit codes: 2 configuration, 1 I/O, 3 internal assertion.
inline int run_command(const std::string& command, const std::filesystem::path& config_path,
                       const Overrides& overrides, const DispatchOptions& opt, std::ostream& log,
                       std::ostream& err) {
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("$: cannot open config file '" + config_path.string() + "'");
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw ConfigError(std::string("$: not valid JSON: ") + e.what());
    }
    apply_overrides(j, overrides);
    const std::filesystem::path base = config_path.has_parent_path() ? config_path.parent_path() : ".";
    const RunConfig cfg = parse_config(j, base);
    execute(command, cfg, opt, log);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const InternalAssertion& e) {
    err << "internal assertion failed: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace mu_ch
