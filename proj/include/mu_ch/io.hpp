#pragma once

// Output files: CSV time series, JSON snapshots and reports, and the run
// manifest with SHA-256 checksums of everything written. Every file is
// written to a temporary name and renamed into place.

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mu_ch/certificates.hpp"
#include "mu_ch/characteristics.hpp"
#include "mu_ch/config.hpp"
#include "mu_ch/dynamics.hpp"
#include "mu_ch/errors.hpp"
#include "mu_ch/exact.hpp"
#include "mu_ch/viscous.hpp"

#ifndef MU_CH_VERSION
#define MU_CH_VERSION "0.0.0"
#endif

namespace mu_ch {

inline constexpr std::string_view kVersion = MU_CH_VERSION;

// ---------------------------------------------------------------------------
// Formatting

/// %.17g, which round-trips every double.
inline std::string fmt17(double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

inline std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
    throw IoError("sha256 digest failed");
  }
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(md[i]);
  return os.str();
}

inline std::string utc_timestamp(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

/// Atomic write: temp file in the same directory, then rename.
inline void write_file_atomic(const std::filesystem::path& file, std::string_view content) {
  std::error_code ec;
  if (file.has_parent_path()) {
    std::filesystem::create_directories(file.parent_path(), ec);
    if (ec) throw IoError(file.parent_path().string() + ": cannot create directory: " + ec.message());
  }
  std::filesystem::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(tmp.string() + ": cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError(tmp.string() + ": write failed");
  }
  std::filesystem::rename(tmp, file, ec);
  if (ec) throw IoError(file.string() + ": rename failed: " + ec.message());
}

// ---------------------------------------------------------------------------
// Content builders

inline constexpr std::string_view kSeriesHeader = "t,H0,H1,H2,mu1,m1,m2,sup_u";

inline std::string series_csv(const std::vector<Diagnostics>& rows) {
  std::string s(kSeriesHeader);
  s += '\n';
  for (const Diagnostics& d : rows) {
    s += fmt17(d.t) + ',' + fmt17(d.H0) + ',' + fmt17(d.H1) + ',' + fmt17(d.H2) + ',' + fmt17(d.mu1) + ',' +
         fmt17(d.m1) + ',' + fmt17(d.m2) + ',' + fmt17(d.sup_u) + '\n';
  }
  return s;
}

inline std::string field_csv(const PeriodicField& f) {
  std::string s = "x,value\n";
  for (std::size_t j = 0; j < f.size(); ++j) s += fmt17(f.grid().node(j)) + ',' + fmt17(f[j]) + '\n';
  return s;
}

inline Json field_json(double t, const PeriodicField& f) {
  return {{"t", t}, {"n", f.grid().n()}, {"values", std::vector<double>(f.values().begin(), f.values().end())}};
}

inline Json snapshots_json(const Trajectory& traj) {
  Json a = Json::array();
  for (const Frame& f : traj.frames) a.push_back(field_json(f.state.t, f.state.u));
  return a;
}

inline Json to_json(const CertificateInputs& in) {
  return {{"mu0", in.mu0},          {"mu1", in.mu1},           {"kappa", in.kappa},
          {"H2", in.H2},            {"inf_slope", in.inf_slope}, {"m1", in.m1},
          {"m2", in.m2},            {"d3_norm", in.d3_norm},   {"slope_cube_integral", in.slope_cube},
          {"min_m0", in.min_m0},    {"max_m0", in.max_m0}};
}

inline Json to_json(const Certificate& c) {
  Json j = {{"id", std::string(to_string(c.id))},
            {"applicable", c.applicable},
            {"inputs", to_json(c.inputs)},
            {"margin", c.margin},
            {"detail", c.detail},
            {"citation", std::string(statement(c.id))}};
  j["bound"] = c.bound ? Json(*c.bound) : Json(nullptr);
  return j;
}

inline Json to_json(const CertificateReport& r) {
  Json list = Json::array();
  for (const Certificate& c : r.certificates) list.push_back(to_json(c));
  return {{"inputs", to_json(r.inputs)}, {"certificates", list}, {"internal_contradiction", r.internal_contradiction}};
}

inline Json to_json(const BreakEvent& e) {
  return {{"t_detect", e.t_detect},
          {"x", e.x},
          {"slope", e.slope},
          {"trigger", std::string(to_string(e.trigger))},
          {"t_blowup_estimate", e.t_blowup_estimate()}};
}

inline std::string monitors_csv(const ViscousMonitors& m) {
  std::string s = "t,slope_energy,dissipation,oleinik_margin,integrability\n";
  for (const ViscousSample& v : m.series) {
    s += fmt17(v.t) + ',' + fmt17(v.slope_energy) + ',' + fmt17(v.dissipation) + ',' +
         (std::isnan(v.oleinik_margin) ? std::string() : fmt17(v.oleinik_margin)) + ',' + fmt17(v.integrability) +
         '\n';
  }
  return s;
}

inline std::string characteristics_csv(const std::vector<CharacteristicPath>& paths, double kappa) {
  std::string s = "seed,x0,t,q,qx,u,ux,m,invariant\n";
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (const CharacteristicSample& c : paths[i].samples) {
      s += std::to_string(i) + ',' + fmt17(paths[i].x0) + ',' + fmt17(c.t) + ',' + fmt17(c.q) + ',' + fmt17(c.qx) +
           ',' + fmt17(c.u) + ',' + fmt17(c.ux) + ',' + fmt17(c.m) + ',' + fmt17((c.m + kappa) * c.qx * c.qx) + '\n';
    }
  }
  return s;
}

inline std::string translate_csv(const std::vector<TranslateError>& rows, const Trajectory& traj) {
  std::string s = "t,l2_error,mean\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s += fmt17(rows[i].t) + ',' + fmt17(rows[i].l2_error) + ',' + fmt17(traj.frames[i].diag.mu0) + '\n';
  }
  return s;
}

inline Json to_json(const SweepResult& r) {
  Json rows = Json::array();
  for (const SweepRow& row : r.table) {
    rows.push_back({{"t", row.t}, {"eps_coarse", row.eps_coarse}, {"eps_fine", row.eps_fine},
                    {"l2_difference", row.l2_difference}});
  }
  return {{"epsilons", r.epsilons}, {"times", r.times}, {"table", rows}, {"mean_spread", r.mean_spread}};
}

inline std::string gnuplot_script(const std::vector<std::string>& csv_files) {
  std::string s = "set datafile separator ','\nset key autotitle columnhead\nset grid\n";
  for (const std::string& f : csv_files) {
    if (f == "diagnostics.csv") {
      s += "set terminal pngcairo size 900,600\nset output 'diagnostics_slopes.png'\nset xlabel 't'\n"
           "plot 'diagnostics.csv' using 1:6 with lines, '' using 1:7 with lines\n"
           "set output 'diagnostics_conserved.png'\n"
           "plot 'diagnostics.csv' using 1:2 with lines, '' using 1:3 with lines, '' using 1:4 with lines\n";
    } else if (f == "monitors.csv") {
      s += "set terminal pngcairo size 900,600\nset output 'monitors.png'\nset xlabel 't'\n"
           "plot 'monitors.csv' using 1:2 with lines, '' using 1:4 with lines\n";
    } else if (f == "peakon.csv") {
      s += "set terminal pngcairo size 900,600\nset output 'peakon.png'\nset xlabel 't'\n"
           "plot 'peakon.csv' using 1:2 with lines\n";
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Output directory with checksum inventory and manifest

class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& directory() const { return dir_; }

  void write(const std::string& name, std::string_view content) {
    write_file_atomic(dir_ / name, content);
    inventory_.push_back({{"file", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
    names_.push_back(name);
  }
  void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

  const std::vector<std::string>& names() const { return names_; }
  const Json& inventory() const { return inventory_; }

 private:
  std::filesystem::path dir_;
  Json inventory_ = Json::array();
  std::vector<std::string> names_;
};

struct RunManifest {
  std::string command;
  Json config;
  std::string started;
  std::string finished;
  std::string termination;
  Json break_event;
  std::string certificate_digest;
  Json extra = Json::object();
};

/// Writes manifest.json last so its inventory covers every other output.
inline void write_manifest(OutputSet& out, const RunManifest& m) {
  Json j = {{"command", m.command},
            {"version", std::string(kVersion)},
            {"config", m.config},
            {"wall_time", {{"start", m.started}, {"end", m.finished}}},
            {"termination", m.termination},
            {"break_event", m.break_event},
            {"certificate_digest", m.certificate_digest},
            {"mollifier", "Z exp(-1/(1-x^2)) on (-1,1), scaled by the mollifier scale"},
            {"outputs", out.inventory()}};
  if (!m.extra.empty()) j["summary"] = m.extra;
  write_file_atomic(out.directory() / "manifest.json", j.dump(2) + "\n");
}

}  // namespace mu_ch
