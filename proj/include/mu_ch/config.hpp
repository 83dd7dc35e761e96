#pragma once

// Run configuration: JSON parsing with strict validation, serialization back
// to JSON, and construction of the initial field and solver options.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mu_ch/detector.hpp"
#include "mu_ch/dynamics.hpp"
#include "mu_ch/errors.hpp"
#include "mu_ch/exact.hpp"
#include "mu_ch/field.hpp"
#include "mu_ch/viscous.hpp"

namespace mu_ch {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Initial condition variants

/// a sin(2 pi k x) + b
struct SineIc {
  double a = 1.0;
  double b = 0.0;
  int k = 1;
  friend bool operator==(const SineIc&, const SineIc&) = default;
};

/// Re[(re + i im) e^{2 pi i k x}] summed over modes.
struct FourierMode {
  int k = 0;
  double re = 0.0;
  double im = 0.0;
  friend bool operator==(const FourierMode&, const FourierMode&) = default;
};
struct FourierIc {
  std::vector<FourierMode> modes;
  friend bool operator==(const FourierIc&, const FourierIc&) = default;
};

struct PeakonIc {
  double c = 1.0;
  friend bool operator==(const PeakonIc&, const PeakonIc&) = default;
};

struct MultipeakonIc {
  std::vector<double> p;
  std::vector<double> q;
  friend bool operator==(const MultipeakonIc&, const MultipeakonIc&) = default;
};

/// Grid samples given inline or read from a JSON file (an array, or an object
/// with a "values" array). `path` is kept as written for serialization.
struct SamplesIc {
  std::vector<double> values;
  std::string path;
  friend bool operator==(const SamplesIc&, const SamplesIc&) = default;
};

using InitialCondition = std::variant<SineIc, FourierIc, PeakonIc, MultipeakonIc, SamplesIc>;

// ---------------------------------------------------------------------------

struct FilterConfig {
  bool enabled = false;
  double strength = 1.0;
  friend bool operator==(const FilterConfig&, const FilterConfig&) = default;
};

struct OutputConfig {
  double cadence = 0.01;
  std::string directory = "out";
  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct ViscousSection {
  std::optional<double> epsilon;
  double alpha = 0.5;
  std::optional<double> mollifier_scale;
  double t_lo = 0.1;
  std::vector<double> epsilon_list;
  std::vector<double> sweep_times;
  friend bool operator==(const ViscousSection&, const ViscousSection&) = default;
};

struct DetectorSection {
  bool enabled = true;
  double S_threshold = 1e3;
  double dt_min = 1e-9;
  double tail_tolerance = 1e-8;
  friend bool operator==(const DetectorSection&, const DetectorSection&) = default;
};

struct CharacteristicsSection {
  int seeds = 16;
  int substeps = 2;
  friend bool operator==(const CharacteristicsSection&, const CharacteristicsSection&) = default;
};

struct RunConfig {
  std::size_t n = 256;
  double t_end = 1.0;
  double cfl = 0.3;
  double kappa = 0.0;
  InitialCondition ic = SineIc{};
  FilterConfig filter;
  OutputConfig output;
  ViscousSection viscous;
  DetectorSection detector;
  CharacteristicsSection characteristics;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// ---------------------------------------------------------------------------
// Parsing helpers

namespace detail {

class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  /// Rejects any key not in `allowed`.
  void only(std::initializer_list<const char*> allowed) const {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!ok.count(it.key())) throw ConfigError(path_ + "." + it.key() + ": unknown key");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  const Json& at(const char* key) const { return j_.at(key); }
  std::string sub(const char* key) const { return path_ + "." + key; }

  double number(const char* key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      fail(std::string("missing required key '") + key + "'", key);
    }
    return as_number(j_.at(key), sub(key));
  }

  std::int64_t integer(const char* key, std::optional<std::int64_t> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      fail(std::string("missing required key '") + key + "'", key);
    }
    return as_integer(j_.at(key), sub(key));
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(sub(key) + ": expected a boolean");
    return v.get<bool>();
  }

  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(sub(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const char* key) const {
    if (!has(key)) return {};
    return as_numbers(j_.at(key), sub(key));
  }

  [[noreturn]] void fail(const std::string& msg, const char* key = nullptr) const {
    throw ConfigError((key ? sub(key) : path_) + ": " + msg);
  }

  static double as_number(const Json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path + ": must be finite");
    return d;
  }

  static std::int64_t as_integer(const Json& v, const std::string& path) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
    }
    throw ConfigError(path + ": expected an integer");
  }

  static std::vector<double> as_numbers(const Json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

 private:
  const Json& j_;
  std::string path_;
};

inline std::vector<double> load_samples_file(const std::filesystem::path& file, const std::string& path) {
  std::ifstream in(file);
  if (!in) throw ConfigError(path + ": cannot open samples file '" + file.string() + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": samples file is not valid JSON: " + e.what());
  }
  if (j.is_object()) {
    if (!j.contains("values")) throw ConfigError(path + ": samples file object lacks 'values'");
    return Reader::as_numbers(j.at("values"), path + "<file>.values");
  }
  return Reader::as_numbers(j, path + "<file>");
}

inline InitialCondition parse_ic(const Json& j, const std::string& path, const std::filesystem::path& base_dir) {
  if (!j.is_object() || j.size() != 1) {
    throw ConfigError(path + ": expected exactly one of sine, fourier, peakon, multipeakon, samples");
  }
  const std::string kind = j.begin().key();
  const Json& body = j.begin().value();
  const std::string p = path + "." + kind;
  if (kind == "sine") {
    Reader r(body, p);
    r.only({"a", "b", "k"});
    SineIc s;
    s.a = r.number("a", 1.0);
    s.b = r.number("b", 0.0);
    const std::int64_t k = r.integer("k", 1);
    if (k < 0) r.fail("frequency must be non-negative", "k");
    s.k = static_cast<int>(k);
    return s;
  }
  if (kind == "fourier") {
    if (!body.is_array() || body.empty()) throw ConfigError(p + ": expected a non-empty array of modes");
    FourierIc f;
    for (std::size_t i = 0; i < body.size(); ++i) {
      Reader r(body[i], p + "[" + std::to_string(i) + "]");
      r.only({"k", "re", "im"});
      FourierMode m;
      const std::int64_t k = r.integer("k");
      if (k < 0) r.fail("wavenumber must be non-negative", "k");
      m.k = static_cast<int>(k);
      m.re = r.number("re", 0.0);
      m.im = r.number("im", 0.0);
      f.modes.push_back(m);
    }
    return f;
  }
  if (kind == "peakon") {
    Reader r(body, p);
    r.only({"c"});
    PeakonIc s;
    s.c = r.number("c", 1.0);
    if (s.c == 0.0) r.fail("wave speed must be non-zero", "c");
    return s;
  }
  if (kind == "multipeakon") {
    Reader r(body, p);
    r.only({"p", "q"});
    MultipeakonIc s;
    s.p = r.numbers("p");
    s.q = r.numbers("q");
    try {
      validate(MultipeakonSpec{s.p, s.q});
    } catch (const std::invalid_argument& e) {
      throw ConfigError(p + ": " + e.what());
    }
    return s;
  }
  if (kind == "samples") {
    Reader r(body, p);
    r.only({"values", "path"});
    SamplesIc s;
    if (r.has("values") == r.has("path")) r.fail("give exactly one of 'values' or 'path'");
    if (r.has("values")) {
      s.values = r.numbers("values");
    } else {
      s.path = r.string("path", "");
      std::filesystem::path file(s.path);
      if (file.is_relative()) file = base_dir / file;
      s.values = load_samples_file(file, r.sub("path"));
    }
    return s;
  }
  throw ConfigError(path + "." + kind + ": unknown initial condition kind");
}

}  // namespace detail

/// Parses and validates a JSON run description. Relative sample-file paths
/// are resolved against `base_dir`.
inline RunConfig parse_config(const Json& j, const std::filesystem::path& base_dir = ".") {
  using detail::Reader;
  Reader r(j, "$");
  r.only({"n", "t_end", "cfl", "kappa", "ic", "filter", "output", "viscous", "detector", "characteristics"});

  RunConfig c;
  if (!r.has("ic")) r.fail("missing required key 'ic'", "ic");
  c.ic = detail::parse_ic(r.at("ic"), r.sub("ic"), base_dir);
  const bool is_peakon = std::holds_alternative<PeakonIc>(c.ic);

  const auto* samples = std::get_if<SamplesIc>(&c.ic);
  std::int64_t default_n = is_peakon ? 1024 : 256;
  if (samples) default_n = static_cast<std::int64_t>(samples->values.size());
  const std::int64_t n = r.integer("n", default_n);
  if (n < static_cast<std::int64_t>(GridSpec::kMinPoints) || n % 2 != 0) {
    r.fail("grid size must be even and at least 8, got " + std::to_string(n), "n");
  }
  c.n = static_cast<std::size_t>(n);
  if (samples && samples->values.size() != c.n) {
    throw ConfigError("$.ic.samples: " + std::to_string(samples->values.size()) +
                      " samples do not match n = " + std::to_string(c.n));
  }
  if (const auto* s = std::get_if<SineIc>(&c.ic); s && static_cast<std::size_t>(s->k) >= c.n / 2) {
    throw ConfigError("$.ic.sine.k: frequency must be below n/2");
  }
  if (const auto* f = std::get_if<FourierIc>(&c.ic)) {
    for (std::size_t i = 0; i < f->modes.size(); ++i) {
      if (static_cast<std::size_t>(f->modes[i].k) >= c.n / 2) {
        throw ConfigError("$.ic.fourier[" + std::to_string(i) + "].k: wavenumber must be below n/2");
      }
    }
  }

  c.t_end = r.number("t_end");
  if (c.t_end < 0.0) r.fail("must be non-negative", "t_end");
  c.cfl = r.number("cfl", 0.3);
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) r.fail("must lie in (0, 1]", "cfl");
  c.kappa = r.number("kappa", 0.0);

  c.filter.enabled = is_peakon;
  if (r.has("filter")) {
    Reader f(r.at("filter"), r.sub("filter"));
    f.only({"enabled", "strength"});
    c.filter.enabled = f.boolean("enabled", c.filter.enabled);
    c.filter.strength = f.number("strength", 1.0);
    if (c.filter.strength < 0.0) f.fail("must be non-negative", "strength");
  }

  if (r.has("output")) {
    Reader o(r.at("output"), r.sub("output"));
    o.only({"cadence", "directory"});
    c.output.cadence = o.number("cadence", 0.01);
    if (!(c.output.cadence > 0.0)) o.fail("must be positive", "cadence");
    c.output.directory = o.string("directory", "out");
    if (c.output.directory.empty()) o.fail("must not be empty", "directory");
  }

  if (r.has("viscous")) {
    Reader v(r.at("viscous"), r.sub("viscous"));
    v.only({"epsilon", "alpha", "mollifier_scale", "t_lo", "epsilon_list", "sweep_times"});
    if (v.has("epsilon")) {
      c.viscous.epsilon = v.number("epsilon");
      if (!(*c.viscous.epsilon > 0.0)) v.fail("must be positive", "epsilon");
    }
    c.viscous.alpha = v.number("alpha", 0.5);
    if (!(c.viscous.alpha > 0.0 && c.viscous.alpha < 1.0)) v.fail("must lie in (0, 1)", "alpha");
    if (v.has("mollifier_scale")) {
      c.viscous.mollifier_scale = v.number("mollifier_scale");
      const double s = *c.viscous.mollifier_scale;
      if (!(s > 0.0 && s < 0.25)) v.fail("must lie in (0, 1/4)", "mollifier_scale");
    }
    c.viscous.t_lo = v.number("t_lo", 0.1);
    if (!(c.viscous.t_lo > 0.0)) v.fail("must be positive", "t_lo");
    c.viscous.epsilon_list = v.numbers("epsilon_list");
    for (std::size_t i = 0; i < c.viscous.epsilon_list.size(); ++i) {
      const double e = c.viscous.epsilon_list[i];
      const std::string at = v.sub("epsilon_list") + "[" + std::to_string(i) + "]";
      if (!(e > 0.0 && e < 0.25)) throw ConfigError(at + ": must lie in (0, 1/4)");
      if (i > 0 && !(e < c.viscous.epsilon_list[i - 1])) throw ConfigError(at + ": list must be strictly decreasing");
    }
    c.viscous.sweep_times = v.numbers("sweep_times");
    for (std::size_t i = 0; i < c.viscous.sweep_times.size(); ++i) {
      const double t = c.viscous.sweep_times[i];
      const std::string at = v.sub("sweep_times") + "[" + std::to_string(i) + "]";
      if (t < 0.0) throw ConfigError(at + ": must be non-negative");
      if (i > 0 && !(t > c.viscous.sweep_times[i - 1])) throw ConfigError(at + ": times must be increasing");
    }
    if (c.viscous.epsilon && !(*c.viscous.epsilon < 0.25) && !c.viscous.mollifier_scale) {
      v.fail("epsilon doubles as the mollifier scale and must be below 1/4", "epsilon");
    }
  }

  if (r.has("detector")) {
    Reader d(r.at("detector"), r.sub("detector"));
    d.only({"enabled", "S_threshold", "dt_min", "tail_tolerance"});
    c.detector.enabled = d.boolean("enabled", true);
    c.detector.S_threshold = d.number("S_threshold", 1e3);
    if (!(c.detector.S_threshold > 0.0)) d.fail("must be positive", "S_threshold");
    c.detector.dt_min = d.number("dt_min", 1e-9);
    if (!(c.detector.dt_min > 0.0)) d.fail("must be positive", "dt_min");
    c.detector.tail_tolerance = d.number("tail_tolerance", 1e-8);
    if (!(c.detector.tail_tolerance > 0.0)) d.fail("must be positive", "tail_tolerance");
  }

  if (r.has("characteristics")) {
    Reader h(r.at("characteristics"), r.sub("characteristics"));
    h.only({"seeds", "substeps"});
    const std::int64_t seeds = h.integer("seeds", 16);
    if (seeds < 1 || seeds > 100000) h.fail("must lie in [1, 100000]", "seeds");
    c.characteristics.seeds = static_cast<int>(seeds);
    const std::int64_t sub = h.integer("substeps", 2);
    if (sub < 1 || sub > 1000) h.fail("must lie in [1, 1000]", "substeps");
    c.characteristics.substeps = static_cast<int>(sub);
  }
  return c;
}

inline RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".") {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("$: not valid JSON: ") + e.what());
  }
  return parse_config(j, base_dir);
}

inline RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("$: cannot open config file '" + file.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), file.parent_path().empty() ? std::filesystem::path(".") : file.parent_path());
}

// ---------------------------------------------------------------------------
// Serialization

inline Json ic_to_json(const InitialCondition& ic) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SineIc>) {
          return {{"sine", {{"a", v.a}, {"b", v.b}, {"k", v.k}}}};
        } else if constexpr (std::is_same_v<T, FourierIc>) {
          Json modes = Json::array();
          for (const FourierMode& m : v.modes) modes.push_back({{"k", m.k}, {"re", m.re}, {"im", m.im}});
          return {{"fourier", modes}};
        } else if constexpr (std::is_same_v<T, PeakonIc>) {
          return {{"peakon", {{"c", v.c}}}};
        } else if constexpr (std::is_same_v<T, MultipeakonIc>) {
          return {{"multipeakon", {{"p", v.p}, {"q", v.q}}}};
        } else {
          if (!v.path.empty()) return {{"samples", {{"path", v.path}}}};
          return {{"samples", {{"values", v.values}}}};
        }
      },
      ic);
}

inline Json to_json(const RunConfig& c) {
  Json j;
  j["n"] = c.n;
  j["t_end"] = c.t_end;
  j["cfl"] = c.cfl;
  j["kappa"] = c.kappa;
  j["ic"] = ic_to_json(c.ic);
  j["filter"] = {{"enabled", c.filter.enabled}, {"strength", c.filter.strength}};
  j["output"] = {{"cadence", c.output.cadence}, {"directory", c.output.directory}};
  Json v = {{"alpha", c.viscous.alpha},
            {"t_lo", c.viscous.t_lo},
            {"epsilon_list", c.viscous.epsilon_list},
            {"sweep_times", c.viscous.sweep_times}};
  if (c.viscous.epsilon) v["epsilon"] = *c.viscous.epsilon;
  if (c.viscous.mollifier_scale) v["mollifier_scale"] = *c.viscous.mollifier_scale;
  j["viscous"] = v;
  j["detector"] = {{"enabled", c.detector.enabled},
                   {"S_threshold", c.detector.S_threshold},
                   {"dt_min", c.detector.dt_min},
                   {"tail_tolerance", c.detector.tail_tolerance}};
  j["characteristics"] = {{"seeds", c.characteristics.seeds}, {"substeps", c.characteristics.substeps}};
  return j;
}

// ---------------------------------------------------------------------------
// Construction

inline PeriodicField initial_field(const RunConfig& c) {
  const GridSpec grid(c.n);
  return std::visit(
      [&](const auto& v) -> PeriodicField {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SineIc>) {
          return PeriodicField::sample(grid, [&](double x) { return v.a * std::sin(kTwoPi * v.k * x) + v.b; });
        } else if constexpr (std::is_same_v<T, FourierIc>) {
          return PeriodicField::sample(grid, [&](double x) {
            double acc = 0.0;
            for (const FourierMode& m : v.modes) {
              const double th = kTwoPi * m.k * x;
              acc += m.re * std::cos(th) - m.im * std::sin(th);
            }
            return acc;
          });
        } else if constexpr (std::is_same_v<T, PeakonIc>) {
          return peakon_profile(grid, v.c);
        } else if constexpr (std::is_same_v<T, MultipeakonIc>) {
          return multipeakon_field(grid, MultipeakonSpec{v.p, v.q});
        } else {
          return PeriodicField(grid, v.values);
        }
      },
      c.ic);
}

inline RunOptions run_options(const RunConfig& c) {
  RunOptions o;
  o.t_end = c.t_end;
  o.cfl = c.cfl;
  o.cadence = c.output.cadence;
  o.dt_min = c.detector.dt_min;
  o.filter_strength = c.filter.enabled ? c.filter.strength : 0.0;
  o.detector.enabled = c.detector.enabled;
  o.detector.slope_threshold = c.detector.S_threshold;
  o.detector.tail_tolerance = c.detector.tail_tolerance;
  return o;
}

/// Viscous settings; `epsilon` overrides the configured value when given.
inline ViscousConfig viscous_config(const RunConfig& c, std::optional<double> epsilon = std::nullopt) {
  ViscousConfig v;
  const std::optional<double> eps = epsilon ? epsilon : c.viscous.epsilon;
  if (!eps) throw ConfigError("$.viscous.epsilon: required for viscous runs");
  v.epsilon = *eps;
  v.mollifier_scale = c.viscous.mollifier_scale.value_or(0.0);
  v.alpha = c.viscous.alpha;
  v.t_lo = c.viscous.t_lo;
  v.run = run_options(c);
  if (!(v.scale() < 0.25)) throw ConfigError("$.viscous.epsilon: mollifier scale must be below 1/4");
  return v;
}

/// Inviscid run described by a configuration.
inline Trajectory run(const RunConfig& c) { return run(initial_field(c), c.kappa, run_options(c)); }

}  // namespace mu_ch
