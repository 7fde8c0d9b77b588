#pragma once

// Plain-text job configuration: one `key = value` per line, `#` comments.
// Parsing is fail-closed (unknown keys are errors) and every diagnostic
// names the offending line and key.  render_config() emits a file that
// parses back to the identical JobSpec, so effective configurations can be
// echoed into output headers and replayed verbatim.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "qdc/capacity.hpp"
#include "qdc/channel.hpp"
#include "qdc/errors.hpp"
#include "qdc/opa.hpp"
#include "qdc/simulator.hpp"

namespace qdc::config {

enum class JobMode { spectrum, variance, capacity, sweep, simulate, figures };
enum class Units { nats, bits };

// ln 3 (exp r(0,0) = 3), the workhorse operating point of the examples.
inline const double default_coupling = std::log(3.0);

struct JobSpec {
  JobMode mode = JobMode::capacity;

  // Squeezer (shared by both arms of the entanglement source).
  double g = default_coupling;
  double detuning_offset = 0.0;
  double temporal_dispersion = 0.0;
  double qc_convention = 8.0;
  opa::Correction correction = opa::Correction::none;

  // Signal ensemble.
  double d_A = 1.0;
  double photon_flux = 1.0;
  double temporal_band = 0.5;

  // Numerics and output.
  double tol = 1e-8;
  Units units = Units::nats;
  std::string out_dir = ".";

  // Tabulation grids (spectrum and variance jobs; kappa_max also bounds the
  // simulation lattice).
  double kappa_max = 4.0;
  int kappa_points = 161;
  std::vector<double> omega_values = {0.0};

  // Capacity sweep.
  capacity::SweepAxis sweep_axis = capacity::SweepAxis::element_density;
  std::vector<double> sweep_values = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};

  // Monte-Carlo simulation.
  std::uint64_t seed = 1;
  int n_samples = 10000;
  int blocks = 50;
  int threads = 1;
  int transverse_modes = 64;
  int temporal_modes = 16;
  simulator::SignalEstimator estimator = simulator::SignalEstimator::analytic;
  bool signal_on = true;

  bool operator==(const JobSpec&) const = default;

  opa::OpaParams squeezer() const {
    opa::OpaParams p;
    p.g = g;
    p.detuning_offset = detuning_offset;
    p.temporal_dispersion = temporal_dispersion;
    p.qc_convention = qc_convention;
    return p;
  }

  channel::SignalEnsemble ensemble() const {
    channel::SignalEnsemble e;
    e.photon_flux = photon_flux;
    e.d_A = d_A;
    e.temporal_band = temporal_band;
    return e;
  }

  simulator::RunConfig run_config() const {
    simulator::RunConfig rc;
    rc.geom = simulator::make_geometry(transverse_modes, temporal_modes,
                                       kappa_max, temporal_band);
    rc.squeezer = squeezer();
    rc.correction = correction;
    rc.ensemble = ensemble();
    rc.signal_on = signal_on;
    rc.seed = seed;
    rc.n_samples = n_samples;
    rc.blocks = blocks;
    rc.threads = threads;
    rc.estimator = estimator;
    return rc;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Shortest representation that parses back to the identical double.
inline std::string shortest(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

inline std::string join_shortest(const std::vector<double>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ", ";
    out += shortest(vs[i]);
  }
  return out;
}

struct Parser {
  JobSpec& spec;
  std::string source;
  int line_no = 0;
  std::string_view key;
  std::string_view value;

  [[noreturn]] void fail(const std::string& what) const {
    throw config_error(source + " line " + std::to_string(line_no) + ": " +
                       what);
  }

  [[noreturn]] void bad_value() const {
    fail("invalid value for '" + std::string(key) + "': '" +
         std::string(value) + "'");
  }

  double number() const {
    double v = 0.0;
    auto r = std::from_chars(value.data(), value.data() + value.size(), v);
    if (r.ec != std::errc{} || r.ptr != value.data() + value.size()) {
      bad_value();
    }
    if (!std::isfinite(v)) bad_value();
    return v;
  }

  double positive(const char* why) const {
    double v = number();
    if (!(v > 0.0)) fail(std::string(key) + " must be " + why);
    return v;
  }

  double nonnegative(const char* why) const {
    double v = number();
    if (!(v >= 0.0)) fail(std::string(key) + " must be " + why);
    return v;
  }

  long long integer() const {
    long long v = 0;
    auto r = std::from_chars(value.data(), value.data() + value.size(), v);
    if (r.ec != std::errc{} || r.ptr != value.data() + value.size()) {
      bad_value();
    }
    return v;
  }

  int bounded_int(long long lo, const char* why) const {
    long long v = integer();
    if (v < lo || v > 1'000'000'000) fail(std::string(key) + " must be " + why);
    return static_cast<int>(v);
  }

  std::uint64_t unsigned_integer() const {
    std::uint64_t v = 0;
    auto r = std::from_chars(value.data(), value.data() + value.size(), v);
    if (r.ec != std::errc{} || r.ptr != value.data() + value.size()) {
      bad_value();
    }
    return v;
  }

  bool boolean() const {
    if (value == "true") return true;
    if (value == "false") return false;
    bad_value();
  }

  std::vector<double> number_list() const {
    std::vector<double> out;
    std::string_view rest = value;
    while (true) {
      const std::size_t comma = rest.find(',');
      const std::string_view tok = trim(rest.substr(0, comma));
      double v = 0.0;
      auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (tok.empty() || r.ec != std::errc{} ||
          r.ptr != tok.data() + tok.size() || !std::isfinite(v)) {
        bad_value();
      }
      out.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

  void assign() const {
    JobSpec& s = spec;
    if (key == "mode") {
      if (value == "spectrum") s.mode = JobMode::spectrum;
      else if (value == "variance") s.mode = JobMode::variance;
      else if (value == "capacity") s.mode = JobMode::capacity;
      else if (value == "sweep") s.mode = JobMode::sweep;
      else if (value == "simulate") s.mode = JobMode::simulate;
      else if (value == "figures") s.mode = JobMode::figures;
      else bad_value();
    } else if (key == "g") {
      s.g = nonnegative(">= 0");
    } else if (key == "exp_r00") {
      const double v = number();
      if (!(v >= 1.0)) fail("exp_r00 must be >= 1");
      s.g = std::log(v);
    } else if (key == "detuning_offset") {
      s.detuning_offset = number();
    } else if (key == "temporal_dispersion") {
      s.temporal_dispersion = number();
    } else if (key == "qc_convention") {
      s.qc_convention = positive("> 0");
    } else if (key == "correction") {
      if (value == "none") s.correction = opa::Correction::none;
      else if (value == "lens") s.correction = opa::Correction::quadratic_lens;
      else if (value == "ideal") s.correction = opa::Correction::ideal;
      else bad_value();
    } else if (key == "d_A") {
      s.d_A = positive("> 0");
    } else if (key == "P") {
      s.photon_flux = nonnegative(">= 0");
    } else if (key == "temporal_band") {
      s.temporal_band = positive("> 0");
    } else if (key == "tol") {
      s.tol = positive("> 0");
    } else if (key == "units") {
      if (value == "nats") s.units = Units::nats;
      else if (value == "bits") s.units = Units::bits;
      else bad_value();
    } else if (key == "out_dir") {
      if (value.empty()) fail("out_dir must be non-empty");
      s.out_dir = std::string(value);
    } else if (key == "kappa_max") {
      s.kappa_max = positive("> 0");
    } else if (key == "kappa_points") {
      s.kappa_points = bounded_int(2, ">= 2");
    } else if (key == "omega_values") {
      s.omega_values = number_list();
    } else if (key == "sweep_axis") {
      if (value == "d_A") s.sweep_axis = capacity::SweepAxis::element_density;
      else if (value == "P") s.sweep_axis = capacity::SweepAxis::photon_flux;
      else if (value == "g") s.sweep_axis = capacity::SweepAxis::coupling;
      else bad_value();
    } else if (key == "sweep_values") {
      s.sweep_values = number_list();
    } else if (key == "seed") {
      s.seed = unsigned_integer();
    } else if (key == "n_samples") {
      s.n_samples = bounded_int(1, ">= 1");
    } else if (key == "blocks") {
      s.blocks = bounded_int(2, ">= 2");
    } else if (key == "threads") {
      s.threads = bounded_int(1, ">= 1");
    } else if (key == "transverse_modes") {
      s.transverse_modes = bounded_int(2, ">= 2");
      if (s.transverse_modes % 2 != 0) fail("transverse_modes must be even");
    } else if (key == "temporal_modes") {
      s.temporal_modes = bounded_int(4, ">= 4");
      if (s.temporal_modes % 4 != 0) {
        fail("temporal_modes must be a multiple of 4");
      }
    } else if (key == "estimator") {
      if (value == "analytic") {
        s.estimator = simulator::SignalEstimator::analytic;
      } else if (value == "difference") {
        s.estimator = simulator::SignalEstimator::difference;
      } else {
        bad_value();
      }
    } else if (key == "signal_on") {
      s.signal_on = boolean();
    } else {
      fail("unknown key '" + std::string(key) + "'");
    }
  }
};

}  // namespace detail

// Cross-field coherence checks that cannot be attached to a single
// assignment.  Throws config_error naming the keys involved.
inline void validate(const JobSpec& spec) {
  if (spec.n_samples % spec.blocks != 0) {
    throw config_error("n_samples (" + std::to_string(spec.n_samples) +
                       ") must be divisible by blocks (" +
                       std::to_string(spec.blocks) + ")");
  }
  for (double v : spec.sweep_values) {
    switch (spec.sweep_axis) {
      case capacity::SweepAxis::element_density:
        if (!(v > 0.0)) {
          throw config_error("sweep_values must be > 0 for sweep_axis d_A");
        }
        break;
      case capacity::SweepAxis::photon_flux:
      case capacity::SweepAxis::coupling:
        if (!(v >= 0.0)) {
          throw config_error("sweep_values must be >= 0 for this sweep_axis");
        }
        break;
    }
  }
}

// Parse `key = value` text.  `source` names the input in diagnostics
// (a file path, or the default tag for inline text).
inline JobSpec parse_config(std::string_view text,
                            const std::string& source = "config") {
  JobSpec spec;
  detail::Parser p{spec, source};
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++p.line_no;

    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      p.fail("expected 'key = value', got '" + std::string(line) + "'");
    }
    p.key = detail::trim(line.substr(0, eq));
    p.value = detail::trim(line.substr(eq + 1));
    if (p.key.empty()) p.fail("empty key");
    p.assign();
  }
  validate(spec);
  return spec;
}

inline const char* mode_name(JobMode m) {
  switch (m) {
    case JobMode::spectrum: return "spectrum";
    case JobMode::variance: return "variance";
    case JobMode::capacity: return "capacity";
    case JobMode::sweep: return "sweep";
    case JobMode::simulate: return "simulate";
    case JobMode::figures: return "figures";
  }
  return "capacity";
}

inline const char* correction_name(opa::Correction c) {
  switch (c) {
    case opa::Correction::none: return "none";
    case opa::Correction::quadratic_lens: return "lens";
    case opa::Correction::ideal: return "ideal";
  }
  return "none";
}

inline const char* units_name(Units u) {
  return u == Units::bits ? "bits" : "nats";
}

inline const char* axis_name(capacity::SweepAxis a) {
  switch (a) {
    case capacity::SweepAxis::element_density: return "d_A";
    case capacity::SweepAxis::photon_flux: return "P";
    case capacity::SweepAxis::coupling: return "g";
  }
  return "d_A";
}

inline const char* estimator_name(simulator::SignalEstimator e) {
  return e == simulator::SignalEstimator::difference ? "difference"
                                                     : "analytic";
}

// The full effective configuration, one `key = value` line per entry.
// Guaranteed: parse_config(render_config(spec)) == spec.
//
// `include_advisory = false` drops the keys that steer execution but cannot
// affect any computed value (currently just `threads`); output-file headers
// use this form so results are byte-identical across thread counts.
inline std::vector<std::string> render_config_lines(
    const JobSpec& s, bool include_advisory = true) {
  using detail::join_shortest;
  using detail::shortest;
  std::vector<std::string> out;
  auto put = [&](const char* key, const std::string& value) {
    out.push_back(std::string(key) + " = " + value);
  };
  put("mode", mode_name(s.mode));
  put("g", shortest(s.g));
  put("detuning_offset", shortest(s.detuning_offset));
  put("temporal_dispersion", shortest(s.temporal_dispersion));
  put("qc_convention", shortest(s.qc_convention));
  put("correction", correction_name(s.correction));
  put("d_A", shortest(s.d_A));
  put("P", shortest(s.photon_flux));
  put("temporal_band", shortest(s.temporal_band));
  put("tol", shortest(s.tol));
  put("units", units_name(s.units));
  put("out_dir", s.out_dir);
  put("kappa_max", shortest(s.kappa_max));
  put("kappa_points", std::to_string(s.kappa_points));
  put("omega_values", join_shortest(s.omega_values));
  put("sweep_axis", axis_name(s.sweep_axis));
  put("sweep_values", join_shortest(s.sweep_values));
  put("seed", std::to_string(s.seed));
  put("n_samples", std::to_string(s.n_samples));
  put("blocks", std::to_string(s.blocks));
  if (include_advisory) put("threads", std::to_string(s.threads));
  put("transverse_modes", std::to_string(s.transverse_modes));
  put("temporal_modes", std::to_string(s.temporal_modes));
  put("estimator", estimator_name(s.estimator));
  put("signal_on", s.signal_on ? "true" : "false");
  return out;
}

inline std::string render_config(const JobSpec& spec) {
  std::string out;
  for (const std::string& line : render_config_lines(spec)) {
    out += line;
    out += '\n';
  }
  return out;
}

inline JobSpec load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw io_error("cannot read config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    throw io_error("error while reading config file '" + path + "'");
  }
  return parse_config(buf.str(), path);
}

}  // namespace qdc::config
