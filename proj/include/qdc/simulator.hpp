#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "qdc/channel.hpp"
#include "qdc/errors.hpp"
#include "qdc/opa.hpp"
#include "qdc/rng.hpp"

// Semiclassical Monte-Carlo simulation of the full optical train on a
// discrete (q, Omega) lattice: vacuum inputs, two squeezers, beamsplitter,
// signal modulator, second beamsplitter, two homodyne detectors.  Gaussian
// states are represented by classical complex amplitudes with half-quantum
// vacuum variance, which is exact for this all-Gaussian circuit.

namespace qdc::simulator {

using cplx = std::complex<double>;

inline constexpr double inv_sqrt2 = 0.7071067811865475244;

inline cplx mul_neg_i(cplx z) { return {z.imag(), -z.real()}; }

// ---------------------------------------------------------------------------
// Lattice geometry

struct GridGeometry {
  int transverse_modes = 64;  // modes per transverse axis (even)
  int temporal_modes = 16;    // temporal modes (multiple of 4)
  double dk = 0.125;          // transverse mode spacing
  double dw = 0.0625;         // temporal mode spacing

  void validate() const {
    if (transverse_modes < 2 || transverse_modes % 2 != 0) {
      throw config_error("transverse_modes must be even and >= 2");
    }
    if (temporal_modes < 4 || temporal_modes % 4 != 0) {
      throw config_error("temporal_modes must be a multiple of 4 and >= 4");
    }
    if (!(dk > 0.0) || !(dw > 0.0)) {
      throw config_error("lattice spacings must be > 0");
    }
  }

  int size() const { return transverse_modes * transverse_modes * temporal_modes; }
  double quantization_length() const { return 2.0 * opa::pi / dk; }
  double time_window() const { return 2.0 * opa::pi / dw; }

  int index(int ix, int iy, int it) const {
    return (ix * transverse_modes + iy) * temporal_modes + it;
  }

  // Storage component -> signed mode number (FFT ordering).
  static int logical(int comp, int n) { return comp < n / 2 ? comp : comp - n; }

  // Storage component of the negated mode; -n/2 wraps onto itself.
  static int negate(int comp, int n) { return comp == 0 ? 0 : n - comp; }

  int neg_index(int i) const {
    const int nt = temporal_modes, nx = transverse_modes;
    const int it = i % nt;
    const int iy = (i / nt) % nx;
    const int ix = i / (nt * nx);
    return index(negate(ix, nx), negate(iy, nx), negate(it, nt));
  }

  double kappa(int i) const {
    const int nt = temporal_modes, nx = transverse_modes;
    const int iy = (i / nt) % nx;
    const int ix = i / (nt * nx);
    return dk * std::hypot(static_cast<double>(logical(ix, nx)),
                           static_cast<double>(logical(iy, nx)));
  }

  double omega(int i) const {
    return dw * logical(i % temporal_modes, temporal_modes);
  }
};

inline bool same_lattice(const GridGeometry& a, const GridGeometry& b) {
  return a.transverse_modes == b.transverse_modes &&
         a.temporal_modes == b.temporal_modes && a.dk == b.dk && a.dw == b.dw;
}

// Geometry whose kappa axis spans [-kappa_max, kappa_max) and whose
// temporal spacing puts the edge of the signal band exactly on a mode.
inline GridGeometry make_geometry(int transverse_modes, int temporal_modes,
                                  double kappa_max, double temporal_band) {
  if (!(kappa_max > 0.0) || !(temporal_band > 0.0)) {
    throw config_error("kappa_max and temporal_band must be > 0");
  }
  GridGeometry g;
  g.transverse_modes = transverse_modes;
  g.temporal_modes = temporal_modes;
  g.dk = 2.0 * kappa_max / transverse_modes;
  g.dw = 2.0 * temporal_band / temporal_modes;
  g.validate();
  return g;
}

struct FieldGrid {
  GridGeometry geom;
  std::vector<cplx> modes;

  explicit FieldGrid(const GridGeometry& g) : geom(g), modes(g.size()) {}
};

// ---------------------------------------------------------------------------
// Elementary operations of the optical train

namespace detail {

// Each +-(q, Omega) pair shares one counter block: lane 0 belongs to the
// smaller storage index.  Self-conjugate modes use lane 0.
inline cplx mode_draw(const rng::CounterRng& rng, const GridGeometry& geom,
                      int i, std::uint32_t sample, std::uint32_t stream) {
  const int j = geom.neg_index(i);
  const int block = std::min(i, j);
  const auto [lane0, lane1] =
      rng.complex_pair(sample, static_cast<std::uint32_t>(block), stream);
  return i <= j ? lane0 : lane1;
}

}  // namespace detail

// Vacuum state of one beam: independent circular complex amplitudes with
// <|c|^2> = 1/2 per mode.
inline FieldGrid sample_vacuum(const GridGeometry& geom,
                               const rng::CounterRng& rng,
                               std::uint32_t sample, std::uint32_t stream) {
  FieldGrid out(geom);
  for (int i = 0; i < geom.size(); ++i) {
    out.modes[i] =
        inv_sqrt2 * detail::mode_draw(rng, geom, i, sample, stream);
  }
  return out;
}

// One random image from the Gaussian ensemble: <|a|^2> = sigma_A per mode.
inline FieldGrid sample_signal(const GridGeometry& geom,
                               const channel::SignalEnsemble& ens,
                               const rng::CounterRng& rng,
                               std::uint32_t sample) {
  FieldGrid out(geom);
  for (int i = 0; i < geom.size(); ++i) {
    const double sA =
        channel::signal_variance(ens, geom.kappa(i), geom.omega(i));
    if (sA > 0.0) {
      out.modes[i] = std::sqrt(sA) * detail::mode_draw(rng, geom, i, sample,
                                                       rng::stream_signal);
    }
  }
  return out;
}

// Pairwise squeezing transform s(q,w) = U c(q,w) + V conj(c(-q,-w)); the
// coefficient source is any callable (kappa, omega) -> opa::UV.
template <class UVSource>
inline FieldGrid apply_squeezing(const FieldGrid& in, UVSource&& uv_at) {
  FieldGrid out(in.geom);
  const GridGeometry& geom = in.geom;
  for (int i = 0; i < geom.size(); ++i) {
    const int j = geom.neg_index(i);
    if (j < i) continue;  // pair already handled from its canonical member
    const opa::UV up = uv_at(geom.kappa(i), geom.omega(i));
    out.modes[i] = up.U * in.modes[i] + up.V * std::conj(in.modes[j]);
    if (j != i) {
      const opa::UV um = uv_at(geom.kappa(j), geom.omega(j));
      out.modes[j] = um.U * in.modes[j] + um.V * std::conj(in.modes[i]);
    }
  }
  return out;
}

inline FieldGrid apply_squeezing(const FieldGrid& in,
                                 const opa::SqueezingTransform& t) {
  return apply_squeezing(in, [&](double k, double w) { return t.uv(k, w); });
}

// Symmetric beamsplitter: out1 = (in1 + in2)/sqrt(2), out2 = (in1 - in2)/sqrt(2).
inline std::pair<FieldGrid, FieldGrid> beamsplit(const FieldGrid& in1,
                                                 const FieldGrid& in2) {
  if (!same_lattice(in1.geom, in2.geom)) {
    throw std::invalid_argument("beamsplit: lattice mismatch");
  }
  FieldGrid out1(in1.geom), out2(in1.geom);
  for (std::size_t i = 0; i < in1.modes.size(); ++i) {
    out1.modes[i] = (in1.modes[i] + in2.modes[i]) * inv_sqrt2;
    out2.modes[i] = (in1.modes[i] - in2.modes[i]) * inv_sqrt2;
  }
  return {std::move(out1), std::move(out2)};
}

// Classical image added to one beam (the modulator has unit transmission).
inline FieldGrid add_signal(const FieldGrid& beam, const FieldGrid& image) {
  if (!same_lattice(beam.geom, image.geom)) {
    throw std::invalid_argument("add_signal: lattice mismatch");
  }
  FieldGrid out(beam.geom);
  for (std::size_t i = 0; i < beam.modes.size(); ++i) {
    out.modes[i] = beam.modes[i] + image.modes[i];
  }
  return out;
}

struct HomodyneRecord {
  GridGeometry geom;
  std::vector<cplx> i1;
  std::vector<cplx> i2;
};

// Photocurrent Fourier amplitudes: detector 1 reads the cosine quadrature,
// detector 2 the sine quadrature.  The outputs satisfy the reality
// constraint i(q,w) = conj(i(-q,-w)) identically.
inline HomodyneRecord homodyne(const FieldGrid& b1, const FieldGrid& b2) {
  if (!same_lattice(b1.geom, b2.geom)) {
    throw std::invalid_argument("homodyne: lattice mismatch");
  }
  HomodyneRecord out{b1.geom, std::vector<cplx>(b1.modes.size()),
                     std::vector<cplx>(b1.modes.size())};
  for (int i = 0; i < b1.geom.size(); ++i) {
    const int j = b1.geom.neg_index(i);
    out.i1[i] = b1.modes[i] + std::conj(b1.modes[j]);
    out.i2[i] = mul_neg_i(b2.modes[i] - std::conj(b2.modes[j]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Production sampling loop

enum class SignalEstimator {
  analytic,    // sigma_A taken from the generator's own spectral density
  difference,  // sigma_A estimated as signal-on minus signal-off variance
};

struct RunConfig {
  GridGeometry geom;
  opa::OpaParams squeezer{};  // shared gain profile of the two squeezers
  opa::Correction correction = opa::Correction::none;
  channel::SignalEnsemble ensemble;
  bool signal_on = true;
  std::uint64_t seed = 1;
  int n_samples = 10000;
  int blocks = 50;  // jackknife blocks; must divide n_samples
  int threads = 1;
  SignalEstimator estimator = SignalEstimator::analytic;
  int correlation_probes = 96;  // modes recorded for cross-mode diagnostics

  channel::ChannelConfig make_channel() const {
    return channel::ChannelConfig{opa::SqueezingTransform(squeezer, correction)};
  }

  void validate() const {
    geom.validate();
    squeezer.validate();
    ensemble.validate();
    if (n_samples < 1) throw config_error("n_samples must be >= 1");
    if (blocks < 2) throw config_error("blocks must be >= 2");
    if (n_samples % blocks != 0) {
      throw config_error("n_samples must be divisible by blocks");
    }
    if (threads < 1) throw config_error("threads must be >= 1");
    if (correlation_probes < 0) {
      throw config_error("correlation_probes must be >= 0");
    }
  }
};

struct ModeStats {
  int index = 0;          // storage index of the canonical pair member
  double kappa = 0.0;
  double omega = 0.0;
  bool self_paired = false;
  bool capacity_member = false;  // in-band, omega != 0
  // Analytic (expected) values realized by the sampled transform:
  double noise1 = 1.0;
  double noise2 = 1.0;
  double signal = 0.0;
  // Empirical mean |i|^2 with the signal off / on:
  double var1_off = 0.0;
  double var2_off = 0.0;
  double var1_on = 0.0;
  double var2_on = 0.0;
};

struct SimulationResult {
  GridGeometry geom;
  double temporal_band = 0.0;  // of the sampled ensemble
  std::uint64_t seed = 0;
  int n_samples = 0;
  int blocks = 0;
  bool signal_on = false;
  std::vector<ModeStats> modes;       // canonical pairs in storage order
  std::vector<int> capacity_modes;    // indices into `modes`
  // Per-block sums of |i|^2 for capacity modes, [slot * blocks + b].
  std::vector<double> off1_blocks, off2_blocks, on1_blocks, on2_blocks;
  // Cross-mode diagnostics: recorded currents, [probe * n_samples + s].
  std::vector<int> probe_modes;  // indices into `modes`
  std::vector<cplx> probe_i1, probe_i2;
};

namespace detail {

struct PairPlan {
  int i, j;  // storage indices, i <= j
  double kappa, omega;
  bool self;
  cplx u1p, v1p, u1m, v1m;
  cplx u2p, v2p, u2m, v2m;
  double sigA;       // spectral density at the pair (even in mode sign)
  double sqrtA;      // sqrt(sigA)
  double noise1, noise2;
  int slot;          // index into SimulationResult::modes
  int cap_slot = -1; // index into capacity arrays, or -1
  int probe_slot = -1;
};

inline std::vector<PairPlan> build_plan(const RunConfig& cfg,
                                        const channel::ChannelConfig& chan) {
  const GridGeometry& geom = cfg.geom;
  std::vector<PairPlan> plan;
  plan.reserve(geom.size() / 2 + 8);
  int slot = 0;
  int cap_slot = 0;
  for (int i = 0; i < geom.size(); ++i) {
    const int j = geom.neg_index(i);
    if (j < i) continue;
    PairPlan p;
    p.i = i;
    p.j = j;
    p.kappa = geom.kappa(i);
    p.omega = geom.omega(i);
    p.self = (j == i);
    const auto c1p = chan.uv(1, geom.kappa(i), geom.omega(i));
    const auto c1m = chan.uv(1, geom.kappa(j), geom.omega(j));
    const auto c2p = chan.uv(2, geom.kappa(i), geom.omega(i));
    const auto c2m = chan.uv(2, geom.kappa(j), geom.omega(j));
    p.u1p = c1p.U; p.v1p = c1p.V; p.u1m = c1m.U; p.v1m = c1m.V;
    p.u2p = c2p.U; p.v2p = c2p.V; p.u2m = c2m.U; p.v2m = c2m.V;
    p.sigA = channel::signal_variance(cfg.ensemble, p.kappa, p.omega);
    p.sqrtA = std::sqrt(p.sigA);
    // Expected photocurrent variances realized by this plan (vacuum = 1):
    //   i1 = (U1p + V1m*) c+ + (V1p + U1m*) conj(c-),  <|c|^2> = 1/2.
    p.noise1 = 0.5 * (std::norm(p.u1p + std::conj(p.v1m)) +
                       std::norm(p.u1m + std::conj(p.v1p)));
    p.noise2 = 0.5 * (std::norm(p.u2p - std::conj(p.v2m)) +
                       std::norm(p.u2m - std::conj(p.v2p)));
    p.slot = slot++;
    const bool in_band = p.omega != 0.0 &&
                         std::abs(p.omega) <= 0.5 * cfg.ensemble.temporal_band;
    if (in_band) p.cap_slot = cap_slot++;
    plan.push_back(p);
  }
  return plan;
}

// The innermost sampling step for one pair and one sample.  Mirrors the
// grid operations exactly (same expressions, same evaluation order), so the
// fast path and the reference path agree bitwise.
struct PairKernel {
  const PairPlan& p;
  const rng::CounterRng& rng;
  bool signal_on;

  struct Currents {
    cplx i1_off, i2_off, i1_on, i2_on;
  };

  Currents sample(std::uint32_t s) const {
    const std::uint32_t block = static_cast<std::uint32_t>(p.i);
    const auto [c1p_u, c1m_u] = rng.complex_pair(s, block, rng::stream_vacuum_1);
    const auto [c2p_u, c2m_u] = rng.complex_pair(s, block, rng::stream_vacuum_2);
    const cplx c1p = inv_sqrt2 * c1p_u;
    const cplx c2p = inv_sqrt2 * c2p_u;
    const cplx c1m = p.self ? c1p : inv_sqrt2 * c1m_u;
    const cplx c2m = p.self ? c2p : inv_sqrt2 * c2m_u;

    const cplx s1p = p.u1p * c1p + p.v1p * std::conj(c1m);
    const cplx s2p = p.u2p * c2p + p.v2p * std::conj(c2m);
    const cplx s1m = p.self ? s1p : p.u1m * c1m + p.v1m * std::conj(c1p);
    const cplx s2m = p.self ? s2p : p.u2m * c2m + p.v2m * std::conj(c2p);

    const cplx e1p = (s1p + s2p) * inv_sqrt2;
    const cplx e2p = (s1p - s2p) * inv_sqrt2;
    const cplx e1m = (s1m + s2m) * inv_sqrt2;
    const cplx e2m = (s1m - s2m) * inv_sqrt2;

    const cplx b1p = (e1p + e2p) * inv_sqrt2;
    const cplx b2p = (e1p - e2p) * inv_sqrt2;
    const cplx b1m = (e1m + e2m) * inv_sqrt2;
    const cplx b2m = (e1m - e2m) * inv_sqrt2;

    Currents out;
    out.i1_off = b1p + std::conj(b1m);
    out.i2_off = mul_neg_i(b2p - std::conj(b2m));

    if (signal_on && p.sigA > 0.0) {
      const auto [ap_u, am_u] = rng.complex_pair(s, block, rng::stream_signal);
      const cplx ap = p.sqrtA * ap_u;
      const cplx am = p.self ? ap : p.sqrtA * am_u;
      // The image joins beam 1 between the beamsplitters.  Evaluation order
      // matches add_signal + beamsplit + homodyne exactly.
      const cplx g1p = e1p + ap;
      const cplx g1m = e1m + am;
      const cplx f1p = (g1p + e2p) * inv_sqrt2;
      const cplx f2p = (g1p - e2p) * inv_sqrt2;
      const cplx f1m = (g1m + e2m) * inv_sqrt2;
      const cplx f2m = (g1m - e2m) * inv_sqrt2;
      out.i1_on = f1p + std::conj(f1m);
      out.i2_on = mul_neg_i(f2p - std::conj(f2m));
    } else {
      out.i1_on = out.i1_off;
      out.i2_on = out.i2_off;
    }
    return out;
  }
};

}  // namespace detail

inline SimulationResult run_simulation(const RunConfig& cfg) {
  cfg.validate();
  const rng::CounterRng rng(cfg.seed);
  const channel::ChannelConfig chan = cfg.make_channel();
  std::vector<detail::PairPlan> plan = detail::build_plan(cfg, chan);

  SimulationResult res;
  res.geom = cfg.geom;
  res.temporal_band = cfg.ensemble.temporal_band;
  res.seed = cfg.seed;
  res.n_samples = cfg.n_samples;
  res.blocks = cfg.blocks;
  res.signal_on = cfg.signal_on;
  res.modes.resize(plan.size());

  int n_cap = 0;
  for (const auto& p : plan) {
    if (p.cap_slot >= 0) ++n_cap;
  }
  res.capacity_modes.reserve(n_cap);
  res.off1_blocks.assign(static_cast<std::size_t>(n_cap) * cfg.blocks, 0.0);
  res.off2_blocks.assign(static_cast<std::size_t>(n_cap) * cfg.blocks, 0.0);
  res.on1_blocks.assign(static_cast<std::size_t>(n_cap) * cfg.blocks, 0.0);
  res.on2_blocks.assign(static_cast<std::size_t>(n_cap) * cfg.blocks, 0.0);

  // Deterministic probe selection: evenly strided capacity modes.
  if (cfg.correlation_probes > 0 && n_cap > 0) {
    const int probes = std::min(cfg.correlation_probes, n_cap);
    const int stride = n_cap / probes;
    int assigned = 0;
    for (auto& p : plan) {
      if (p.cap_slot >= 0 && p.cap_slot % stride == 0 && assigned < probes) {
        p.probe_slot = assigned++;
      }
    }
    res.probe_modes.reserve(assigned);
    res.probe_i1.assign(static_cast<std::size_t>(assigned) * cfg.n_samples,
                        cplx{});
    res.probe_i2.assign(static_cast<std::size_t>(assigned) * cfg.n_samples,
                        cplx{});
  }

  for (const auto& p : plan) {
    ModeStats& m = res.modes[p.slot];
    m.index = p.i;
    m.kappa = p.kappa;
    m.omega = p.omega;
    m.self_paired = p.self;
    m.capacity_member = p.cap_slot >= 0;
    m.noise1 = p.noise1;
    m.noise2 = p.noise2;
    m.signal = p.sigA;
    if (p.cap_slot >= 0) res.capacity_modes.push_back(p.slot);
  }
  if (cfg.correlation_probes > 0) {
    for (const auto& p : plan) {
      if (p.probe_slot >= 0) res.probe_modes.push_back(p.slot);
    }
  }

  const int block_len = cfg.n_samples / cfg.blocks;
  auto process_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t pi = lo; pi < hi; ++pi) {
      const detail::PairPlan& p = plan[pi];
      const detail::PairKernel kernel{p, rng, cfg.signal_on};
      double t1_off = 0.0, t2_off = 0.0, t1_on = 0.0, t2_on = 0.0;
      for (int b = 0; b < cfg.blocks; ++b) {
        double b1_off = 0.0, b2_off = 0.0, b1_on = 0.0, b2_on = 0.0;
        const std::uint32_t s0 = static_cast<std::uint32_t>(b) * block_len;
        for (int k = 0; k < block_len; ++k) {
          const auto cur = kernel.sample(s0 + k);
          b1_off += std::norm(cur.i1_off);
          b2_off += std::norm(cur.i2_off);
          b1_on += std::norm(cur.i1_on);
          b2_on += std::norm(cur.i2_on);
          if (p.probe_slot >= 0) {
            const std::size_t at =
                static_cast<std::size_t>(p.probe_slot) * cfg.n_samples + s0 + k;
            res.probe_i1[at] = cur.i1_off;
            res.probe_i2[at] = cur.i2_off;
          }
        }
        if (p.cap_slot >= 0) {
          const std::size_t at =
              static_cast<std::size_t>(p.cap_slot) * cfg.blocks + b;
          res.off1_blocks[at] = b1_off;
          res.off2_blocks[at] = b2_off;
          res.on1_blocks[at] = b1_on;
          res.on2_blocks[at] = b2_on;
        }
        t1_off += b1_off;
        t2_off += b2_off;
        t1_on += b1_on;
        t2_on += b2_on;
      }
      ModeStats& m = res.modes[p.slot];
      const double inv_n = 1.0 / cfg.n_samples;
      m.var1_off = t1_off * inv_n;
      m.var2_off = t2_off * inv_n;
      m.var1_on = t1_on * inv_n;
      m.var2_on = t2_on * inv_n;
    }
  };

  if (cfg.threads == 1) {
    process_range(0, plan.size());
  } else {
    // Pairs are independent and write to disjoint slots, so any partition
    // yields bitwise-identical results.
    std::vector<std::thread> pool;
    const int n = cfg.threads;
    pool.reserve(n);
    const std::size_t chunk = (plan.size() + n - 1) / n;
    for (int t = 0; t < n; ++t) {
      const std::size_t lo = std::min(plan.size(), t * chunk);
      const std::size_t hi = std::min(plan.size(), lo + chunk);
      pool.emplace_back(process_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return res;
}

// ---------------------------------------------------------------------------
// Estimation and diagnostics

struct CapacityEstimate {
  double J_emp = 0.0;      // jackknife bias-corrected estimate
  double conf = 0.0;       // jackknife standard-error half-width
  double J_raw = 0.0;      // plug-in estimate before bias correction
  double J_lattice = 0.0;  // analytic value summed over the same lattice
  int n_samples = 0;
};

namespace detail {

inline double lattice_norm(const SimulationResult& res) {
  const GridGeometry& g = res.geom;
  const double two_pi = 2.0 * opa::pi;
  return two_pi * two_pi * two_pi /
         (res.temporal_band * g.quantization_length() *
          g.quantization_length() * g.time_window());
}

// Dimensionless information for one lattice reduction: sums
// ln(1 + sigma_A/sigma_BA) over capacity modes and both detectors, then
// scales by (2 pi)^3 / (band L^2 T).
template <class NoiseAt>
inline double lattice_sum(const SimulationResult& res,
                          SignalEstimator estimator, NoiseAt&& noise_at) {
  double sum = 0.0;
  for (std::size_t k = 0; k < res.capacity_modes.size(); ++k) {
    const ModeStats& m = res.modes[res.capacity_modes[k]];
    for (int det = 1; det <= 2; ++det) {
      const double noise = noise_at(k, det, m);
      double sig = res.signal_on ? m.signal : 0.0;
      if (estimator == SignalEstimator::difference) {
        const double on = det == 1 ? m.var1_on : m.var2_on;
        sig = std::max(0.0, on - noise);
      }
      sum += std::log1p(sig / noise);
    }
  }
  return lattice_norm(res) * sum;
}

}  // namespace detail

// Capacity estimate from recorded per-block statistics.  The noise variance
// comes from the signal-off currents; sigma_A either from the generator
// density (analytic) or from the on/off variance difference.  The
// uncertainty is a delete-one-block jackknife with bias correction.
inline CapacityEstimate estimate_capacity(const SimulationResult& res,
                                          SignalEstimator estimator =
                                              SignalEstimator::analytic) {
  // Per-mode relative error of a variance estimate is sqrt(2/n); demand
  // better than 10% before quoting an estimate at all.
  if (res.n_samples < 200) {
    throw tolerance_error(
        "estimate_capacity: fewer than 200 samples leaves per-mode variance "
        "estimates above 10% relative error",
        std::sqrt(2.0 / std::max(1, res.n_samples)), 0.1);
  }
  CapacityEstimate out;
  out.n_samples = res.n_samples;

  const int B = res.blocks;
  const int block_len = res.n_samples / B;
  const std::size_t n_cap = res.capacity_modes.size();

  // Plug-in estimate over all samples.
  auto noise_full = [&](std::size_t k, int det, const ModeStats& m) {
    (void)k;
    return det == 1 ? m.var1_off : m.var2_off;
  };
  out.J_raw = detail::lattice_sum(res, estimator, noise_full);

  // Analytic value on the same lattice (oracle for the estimate).
  auto noise_analytic = [&](std::size_t, int det, const ModeStats& m) {
    return det == 1 ? m.noise1 : m.noise2;
  };
  out.J_lattice =
      detail::lattice_sum(res, SignalEstimator::analytic, noise_analytic);

  // Delete-one-block replicates.
  std::vector<double> reps(B);
  const double leave_n = res.n_samples - block_len;
  for (int b = 0; b < B; ++b) {
    auto noise_b = [&](std::size_t k, int det, const ModeStats& m) {
      const double total =
          (det == 1 ? m.var1_off : m.var2_off) * res.n_samples;
      const std::size_t at = k * static_cast<std::size_t>(B) + b;
      const double blk = det == 1 ? res.off1_blocks[at] : res.off2_blocks[at];
      return (total - blk) / leave_n;
    };
    if (estimator == SignalEstimator::difference) {
      // For the difference estimator rebuild sigma_A per replicate too.
      double sum = 0.0;
      for (std::size_t k = 0; k < n_cap; ++k) {
        const ModeStats& m = res.modes[res.capacity_modes[k]];
        const std::size_t at = k * static_cast<std::size_t>(B) + b;
        for (int det = 1; det <= 2; ++det) {
          const double total_off =
              (det == 1 ? m.var1_off : m.var2_off) * res.n_samples;
          const double total_on =
              (det == 1 ? m.var1_on : m.var2_on) * res.n_samples;
          const double blk_off =
              det == 1 ? res.off1_blocks[at] : res.off2_blocks[at];
          const double blk_on =
              det == 1 ? res.on1_blocks[at] : res.on2_blocks[at];
          const double noise = (total_off - blk_off) / leave_n;
          const double sig =
              std::max(0.0, (total_on - blk_on) / leave_n - noise);
          sum += std::log1p(sig / noise);
        }
      }
      reps[b] = detail::lattice_norm(res) * sum;
    } else {
      reps[b] = detail::lattice_sum(res, estimator, noise_b);
    }
  }

  double mean_rep = 0.0;
  for (double r : reps) mean_rep += r;
  mean_rep /= B;
  out.J_emp = B * out.J_raw - (B - 1) * mean_rep;
  double ss = 0.0;
  for (double r : reps) ss += (r - mean_rep) * (r - mean_rep);
  out.conf = std::sqrt(ss * (B - 1) / B);
  return out;
}

// Convenience wrapper: run the sampling loop, then reduce.
inline CapacityEstimate estimate_capacity(const RunConfig& cfg) {
  const SimulationResult res = run_simulation(cfg);
  return estimate_capacity(res, cfg.estimator);
}

struct CorrelationDiagnostics {
  double max_abs_corr = 0.0;  // worst |correlation| over all probed pairs
  double threshold = 0.0;     // 4/sqrt(n_samples)
  int pairs_tested = 0;
};

// Cross-mode independence check on the recorded probe currents: distinct
// (q, Omega) pairs must be uncorrelated.  Both the Hermitian correlation
// E[x conj(y)] and the pseudo-correlation E[x y] are probed, within and
// across detectors.
inline CorrelationDiagnostics correlation_diagnostics(
    const SimulationResult& res) {
  CorrelationDiagnostics out;
  out.threshold = 4.0 / std::sqrt(static_cast<double>(res.n_samples));
  const std::size_t n_probe = res.probe_modes.size();
  if (n_probe < 2) return out;
  const int n = res.n_samples;

  auto power = [&](const std::vector<cplx>& buf, std::size_t probe) {
    double s = 0.0;
    for (int t = 0; t < n; ++t) {
      s += std::norm(buf[probe * n + t]);
    }
    return s;
  };
  auto probe_pair = [&](const std::vector<cplx>& xb, std::size_t px,
                        const std::vector<cplx>& yb, std::size_t py) {
    cplx herm{0.0, 0.0}, pseudo{0.0, 0.0};
    for (int t = 0; t < n; ++t) {
      const cplx x = xb[px * n + t];
      const cplx y = yb[py * n + t];
      herm += x * std::conj(y);
      pseudo += x * y;
    }
    const double scale = std::sqrt(power(xb, px) * power(yb, py));
    if (scale > 0.0) {
      out.max_abs_corr =
          std::max({out.max_abs_corr, std::abs(herm) / scale,
                    std::abs(pseudo) / scale});
    }
    ++out.pairs_tested;
  };

  for (std::size_t k = 0; k + 1 < n_probe; ++k) {
    probe_pair(res.probe_i1, k, res.probe_i1, k + 1);   // D1 vs D1
    probe_pair(res.probe_i2, k, res.probe_i2, k + 1);   // D2 vs D2
    probe_pair(res.probe_i1, k, res.probe_i2, k + 1);   // D1 vs D2, distinct
  }
  for (std::size_t k = 0; k < n_probe; ++k) {
    probe_pair(res.probe_i1, k, res.probe_i2, k);  // D1 vs D2, same mode
  }
  return out;
}

}  // namespace qdc::simulator
