#pragma once

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "qdc/channel.hpp"
#include "qdc/errors.hpp"
#include "qdc/opa.hpp"
#include "qdc/quadrature.hpp"

// Shannon information carried by the channel: per-mode Gaussian mutual
// information and its integral over the spatio-temporal mode continuum,
// expressed per coherence area and image-frame time (dimensionless).

namespace qdc::capacity {

inline double to_bits(double nats) { return nats / std::log(2.0); }

// Gaussian mutual information of one mode: ln(1 + signal/noise), in nats.
inline double mode_information(double sigma_A, double sigma_BA) {
  if (!(sigma_BA > 0.0)) {
    throw std::domain_error("mode_information: sigma_BA must be > 0");
  }
  if (!(sigma_A >= 0.0)) {
    throw std::domain_error("mode_information: sigma_A must be >= 0");
  }
  return std::log1p(sigma_A / sigma_BA);
}

struct CapacityParams {
  double g = 0.0;
  double d_A = 1.0;
  double photon_flux = 1.0;
  opa::Correction correction = opa::Correction::none;
};

struct CapacityResult {
  double J_nats = 0.0;
  double quadrature_error = 0.0;
  bool converged = true;
  CapacityParams parameters;
};

namespace detail {

// Radius beyond which the discarded information tail is below tol/10.
// The integrand is bounded by signal/noise <= e^{2g} * signal, whose tail
// integral is photon_flux * exp(-R^2/a^2).
inline double truncation_radius(const channel::SignalEnsemble& ens, double g,
                                double tol) {
  const double a = ens.gaussian_halfwidth();
  const double budget = 10.0 * ens.photon_flux * std::exp(2.0 * g) / tol;
  const double arg = budget > 1.0 ? std::log(budget) : 0.0;
  return a * std::sqrt(std::max(4.0, arg));
}

inline double tail_bound(const channel::SignalEnsemble& ens, double g,
                         double radius) {
  const double a = ens.gaussian_halfwidth();
  return ens.photon_flux * std::exp(2.0 * g) *
         std::exp(-(radius * radius) / (a * a));
}

inline CapacityParams parameters_of(const channel::ChannelConfig& config,
                                    const channel::SignalEnsemble& ens) {
  CapacityParams out;
  out.g = config.transform().params().g;
  out.d_A = ens.d_A;
  out.photon_flux = ens.photon_flux;
  out.correction = config.transform().correction();
  return out;
}

// The uncorrected noise oscillates through the below-band region with
// period pi in (qc/2) kappa^2, so wide integration ranges contain thousands
// of wiggles that the adaptive scheme must tile panel by panel.
inline constexpr int capacity_max_panels = 60000;

}  // namespace detail

// Information-stream density from the radial integral
//   J = 2 pi Int_0^inf kappa ln(1 + sigma_A(kappa,0)/sigma_BA(kappa,0)) dkappa
// with noise evaluated at omega = 0 (signal band well inside the coherence
// bandwidth).  Adaptive quadrature to absolute tolerance tol.
inline CapacityResult information_density(const channel::ChannelConfig& config,
                                          const channel::SignalEnsemble& ens,
                                          double tol = 1e-8) {
  if (!(tol > 0.0)) {
    throw config_error("tol must be > 0");
  }
  ens.validate();
  CapacityResult out;
  out.parameters = detail::parameters_of(config, ens);
  if (ens.photon_flux == 0.0) {
    return out;
  }

  const double g = out.parameters.g;
  const double radius = detail::truncation_radius(ens, g, tol);
  const double two_pi = 2.0 * opa::pi;
  auto integrand = [&](double kappa) {
    return kappa * mode_information(channel::signal_variance(ens, kappa, 0.0),
                                    channel::noise_variance(config, 1, kappa,
                                                            0.0));
  };
  auto r = quad::integrate(integrand, 0.0, radius, 0.9 * tol / two_pi, 0.0,
                           detail::capacity_max_panels);
  out.J_nats = two_pi * r.value;
  out.quadrature_error =
      two_pi * r.error + detail::tail_bound(ens, g, radius);
  out.converged = r.converged;
  return out;
}

// The same quantity from first principles: both detectors summed, the
// temporal integral taken explicitly over the positive half of the signal
// band, and the frame-time normalization applied at the end:
//   J = (2 pi / band) Int kappa dkappa Int_0^{band/2} domega
//         Sum_n ln(1 + sigma_A/sigma_BA_n).
// Slower than the radial form; serves as a cross-check of it.
inline CapacityResult information_density_spectral(
    const channel::ChannelConfig& config, const channel::SignalEnsemble& ens,
    double tol = 1e-8) {
  if (!(tol > 0.0)) {
    throw config_error("tol must be > 0");
  }
  ens.validate();
  CapacityResult out;
  out.parameters = detail::parameters_of(config, ens);
  if (ens.photon_flux == 0.0) {
    return out;
  }

  const double g = out.parameters.g;
  const double radius = detail::truncation_radius(ens, g, tol);
  const double two_pi = 2.0 * opa::pi;
  const double band = ens.temporal_band;
  const double half_band = 0.5 * band;
  // Error budget: 0.65 tol to the outer integral, 0.25 tol to the inner
  // ones, 0.1 tol to the truncated tail.
  const double inner_tol =
      0.25 * tol * band / (opa::pi * radius * radius);
  bool inner_ok = true;

  auto inner = [&](double kappa) {
    auto f = [&](double omega) {
      const double sA = channel::signal_variance(ens, kappa, omega);
      return mode_information(sA,
                              channel::noise_variance(config, 1, kappa,
                                                      omega)) +
             mode_information(sA,
                              channel::noise_variance(config, 2, kappa,
                                                      omega));
    };
    auto r = quad::integrate(f, 0.0, half_band, inner_tol);
    if (!r.converged) inner_ok = false;
    return r.value;
  };

  auto outer = quad::integrate([&](double kappa) { return kappa * inner(kappa); },
                               0.0, radius, 0.65 * tol * band / two_pi, 0.0,
                               detail::capacity_max_panels);
  out.J_nats = (two_pi / band) * outer.value;
  out.quadrature_error = (two_pi / band) * outer.error + 0.25 * tol +
                         detail::tail_bound(ens, g, radius);
  out.converged = outer.converged && inner_ok;
  return out;
}

enum class SweepAxis { element_density, photon_flux, coupling };

// One capacity evaluation per axis value, order preserved.  Points are
// independent; `threads` workers may process them concurrently with
// bitwise-deterministic per-point results.
inline std::vector<CapacityResult> sweep(const opa::OpaParams& base_params,
                                         opa::Correction correction,
                                         const channel::SignalEnsemble& base,
                                         SweepAxis axis,
                                         const std::vector<double>& values,
                                         double tol = 1e-8, int threads = 1) {
  if (values.empty()) {
    throw config_error("sweep values must be non-empty");
  }
  for (double v : values) {
    switch (axis) {
      case SweepAxis::element_density:
        if (!(v > 0.0)) throw config_error("sweep value for d_A must be > 0");
        break;
      case SweepAxis::photon_flux:
        if (!(v >= 0.0)) throw config_error("sweep value for P must be >= 0");
        break;
      case SweepAxis::coupling:
        if (!(v >= 0.0)) throw config_error("sweep value for g must be >= 0");
        break;
    }
  }
  if (threads < 1) {
    throw config_error("threads must be >= 1");
  }

  std::vector<CapacityResult> results(values.size());
  auto evaluate_point = [&](std::size_t i) {
    opa::OpaParams p = base_params;
    channel::SignalEnsemble ens = base;
    switch (axis) {
      case SweepAxis::element_density:
        ens.d_A = values[i];
        break;
      case SweepAxis::photon_flux:
        ens.photon_flux = values[i];
        break;
      case SweepAxis::coupling:
        p.g = values[i];
        break;
    }
    channel::ChannelConfig cfg{opa::SqueezingTransform(p, correction)};
    results[i] = information_density(cfg, ens, tol);
  };

  if (threads == 1 || values.size() == 1) {
    for (std::size_t i = 0; i < values.size(); ++i) evaluate_point(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < values.size();
         i = next.fetch_add(1)) {
      evaluate_point(i);
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<std::size_t>(threads, values.size());
  pool.reserve(n);
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return results;
}

}  // namespace qdc::capacity
