#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "qdc/errors.hpp"
#include "qdc/opa.hpp"

// The entangled two-detector channel: two identical squeezers with ellipse
// orientations a quarter turn apart feed a Mach-Zehnder pair of homodyne
// detectors, and a Gaussian ensemble of classical images rides on beam 1.

namespace qdc::channel {

struct SignalEnsemble {
  double photon_flux = 1.0;    // dimensionless flux per coherence area/frame
  double d_A = 1.0;            // relative linear density of image elements
  double temporal_band = 0.5;  // rectangular band, full width in omega

  void validate() const {
    if (!(photon_flux >= 0.0)) {
      throw config_error("P must be >= 0");
    }
    if (!(d_A > 0.0)) {
      throw config_error("d_A must be > 0");
    }
    if (!(temporal_band > 0.0)) {
      throw config_error("temporal_band must be > 0");
    }
  }

  double gaussian_halfwidth() const { return 0.5 * d_A; }

  // Peak spectral density: flux / (pi * (d_A/2)^2).
  double peak_density() const {
    const double a = gaussian_halfwidth();
    return photon_flux / (opa::pi * a * a);
  }

  // Mean photon number per mode volume: integral of the spectral density
  // over (kappa, omega) divided by (2 pi)^3.
  double integrated_flux() const {
    const double two_pi = 2.0 * opa::pi;
    return photon_flux * temporal_band / (two_pi * two_pi * two_pi);
  }
};

// Spectral density of the image ensemble: isotropic Gaussian of 1/e
// half-width d_A/2 in kappa, rectangular band in omega.
inline double signal_variance(const SignalEnsemble& ens, double kappa,
                              double omega) {
  if (std::abs(omega) > 0.5 * ens.temporal_band) {
    return 0.0;
  }
  const double a = ens.gaussian_halfwidth();
  return ens.peak_density() * std::exp(-(kappa * kappa) / (a * a));
}

// Two squeezers sharing one gain profile; channel 2's ellipse is rotated by
// -pi/2 relative to channel 1 (realized as a constant phase on U and V).
class ChannelConfig {
 public:
  explicit ChannelConfig(const opa::SqueezingTransform& transform)
      : transform_(transform) {}

  const opa::SqueezingTransform& transform() const { return transform_; }

  opa::UV uv(int detector, double kappa, double omega) const {
    opa::UV c = transform_.uv(kappa, omega);
    if (check_detector(detector) == 2) {
      // exp(-i pi/2) = -i applied to both coefficients
      c.U = std::complex<double>(c.U.imag(), -c.U.real());
      c.V = std::complex<double>(c.V.imag(), -c.V.real());
    }
    return c;
  }

  opa::EllipseGeometry geometry(int detector, double kappa,
                                double omega) const {
    opa::EllipseGeometry g = transform_.geometry(kappa, omega);
    if (check_detector(detector) == 2) {
      g.psi = opa::reduce_orientation(g.psi - opa::half_pi);
    }
    return g;
  }

 private:
  static int check_detector(int detector) {
    if (detector != 1 && detector != 2) {
      throw std::invalid_argument("detector must be 1 or 2");
    }
    return detector;
  }

  opa::SqueezingTransform transform_;
};

// Homodyne noise variance behind detector 1 or 2 (vacuum = 1).  Detector 1
// reads the cosine quadrature, detector 2 the sine quadrature, so their
// variance formulas differ; with the quarter-turn ellipse relation both
// detectors end up with the same noise.
inline double noise_variance(const ChannelConfig& config, int detector,
                             double kappa, double omega) {
  const opa::EllipseGeometry g = config.geometry(detector, kappa, omega);
  const double c = std::cos(g.psi);
  const double s = std::sin(g.psi);
  const double up = std::exp(2.0 * g.r);
  const double dn = std::exp(-2.0 * g.r);
  if (detector == 1) {
    return up * c * c + dn * s * s;
  }
  return dn * c * c + up * s * s;
}

// Total variance of the homodyne observable: quantum noise plus signal.
inline double observable_variance(const ChannelConfig& config,
                                  const SignalEnsemble& ensemble, int detector,
                                  double kappa, double omega) {
  return noise_variance(config, detector, kappa, omega) +
         signal_variance(ensemble, kappa, omega);
}

}  // namespace qdc::channel
