#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "qdc/errors.hpp"

// Multimode squeezing transformation of a type-I traveling-wave parametric
// amplifier.  Each (kappa, omega) mode pair undergoes a Bogoliubov transform
//   s(q, w)  =  U(q, w) c(q, w) + V(q, w) conj(c(-q, -w)),
// and the derived squeezing-ellipse geometry (r, psi, phi) controls the
// homodyne noise downstream.  All frequencies are dimensionless: kappa in
// units of the coherence spatial frequency, omega in units of the coherence
// bandwidth.

namespace qdc::opa {

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double half_pi = pi / 2.0;

struct OpaParams {
  double g = 0.0;                  // dimensionless coupling strength, >= 0
  double detuning_offset = 0.0;    // residual collinear mismatch (2k - k_p) l
  double temporal_dispersion = 0.0;  // coefficient of omega^2 in the mismatch
  double qc_convention = 8.0;      // diffraction term = qc_convention * kappa^2

  void validate() const {
    if (!(g >= 0.0)) {
      throw config_error("g must be >= 0");
    }
    if (!(qc_convention > 0.0)) {
      throw config_error("qc_convention must be > 0");
    }
  }
};

// Accumulated wave-vector mismatch across the crystal (paraxial form).
inline double mismatch(const OpaParams& p, double kappa, double omega) {
  return p.detuning_offset + p.temporal_dispersion * omega * omega -
         p.qc_convention * kappa * kappa;
}

// Gain parameter Gamma = sqrt(g^2 - delta^2/4).  Below the gain band
// (g^2 < delta^2/4) the positive-imaginary branch is returned; downstream
// formulas only use the even combinations cosh(Gamma) and sinh(Gamma)/Gamma,
// which stay real-analytic across Gamma = 0.
inline std::complex<double> gamma(const OpaParams& p, double kappa,
                                  double omega) {
  const double d = mismatch(p, kappa, omega);
  const double w = p.g * p.g - 0.25 * d * d;
  if (w >= 0.0) {
    return {std::sqrt(w), 0.0};
  }
  return {0.0, std::sqrt(-w)};
}

namespace detail {

// cosh(sqrt(w)) continued through w < 0 as cos(sqrt(-w)); series near 0.
inline double cosh_of_sqrt(double w) {
  if (std::abs(w) < 1e-8) {
    return 1.0 + w * (0.5 + w / 24.0);
  }
  return w > 0.0 ? std::cosh(std::sqrt(w)) : std::cos(std::sqrt(-w));
}

// sinh(sqrt(w))/sqrt(w) continued through w < 0 as sin(sqrt(-w))/sqrt(-w).
inline double sinhc_of_sqrt(double w) {
  if (std::abs(w) < 1e-8) {
    return 1.0 + w * (1.0 / 6.0 + w / 120.0);
  }
  if (w > 0.0) {
    const double s = std::sqrt(w);
    return std::sinh(s) / s;
  }
  const double s = std::sqrt(-w);
  return std::sin(s) / s;
}

}  // namespace detail

struct UV {
  std::complex<double> U;
  std::complex<double> V;
};

// Bogoliubov coefficients of the amplifier, including the free-propagation
// prefactor exp{i[(k_z - k)l - delta/2]}.  In the paraxial convention the
// kappa^2 and omega^2 parts of (k_z - k)l are exactly half those of the
// mismatch, so the prefactor phase collapses to -detuning_offset/2.
inline UV uv_coefficients(const OpaParams& p, double kappa, double omega) {
  const double d = mismatch(p, kappa, omega);
  const double w = p.g * p.g - 0.25 * d * d;
  const double ch = detail::cosh_of_sqrt(w);
  const double shc = detail::sinhc_of_sqrt(w);
  const std::complex<double> pre = std::polar(1.0, -0.5 * p.detuning_offset);
  return {pre * std::complex<double>(ch, 0.5 * d * shc),
          pre * (p.g * shc)};
}

// Reduce an ellipse orientation (defined modulo pi) to [-pi/2, pi/2),
// mapping ties onto -pi/2.
inline double reduce_orientation(double psi) {
  return psi - pi * std::floor(psi / pi + 0.5);
}

// Distance between two orientations modulo pi, in [0, pi/2].
inline double orientation_distance(double a, double b) {
  return std::abs(reduce_orientation(a - b));
}

struct EllipseGeometry {
  double r;    // squeezing degree, exp(+-r) = |U| +- |V|
  double psi;  // major-axis orientation, reduced to [-pi/2, pi/2)
  double phi;  // phase of the amplified quadrature
};

// Squeezing-ellipse geometry from the coefficients at (q, w) and at the
// conjugate mode (-q, -w).  Rejects coefficient pairs that violate the
// symplectic normalization |U|^2 - |V|^2 = 1.
inline EllipseGeometry ellipse_geometry(std::complex<double> U,
                                        std::complex<double> V,
                                        std::complex<double> U_minus,
                                        std::complex<double> V_minus,
                                        double tol = 1e-6) {
  const double defect_plus = std::norm(U) - std::norm(V) - 1.0;
  const double defect_minus = std::norm(U_minus) - std::norm(V_minus) - 1.0;
  if (!(std::abs(defect_plus) <= tol) || !(std::abs(defect_minus) <= tol)) {
    throw std::invalid_argument(
        "ellipse_geometry: coefficients violate |U|^2 - |V|^2 = 1");
  }
  EllipseGeometry out;
  out.r = std::log(std::abs(U) + std::abs(V));
  out.psi = reduce_orientation(0.5 * std::arg(U * V_minus));
  out.phi = -0.5 * std::arg(U * std::conj(V_minus));
  return out;
}

enum class Correction {
  none,            // bare amplifier output
  quadratic_lens,  // thin lens: quadratic phase flattening psi at kappa = 0
  ideal,           // perfect alignment: psi == pi/2 at every (kappa, omega)
};

// Squeezing transform with a homodyne/pump phase convention applied: a
// constant phase offset rotates the orientation so psi(0,0) = pi/2, and the
// optional lens correction adds a kappa-dependent phase on top.  The phase
// is folded into U and V themselves, so consumers (noise variances and the
// Monte-Carlo simulator alike) see the corrected transform.
class SqueezingTransform {
 public:
  SqueezingTransform(const OpaParams& params, Correction correction)
      : params_(params), correction_(correction) {
    params_.validate();
    phase_offset_ = half_pi - base_orientation(0.0, 0.0);
    if (correction_ == Correction::quadratic_lens) {
      lens_coefficient_ = fit_lens_coefficient();
    }
  }

  const OpaParams& params() const { return params_; }
  Correction correction() const { return correction_; }
  double phase_offset() const { return phase_offset_; }
  double lens_coefficient() const { return lens_coefficient_; }

  // Corrected coefficients: raw transform times exp(i * correction phase).
  UV uv(double kappa, double omega) const {
    const UV raw = uv_coefficients(params_, kappa, omega);
    const std::complex<double> rot =
        std::polar(1.0, correction_phase(kappa, omega));
    return {rot * raw.U, rot * raw.V};
  }

  EllipseGeometry geometry(double kappa, double omega) const {
    const UV plus = uv(kappa, omega);
    const UV minus = uv(kappa, -omega);
    EllipseGeometry g = ellipse_geometry(plus.U, plus.V, minus.U, minus.V);
    if (correction_ == Correction::ideal) {
      // By construction psi == pi/2 exactly; bypass the arg() roundoff.
      g.psi = reduce_orientation(half_pi);
    }
    return g;
  }

 private:
  // Orientation of the uncorrected transform, kept unreduced so that
  // derivatives near the origin are smooth.
  double base_orientation(double kappa, double omega) const {
    const UV plus = uv_coefficients(params_, kappa, omega);
    const UV minus = uv_coefficients(params_, kappa, -omega);
    return 0.5 * std::arg(plus.U * minus.V);
  }

  double correction_phase(double kappa, double omega) const {
    switch (correction_) {
      case Correction::none:
        return phase_offset_;
      case Correction::quadratic_lens:
        return phase_offset_ + lens_coefficient_ * kappa * kappa;
      case Correction::ideal:
        return half_pi - base_orientation(kappa, omega);
    }
    return phase_offset_;
  }

  // Lens strength nulling d(psi)/d(kappa^2) at the origin, by Richardson
  // extrapolation of the one-sided difference quotient in t = kappa^2.
  double fit_lens_coefficient() const {
    const double psi0 = base_orientation(0.0, 0.0);
    const double t1 = 1e-4;
    const double t2 = 0.5 * t1;
    const double s1 = (base_orientation(std::sqrt(t1), 0.0) - psi0) / t1;
    const double s2 = (base_orientation(std::sqrt(t2), 0.0) - psi0) / t2;
    return -(2.0 * s2 - s1);
  }

  OpaParams params_;
  Correction correction_;
  double phase_offset_ = 0.0;
  double lens_coefficient_ = 0.0;
};

struct SpectrumSample {
  double kappa;
  double omega;
  std::complex<double> U;
  std::complex<double> V;
  double r;
  double psi;
  double phi;
};

struct SqueezingSpectrum {
  OpaParams params;
  Correction correction;
  double phase_offset;
  double lens_coefficient;
  std::vector<double> kappa_grid;
  std::vector<double> omega_grid;
  // Row-major: samples[ik * omega_grid.size() + iw].
  std::vector<SpectrumSample> samples;

  const SpectrumSample& at(std::size_t ik, std::size_t iw) const {
    return samples[ik * omega_grid.size() + iw];
  }
};

inline SqueezingSpectrum build_spectrum(const OpaParams& params,
                                        Correction correction,
                                        const std::vector<double>& kappa_grid,
                                        const std::vector<double>& omega_grid) {
  if (kappa_grid.empty() || omega_grid.empty()) {
    throw config_error("spectrum grids must be non-empty");
  }
  for (double k : kappa_grid) {
    if (!(k >= 0.0)) {
      throw config_error("spectrum kappa grid must be >= 0");
    }
  }
  SqueezingTransform t(params, correction);
  SqueezingSpectrum out;
  out.params = params;
  out.correction = correction;
  out.phase_offset = t.phase_offset();
  out.lens_coefficient = t.lens_coefficient();
  out.kappa_grid = kappa_grid;
  out.omega_grid = omega_grid;
  out.samples.reserve(kappa_grid.size() * omega_grid.size());
  for (double k : kappa_grid) {
    for (double w : omega_grid) {
      const UV uv = t.uv(k, w);
      const EllipseGeometry geo = t.geometry(k, w);
      out.samples.push_back({k, w, uv.U, uv.V, geo.r, geo.psi, geo.phi});
    }
  }
  return out;
}

}  // namespace qdc::opa
