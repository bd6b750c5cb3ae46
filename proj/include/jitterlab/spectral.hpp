#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jitterlab/lti.hpp"

namespace jitterlab {

// Rational power spectral density S(z) = base(z) * base(1/z).
struct RationalSpectrum {
  DiscreteTF base;

  double h() const { return base.h; }
};

// Minimum-phase factor H and white-noise variance S_v such that
// S(z) = H(z) * S_v * H(1/z).
struct SpectralFactor {
  DiscreteTF H;
  double Sv = 0.0;
  // Unit-circle roots (within 1e-9) that were left unflipped.
  ComplexVector boundary_roots;
};

// Welch periodogram estimate (one-sided, density scaling).
struct PsdEstimate {
  std::vector<double> freqs_hz;
  std::vector<double> values;
  int segment_len = 0;
  double overlap = 0.0;
  std::string window;
};

RationalSpectrum spectrum_from_filter(const DiscreteTF& wd);

// S evaluated at z = exp(i*omega); real and nonnegative up to rounding.
double spectrum_value(const RationalSpectrum& s, double omega);

// Root-reflection factorization: roots of the base with |root| > 1 are
// reflected to 1/conj(root) and the magnitude correction accumulates into S_v.
// The numerator is padded with zeros at the origin so H is biproper, and both
// polynomials are returned monic.
SpectralFactor spectral_factorize(const RationalSpectrum& s);

PsdEstimate estimate_psd(const std::vector<double>& x, double h, int segment_len = 1024,
                         double overlap_fraction = 0.5);

// Draws Gaussian white noise of variance S_v, filters through H, and discards a
// warm-up of 10x the 2%-settling estimate (capped at N/4).  If target_rms is
// given the result is rescaled to that exact sample RMS.
std::vector<double> synthesize_disturbance(const SpectralFactor& factor, std::size_t n,
                                           std::uint64_t seed,
                                           std::optional<double> target_rms = std::nullopt);

// Inverse-filters the reference through 1/H_a.  H_a must be minimum phase;
// strictly proper actuators use a delay-augmented inverse that consumes the
// (offline) future reference samples, so filtering the output through H_a
// recovers the reference after the transient.
std::vector<double> compensate_actuator(const std::vector<double>& reference,
                                        const DiscreteTF& ha);

}  // namespace jitterlab
