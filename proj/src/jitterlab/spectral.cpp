#include "jitterlab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "jitterlab/rng.hpp"

namespace jitterlab {

namespace {

constexpr int kGridPoints = 512;
constexpr double kBoundaryTol = 1e-9;

}  // namespace

RationalSpectrum spectrum_from_filter(const DiscreteTF& wd) {
  wd.validate();
  RationalSpectrum s{wd};
  for (int k = 0; k < kGridPoints; ++k) {
    const double omega = M_PI * k / (kGridPoints - 1);
    require_numeric(spectrum_value(s, omega) >= -1e-9,
                    "spectrum_from_filter: spectrum negative on the unit circle");
  }
  return s;
}

double spectrum_value(const RationalSpectrum& s, double omega) {
  const Complex z(std::cos(omega), std::sin(omega));
  return std::norm(evaluate(s.base, z));
}

SpectralFactor spectral_factorize(const RationalSpectrum& s) {
  const auto num = poly_trim(s.base.num);
  const auto den = poly_trim(s.base.den);

  SpectralFactor factor;
  double gain = num[0] / den[0];
  double sv = gain * gain;

  ComplexVector zeros;
  for (const Complex& root : poly_roots(num)) {
    const double mag = std::abs(root);
    if (std::abs(mag - 1.0) <= kBoundaryTol) {
      factor.boundary_roots.push_back(root);
      zeros.push_back(root);
    } else if (mag > 1.0) {
      sv *= mag * mag;
      zeros.push_back(1.0 / std::conj(root));
    } else {
      zeros.push_back(root);
    }
  }
  ComplexVector poles;
  for (const Complex& root : poly_roots(den)) {
    const double mag = std::abs(root);
    if (std::abs(mag - 1.0) <= kBoundaryTol) {
      factor.boundary_roots.push_back(root);
      poles.push_back(root);
    } else if (mag > 1.0) {
      sv /= mag * mag;
      poles.push_back(1.0 / std::conj(root));
    } else {
      poles.push_back(root);
    }
  }

  factor.H.h = s.base.h;
  factor.H.num = poly_from_roots(zeros);
  factor.H.den = poly_from_roots(poles);
  // Zeros at the origin have unit magnitude on the circle: pad the numerator to
  // a biproper function without changing the spectrum.
  factor.H.num.resize(factor.H.den.size(), 0.0);
  factor.Sv = sv;

  // Verify the factorization identity on the evaluation grid.
  double worst = 0.0;
  double scale = 0.0;
  for (int k = 0; k < kGridPoints; ++k) {
    const double omega = M_PI * k / (kGridPoints - 1);
    const Complex z(std::cos(omega), std::sin(omega));
    const double target = spectrum_value(s, omega);
    const double produced = std::norm(evaluate(factor.H, z)) * factor.Sv;
    worst = std::max(worst, std::abs(produced - target));
    scale = std::max(scale, std::abs(target));
  }
  require_numeric(worst <= 1e-6 * std::max(scale, 1e-300),
                  "spectral_factorize: |H|^2 Sv does not reproduce S on the unit circle");
  return factor;
}

PsdEstimate estimate_psd(const std::vector<double>& x, double h, int segment_len,
                         double overlap_fraction) {
  require(h > 0.0, "estimate_psd: sample period must be positive");
  require(segment_len >= 8, "estimate_psd: segment length too small");
  require(overlap_fraction >= 0.0 && overlap_fraction < 1.0,
          "estimate_psd: overlap fraction must be in [0, 1)");
  require(x.size() >= 2 * static_cast<std::size_t>(segment_len),
          "estimate_psd: series shorter than two segments");

  const std::size_t seg = static_cast<std::size_t>(segment_len);
  const std::size_t hop =
      std::max<std::size_t>(1, static_cast<std::size_t>(seg * (1.0 - overlap_fraction)));
  const std::size_t bins = seg / 2 + 1;
  const double fs = 1.0 / h;

  // Periodic Hann window.
  std::vector<double> window(seg);
  double window_power = 0.0;
  for (std::size_t i = 0; i < seg; ++i) {
    window[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) /
                                       static_cast<double>(seg)));
    window_power += window[i] * window[i];
  }

  std::vector<double> in(seg);
  std::vector<fftw_complex> out(bins);
  fftw_plan plan = fftw_plan_dft_r2c_1d(segment_len, in.data(), out.data(), FFTW_ESTIMATE);

  std::vector<double> psd(bins, 0.0);
  std::size_t segments = 0;
  for (std::size_t start = 0; start + seg <= x.size(); start += hop) {
    const double mean =
        std::accumulate(x.begin() + static_cast<std::ptrdiff_t>(start),
                        x.begin() + static_cast<std::ptrdiff_t>(start + seg), 0.0) /
        static_cast<double>(seg);
    for (std::size_t i = 0; i < seg; ++i) in[i] = (x[start + i] - mean) * window[i];
    fftw_execute(plan);
    for (std::size_t k = 0; k < bins; ++k)
      psd[k] += out[k][0] * out[k][0] + out[k][1] * out[k][1];
    ++segments;
  }
  fftw_destroy_plan(plan);

  const double norm = 1.0 / (fs * window_power * static_cast<double>(segments));
  PsdEstimate est;
  est.segment_len = segment_len;
  est.overlap = overlap_fraction;
  est.window = "hann";
  est.freqs_hz.resize(bins);
  est.values.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    est.freqs_hz[k] = static_cast<double>(k) * fs / static_cast<double>(seg);
    double value = psd[k] * norm;
    // One-sided density: double every bin except DC and Nyquist.
    if (k != 0 && !(seg % 2 == 0 && k == bins - 1)) value *= 2.0;
    est.values[k] = value;
  }
  return est;
}

std::vector<double> synthesize_disturbance(const SpectralFactor& factor, std::size_t n,
                                           std::uint64_t seed,
                                           std::optional<double> target_rms) {
  factor.H.validate();
  require(factor.Sv >= 0.0, "synthesize_disturbance: Sv must be nonnegative");
  if (target_rms)
    require(std::isfinite(*target_rms) && *target_rms >= 0.0,
            "synthesize_disturbance: target_rms must be finite and nonnegative");
  if (n == 0) return {};

  // Warm-up: 10x the 2%-settling estimate of the slowest pole, capped at N/4.
  std::size_t warmup = 0;
  const auto den = poly_trim(factor.H.den);
  if (den.size() > 1) {
    const double rho = spectral_radius(den);
    if (rho > 0.0 && rho < 1.0) {
      const double settle = std::log(0.02) / std::log(rho);
      warmup = static_cast<std::size_t>(std::min(10.0 * settle, static_cast<double>(n) / 4.0));
    }
  }

  Rng rng(seed);
  const double sigma = std::sqrt(factor.Sv);
  std::vector<double> noise(n + warmup);
  for (double& v : noise) v = sigma * rng.normal();
  std::vector<double> filtered = filter_series(factor.H, noise);
  std::vector<double> out(filtered.begin() + static_cast<std::ptrdiff_t>(warmup),
                          filtered.end());

  if (target_rms) {
    double sum_sq = 0.0;
    for (double v : out) sum_sq += v * v;
    const double rms = std::sqrt(sum_sq / static_cast<double>(out.size()));
    const double scale = rms > 0.0 ? *target_rms / rms : 0.0;
    for (double& v : out) v *= scale;
  }
  return out;
}

std::vector<double> compensate_actuator(const std::vector<double>& reference,
                                        const DiscreteTF& ha) {
  ha.validate();
  const auto num = poly_trim(ha.num);
  const auto den = poly_trim(ha.den);

  ComplexVector offending;
  if (num.size() > 1) {
    for (const Complex& zero : poly_roots(num))
      if (std::abs(zero) >= 1.0 - kBoundaryTol) offending.push_back(zero);
  }
  if (!offending.empty()) {
    std::ostringstream msg;
    msg << "compensate_actuator: actuator is not minimum phase; zeros at";
    for (const Complex& z : offending) msg << " (" << z.real() << (z.imag() < 0 ? "-" : "+")
                                           << std::abs(z.imag()) << "i)";
    throw NumericError(msg.str());
  }

  // Delay-augmented inverse: den / (num * z^d) is proper; compensate the d-step
  // delay by extending the reference and shifting the output back.
  const std::size_t delay = den.size() - num.size();
  DiscreteTF inverse;
  inverse.h = ha.h;
  inverse.num = den;
  inverse.den = num;
  inverse.den.resize(num.size() + delay, 0.0);

  std::vector<double> extended = reference;
  if (!reference.empty())
    extended.insert(extended.end(), delay, reference.back());
  const std::vector<double> shifted = filter_series(inverse, extended);
  return {shifted.begin() + static_cast<std::ptrdiff_t>(delay), shifted.end()};
}

}  // namespace jitterlab
