#pragma once

// Shared helpers for the unit-test suites: random model generators, complex
// set comparison, and small statistics utilities.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "jitterlab/core.hpp"
#include "jitterlab/lti.hpp"
#include "jitterlab/rng.hpp"

namespace testutil {

using jitterlab::Complex;
using jitterlab::ComplexVector;
using jitterlab::Matrix;
using jitterlab::Vector;

inline Matrix random_matrix(jitterlab::Rng& rng, Eigen::Index rows, Eigen::Index cols,
                            double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
  return m;
}

inline double spectral_radius_of(const Matrix& a) {
  double radius = 0.0;
  for (const Complex& ev : jitterlab::eigenvalues(a)) radius = std::max(radius, std::abs(ev));
  return radius;
}

// Random square matrix rescaled to the requested spectral radius.
inline Matrix random_stable_matrix(jitterlab::Rng& rng, Eigen::Index n, double radius) {
  Matrix a = random_matrix(rng, n, n);
  const double rho = spectral_radius_of(a);
  if (rho > 0.0) a *= radius / rho;
  return a;
}

// Max over a minimum-weight matching of |a_i - b_j| (brute force; fine for the
// small eigenvalue sets used in tests).
inline double complex_set_distance(ComplexVector a, ComplexVector b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<std::size_t> perm(b.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  std::sort(perm.begin(), perm.end());
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double variance_of(const std::vector<double>& x) {
  const double m = mean_of(x);
  double acc = 0.0;
  for (double v : x) acc += (v - m) * (v - m);
  return acc / static_cast<double>(x.size());
}

inline double rms_of(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

inline std::vector<double> white_noise(std::uint64_t seed, std::size_t n, double sigma = 1.0) {
  jitterlab::Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = sigma * rng.normal();
  return x;
}

inline jitterlab::Matrix white_noise_matrix(std::uint64_t seed, Eigen::Index rows,
                                            Eigen::Index cols, double sigma = 1.0) {
  jitterlab::Rng rng(seed);
  jitterlab::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = sigma * rng.normal();
  return m;
}

// Hand-rolled convolution oracle, independent of poly_mul.
inline std::vector<double> conv_oracle(const std::vector<double>& a,
                                       const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace testutil
