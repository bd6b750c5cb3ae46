#pragma once

#include <vector>

#include "jitterlab/kalman.hpp"

namespace jitterlab {

// Estimated innovation autocorrelation matrices A_hat_j, j = 0..N_A.
struct AutocorrelationSet {
  std::vector<Matrix> a_hat;  // N_A + 1 entries, each r x r
  int n_lags = 0;             // N_A
  std::size_t sample_count = 0;

  // Column-major stack [vec(A_0); ...; vec(A_NA)].
  Vector stacked() const;
};

// Stacked least-squares regressor of the vectorized autocorrelation algebra.
struct AlsRegressor {
  Matrix H;  // (N_A+1) r^2 rows, s^2 + r^2 columns
  Eigen::Index n = 0;
  Eigen::Index r = 0;
  Eigen::Index s = 0;
  int n_lags = 0;
};

// Box bounds on covariance entries (b1..b4 of the optimization problem).
struct CovarianceBounds {
  double diag_lo = 0.0;
  double diag_hi = 0.0;
  double off_lo = 0.0;
  double off_hi = 0.0;
};

CovarianceBounds default_bounds(double sample_variance);

struct CovarianceEstimate {
  Matrix Q;  // s x s, symmetric PSD
  Matrix R;  // r x r, diagonal PSD
  double residual = 0.0;       // || a_hat - H w ||_2 at the solution
  int iterations = 0;          // quasi-Newton iterations used
  double gradient_norm = 0.0;  // projected gradient norm at exit
};

struct WhitenessResult {
  std::vector<double> coefficients;  // r_1..r_NA
  double bound = 0.0;                // z / sqrt(N)
  int exceed_count = 0;
  int total = 0;
  double exceedance_fraction = 0.0;
  bool pass = false;
};

struct TuningIterationDiag {
  int iteration = 0;
  Matrix Q;
  Matrix R;
  double residual = 0.0;
  // Whiteness of the innovations that entered this iteration (iteration 1 uses
  // the initial pole-placed gain).
  double exceedance_fraction = 0.0;
};

struct TuningConfig {
  ComplexVector initial_poles;
  int n_lags = 200;      // N_A
  int iterations = 10;
  int transient_skip = 50;
};

struct TuningResult {
  CovarianceEstimate estimate;        // from the final iteration (no floors)
  ObserverGain gain;                  // final data-driven Kalman gain
  std::vector<TuningIterationDiag> diagnostics;
  WhitenessResult final_whiteness;    // observer re-run with the final gain
};

// Lag-weighted autocorrelation estimator:
//   A_hat_j = [(N_A - j + 1)/N_A] * [1/(N-j)] * sum_i e_i e_{i+j}'
AutocorrelationSet estimate_autocorrelations(const Matrix& innovations, int n_lags);

// Steady-state autocorrelations: P solves P = Abar P Abar' + G Q G' + A L R L' A';
// A_0 = C P C' + R, A_j = C Abar^j P C' - C Abar^{j-1} A L R.
std::vector<Matrix> theoretical_autocorrelations(const NoisyStateSpace& model,
                                                 const ObserverGain& gain, const Matrix& q,
                                                 const Matrix& r, int n_lags);

AlsRegressor build_als_regressor(const NoisyStateSpace& model, const ObserverGain& gain,
                                 int n_lags);

// Minimizes ||a_hat - H [vec(Q); vec(R)]||^2 over Q = Lambda Lambda' (lower
// triangular) and diagonal R = diag(rho^2), projected quasi-Newton descent.
CovarianceEstimate solve_covariances(const AlsRegressor& regressor, const Vector& a_hat,
                                     const CovarianceBounds& bounds);

// Normalized sample autocorrelation r_j = sum e_i e_{i+j} / sum e_i^2 with
// bounds +- z_{(1+confidence)/2} / sqrt(N).
WhitenessResult whiteness_test(const std::vector<double>& innovations, int n_lags,
                               double confidence = 0.95);

// Aggregates the per-channel whiteness tests of a multichannel sequence.
WhitenessResult whiteness_test(const Matrix& innovations, int n_lags,
                               double confidence = 0.95);

// Full tuning loop: pole placement, then `iterations` rounds of
// observer -> autocorrelations -> regressor -> covariance solve -> DARE -> gain.
TuningResult iterate_tuning(const NoisyStateSpace& model, const Matrix& y,
                            const TuningConfig& config);

// Helpers shared with subid/tests.
Matrix kron(const Matrix& a, const Matrix& b);
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols);

}  // namespace jitterlab
