#pragma once

#include <cstdint>

#include "jitterlab/core.hpp"

namespace jitterlab {

// x_{k+1} = A x_k + G w_k,  y_k = C x_k + v_k,  w ~ (0, Q), v ~ (0, R).
struct NoisyStateSpace {
  Matrix A;  // n x n
  Matrix G;  // n x s
  Matrix C;  // r x n
  Matrix Q;  // s x s
  Matrix R;  // r x r
  double h = 0.0;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index s() const { return G.cols(); }
  Eigen::Index r() const { return C.rows(); }
  void validate() const;
};

struct ObserverGain {
  Matrix L;  // n x r (a-posteriori gain; the combined one-step gain is A*L)
};

// Output of the steady-state observer recursion.
struct FilterRun {
  Matrix apriori;      // N x n, rows are xhat_{k|k-1}
  Matrix aposteriori;  // N x n, rows are xhat_{k|k}
  Matrix innovations;  // N x r, rows are e_k = y_k - C xhat_{k|k-1}
};

// Constant-acceleration (alpha-beta-gamma) tracking model of one axis.
NoisyStateSpace build_abg_model(double h, double sigma_w, double sigma_v);

// Places the eigenvalues of A - (A L) C at `desired` (single-output systems,
// dual Ackermann).  Solves A L = K afterwards; singular A falls back to a
// least-squares solve with a residual check.
ObserverGain pole_place_observer(const Matrix& a, const Matrix& c,
                                 const ComplexVector& desired);

// Fixed-point iteration for P = A P A' - A P C'(C P C'+R)^-1 C P A' + Q_eff,
// started from P = Q_eff; successive change <= 1e-12 or 1e5 iterations.
Matrix solve_dare(const Matrix& a, const Matrix& c, const Matrix& q_eff, const Matrix& r);

// L_K = P C' (C P C' + R)^-1.
ObserverGain kalman_gain(const Matrix& p, const Matrix& c, const Matrix& r);

// Runs the steady-state observer (Eqs. 7-10 form) over the measurements,
// zero initial state.  `y` is N x r.
FilterRun run_observer(const NoisyStateSpace& model, const ObserverGain& gain,
                       const Matrix& y);

// Simulates the noisy model for n_samples steps from x_0 = 0 (test/bench
// support).  Returns the N x r output matrix.
Matrix simulate_noisy_model(const NoisyStateSpace& model, std::size_t n_samples,
                            std::uint64_t seed);

}  // namespace jitterlab
