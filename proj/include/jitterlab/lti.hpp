#pragma once

#include <vector>

#include "jitterlab/core.hpp"

namespace jitterlab {

// Rational transfer function in s.  Coefficients in descending powers; the
// leading denominator coefficient must be nonzero and degree(num) <= degree(den).
struct ContinuousTF {
  std::vector<double> num;
  std::vector<double> den;

  void validate() const;
};

// Rational transfer function in z with sample period h.
struct DiscreteTF {
  std::vector<double> num;
  std::vector<double> den;
  double h = 0.0;

  void validate() const;
};

// Minimal state-space realization used internally by discretization and
// filtering: x' = Ax + Bu, y = Cx + Du.
struct StateSpace {
  Matrix A;
  Matrix B;
  Matrix C;
  double D = 0.0;
};

// ---- polynomial utilities (descending-power coefficient lists) ----

// Drops leading coefficients with |c| <= tol * max|c|; keeps at least one.
std::vector<double> poly_trim(const std::vector<double>& p, double tol = 0.0);
std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b);
std::vector<double> poly_add(const std::vector<double>& a, const std::vector<double>& b);
std::vector<double> poly_scale(const std::vector<double>& p, double s);
// Real-coefficient polynomial from a conjugate-closed root set (monic).
std::vector<double> poly_from_roots(const ComplexVector& roots);
Complex poly_eval(const std::vector<double>& p, Complex z);
double poly_eval(const std::vector<double>& p, double x);

// Roots via balanced companion-matrix eigenvalues.
ComplexVector poly_roots(const std::vector<double>& coeffs);

// ---- linear algebra ----

// Moore-Penrose pseudo-inverse (SVD); singular values below
// max(rows, cols) * eps * sigma_max are treated as zero.
Matrix pinv(const Matrix& m);

// Spectrum with multiplicity.
ComplexVector eigenvalues(const Matrix& a);

// Matrix exponential by scaling-and-squaring Pade approximation.
Matrix expm(const Matrix& a);

// Largest |root| of den(z) (used for settling estimates).
double spectral_radius(const std::vector<double>& den);

// ---- transfer-function operations ----

ContinuousTF cascade(const ContinuousTF& a, const ContinuousTF& b);

// Controllable-canonical realization of a proper transfer function.  The
// denominator is normalized monic first; biproper inputs produce D != 0.
StateSpace to_state_space(const std::vector<double>& num, const std::vector<double>& den);

// Single-input single-output state space back to a transfer function via
// characteristic polynomials (Faddeev-LeVerrier).
void to_transfer_function(const StateSpace& ss, std::vector<double>& num,
                          std::vector<double>& den);

// Zero-order-hold discretization via the augmented [A B; 0 0] exponential.
DiscreteTF discretize_zoh(const ContinuousTF& ctf, double h);

// Exact direct-form recursion, zero initial state.
std::vector<double> filter_series(const DiscreteTF& dtf, const std::vector<double>& u);

// True iff every root of den lies strictly inside the unit circle.
bool is_stable(const DiscreteTF& dtf);

Complex evaluate(const DiscreteTF& dtf, Complex z);
Complex evaluate(const ContinuousTF& ctf, Complex s);

}  // namespace jitterlab
