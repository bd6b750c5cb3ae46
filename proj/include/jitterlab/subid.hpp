#pragma once

#include <vector>

#include "jitterlab/covtune.hpp"

namespace jitterlab {

// Window descriptor of the stacked data matrix Y_{i1,i2}^{(l)}: column j is the
// samples y_{i1+j} .. y_{i2+j} stacked top to bottom (r*(i2-i1+1) rows, l+1
// columns).
struct DataMatrixSpec {
  Eigen::Index i1 = 0;
  Eigen::Index i2 = 0;
  Eigen::Index l = 0;
};

struct SubidConfig {
  int past_window = 0;    // p; <= 0 selects by AIC over [p_min, p_max]
  int future_window = 0;  // f; <= 0 uses max(1, p - 1); must satisfy f <= p
  int order = 0;          // n; <= 0 uses the largest singular-value ratio gap
  int p_min = 1;          // AIC sweep lower bound
  int p_max = 40;         // AIC sweep upper bound (clamped to the data)
  int max_order_scan = 60;  // gap heuristic scans at most this many values
  int whiteness_lags = 50;  // residual-whiteness lags on validation data
};

struct AicCurve {
  std::vector<int> p_values;
  std::vector<double> aic;
  int p_best = 0;
};

struct StateEstimate {
  Matrix X;                // n x (l+1) recovered state sequence
  Vector singular_values;  // all singular values of the weighted product
};

struct SystemMatrices {
  Matrix Abar;    // n x n, closed loop (predictor)
  Matrix A;       // n x n, open loop (Abar + Ltilde C)
  Matrix Ltilde;  // n x r
  Matrix C;       // r x n
};

struct IdentifiedModel {
  Matrix Abar;
  Matrix A;
  Matrix Ltilde;
  Matrix C;
  int n = 0;
  int p = 0;
  int f = 0;
  double h = 0.0;

  // Diagnostics.
  Vector singular_values;              // of the weighted data product
  AicCurve aic;                        // empty p_values when p was fixed
  Matrix residuals_id;                 // (N_id - p) x r predictor residuals
  Matrix predictions_val;              // N_val x r one-step predictions
  Matrix residuals_val;                // N_val x r
  Vector vaf_validation;               // percent, one per channel
  WhitenessResult residual_whiteness;  // on validation residuals
  ComplexVector eig_open;              // eigenvalues of A
  ComplexVector eig_closed;            // eigenvalues of Abar
};

// Block-Hankel data matrix from an N x r series (rows are time steps).
Matrix build_data_matrix(const Matrix& y, const DataMatrixSpec& spec);

// Markov-parameter block row M_p = Y_{p,p} pinv(Y_{0,p-1}) with l = N - p - 1.
// Block order: leftmost block multiplies the oldest sample y_{k-p}.
Matrix estimate_markov(const Matrix& y, int p);

// AIC(p) = N_val ln det(Sigma_e(p)) + 2 p r^2 with Sigma_e the covariance of
// the one-step prediction errors of the validation set under M_p (estimated on
// identification data).  Ties resolve to the smallest p.
AicCurve select_past_window(const Matrix& y_id, const Matrix& y_val, int p_min, int p_max);

// Staircase of Markov parameters: block row i = [0_{r x ir}, M_p(:, 1:(p-i)r)].
Matrix build_m_script(const Matrix& m_p, int f, Eigen::Index r);

// SVD of the weighted product D = M Y_past; X = sqrt(Sigma_n) V_n'.
StateEstimate estimate_states(const Matrix& m_script, const Matrix& y_past, int n);

// Shift-invariance regression: X1 = [X(:,0:l-1); Yp(:,0:l-1)], X2 = X(:,1:l)
// pinv(X1); Abar = X2(:,1:n), Ltilde = X2(:,n+1:n+r), C = Yp pinv(X), and
// A = Abar + Ltilde C.
SystemMatrices estimate_system(const Matrix& x_hat, const Matrix& y_p);

// One-step predictor recursion xhat+ = Abar xhat + Ltilde y, yhat = C xhat,
// started from x0.  Returns the N x r prediction matrix.
Matrix simulate_predictor(const Matrix& abar, const Matrix& ltilde, const Matrix& c,
                          const Matrix& y, const Vector& x0);

// Percent variance accounted for, per channel, clipped at zero.
Vector vaf(const Matrix& y_true, const Matrix& y_pred);

// Full Steps 1-3 pipeline on an N x r series split into the first n_id
// identification rows and the following n_val validation rows.
IdentifiedModel identify(const Matrix& y, const SubidConfig& config, Eigen::Index n_id,
                         Eigen::Index n_val, double h);

}  // namespace jitterlab
