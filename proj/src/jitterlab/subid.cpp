#include "jitterlab/subid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jitterlab/lti.hpp"

namespace jitterlab {

Matrix build_data_matrix(const Matrix& y, const DataMatrixSpec& spec) {
  require(spec.i1 >= 0 && spec.l >= 0, "build_data_matrix: negative index");
  require(spec.i2 >= spec.i1, "build_data_matrix: i2 must be >= i1");
  require(spec.i2 + spec.l < y.rows(), "build_data_matrix: window exceeds series length");
  const Eigen::Index r = y.cols();
  const Eigen::Index height = spec.i2 - spec.i1 + 1;
  Matrix out(r * height, spec.l + 1);
  for (Eigen::Index j = 0; j <= spec.l; ++j)
    for (Eigen::Index t = 0; t < height; ++t)
      out.block(t * r, j, r, 1) = y.row(spec.i1 + j + t).transpose();
  return out;
}

Matrix estimate_markov(const Matrix& y, int p) {
  require(p >= 1, "estimate_markov: past window must be positive");
  require(y.rows() > 2 * p + 1, "estimate_markov: series too short for past window");
  const Eigen::Index l = y.rows() - p - 1;
  const Matrix y_p = build_data_matrix(y, {p, p, l});
  const Matrix y_past = build_data_matrix(y, {0, p - 1, l});
  return y_p * pinv(y_past);
}

AicCurve select_past_window(const Matrix& y_id, const Matrix& y_val, int p_min, int p_max) {
  require(p_min >= 1, "select_past_window: p_min must be positive");
  require(p_max >= p_min, "select_past_window: empty past-window range");
  const Eigen::Index r = y_id.cols();
  require(y_val.cols() == r, "select_past_window: channel count mismatch");
  // Feasibility: estimate_markov needs N_id > 2p+1 and the validation
  // prediction needs at least one column (N_val > p+1).
  const int cap = static_cast<int>(
      std::min<Eigen::Index>((y_id.rows() - 2) / 2, y_val.rows() - 2));
  require(cap >= p_min, "select_past_window: series too short for the requested range");
  const int hi = std::min(p_max, cap);

  AicCurve curve;
  const double n_val = static_cast<double>(y_val.rows());
  double best = std::numeric_limits<double>::infinity();
  for (int p = p_min; p <= hi; ++p) {
    const Matrix m_p = estimate_markov(y_id, p);
    const Eigen::Index lv = y_val.rows() - p - 1;
    const Matrix y_pv = build_data_matrix(y_val, {p, p, lv});
    const Matrix y_pastv = build_data_matrix(y_val, {0, p - 1, lv});
    const Matrix err = y_pv - m_p * y_pastv;
    const Matrix sigma = err * err.transpose() / static_cast<double>(err.cols());
    // log det via LDLT-free partial-pivot LU (sigma is PSD but may be near
    // singular on degenerate data; clamp to keep the curve finite).
    Eigen::PartialPivLU<Matrix> lu(sigma);
    double log_det = 0.0;
    const Matrix& lu_m = lu.matrixLU();
    for (Eigen::Index i = 0; i < lu_m.rows(); ++i)
      log_det += std::log(std::max(std::abs(lu_m(i, i)), 1e-300));
    const double aic = n_val * log_det + 2.0 * p * static_cast<double>(r * r);
    require_numeric(std::isfinite(aic),
                    "select_past_window: non-finite AIC at p = " + std::to_string(p));
    curve.p_values.push_back(p);
    curve.aic.push_back(aic);
    if (aic < best) {
      best = aic;
      curve.p_best = p;
    }
  }
  return curve;
}

Matrix build_m_script(const Matrix& m_p, int f, Eigen::Index r) {
  require(r >= 1, "build_m_script: channel count must be positive");
  require(m_p.rows() == r && m_p.cols() % r == 0, "build_m_script: malformed Markov row");
  const Eigen::Index p = m_p.cols() / r;
  require(f >= 1 && f <= p, "build_m_script: future window must satisfy 1 <= f <= p");
  Matrix m = Matrix::Zero(f * r, p * r);
  for (Eigen::Index i = 0; i < f; ++i)
    m.block(i * r, i * r, r, (p - i) * r) = m_p.leftCols((p - i) * r);
  return m;
}

StateEstimate estimate_states(const Matrix& m_script, const Matrix& y_past, int n) {
  require(m_script.cols() == y_past.rows(), "estimate_states: dimension mismatch");
  const Matrix d = m_script * y_past;
  require_numeric(n >= 1 && n <= std::min(d.rows(), d.cols()),
                  "estimate_states: order exceeds rank bound " +
                      std::to_string(std::min(d.rows(), d.cols())));
  Eigen::BDCSVD<Matrix> svd(d, Eigen::ComputeThinU | Eigen::ComputeThinV);
  StateEstimate est;
  est.singular_values = svd.singularValues();
  est.X = est.singular_values.head(n).cwiseSqrt().asDiagonal() *
          svd.matrixV().leftCols(n).transpose();
  return est;
}

SystemMatrices estimate_system(const Matrix& x_hat, const Matrix& y_p) {
  require(x_hat.cols() == y_p.cols(), "estimate_system: column count mismatch");
  require(x_hat.cols() >= 2, "estimate_system: need at least two state columns");
  const Eigen::Index n = x_hat.rows();
  const Eigen::Index r = y_p.rows();
  const Eigen::Index l = x_hat.cols() - 1;

  Matrix x1(n + r, l);
  x1.topRows(n) = x_hat.leftCols(l);
  x1.bottomRows(r) = y_p.leftCols(l);
  const Matrix x2 = x_hat.rightCols(l) * pinv(x1);

  SystemMatrices sys;
  sys.Abar = x2.leftCols(n);
  sys.Ltilde = x2.rightCols(r);
  sys.C = y_p * pinv(x_hat);
  sys.A = sys.Abar + sys.Ltilde * sys.C;
  return sys;
}

Matrix simulate_predictor(const Matrix& abar, const Matrix& ltilde, const Matrix& c,
                          const Matrix& y, const Vector& x0) {
  const Eigen::Index n = abar.rows();
  require(abar.cols() == n && ltilde.rows() == n && c.cols() == n,
          "simulate_predictor: inconsistent matrix dimensions");
  require(ltilde.cols() == y.cols() && c.rows() == y.cols(),
          "simulate_predictor: channel count mismatch");
  require(x0.size() == n, "simulate_predictor: bad initial state");
  Matrix y_hat(y.rows(), y.cols());
  Vector x = x0;
  for (Eigen::Index k = 0; k < y.rows(); ++k) {
    y_hat.row(k) = (c * x).transpose();
    x = abar * x + ltilde * y.row(k).transpose();
  }
  return y_hat;
}

Vector vaf(const Matrix& y_true, const Matrix& y_pred) {
  require(y_true.rows() == y_pred.rows() && y_true.cols() == y_pred.cols(),
          "vaf: shape mismatch");
  require(y_true.rows() >= 2, "vaf: need at least two samples");
  Vector out(y_true.cols());
  for (Eigen::Index c = 0; c < y_true.cols(); ++c) {
    const double mean_t = y_true.col(c).mean();
    const double var_t =
        (y_true.col(c).array() - mean_t).square().sum() / static_cast<double>(y_true.rows());
    require_numeric(var_t > 0.0, "vaf: zero-variance truth channel");
    const Vector err = y_true.col(c) - y_pred.col(c);
    const double mean_e = err.mean();
    const double var_e =
        (err.array() - mean_e).square().sum() / static_cast<double>(y_true.rows());
    out(c) = std::max(0.0, 1.0 - var_e / var_t) * 100.0;
  }
  return out;
}

IdentifiedModel identify(const Matrix& y, const SubidConfig& config, Eigen::Index n_id,
                         Eigen::Index n_val, double h) {
  require(n_id >= 4 && n_val >= 2, "identify: split lengths infeasible");
  require(n_id + n_val <= y.rows(), "identify: split exceeds series length");
  const Eigen::Index r = y.cols();
  require(r >= 1, "identify: need at least one channel");

  const Matrix y_id = y.topRows(n_id);
  const Matrix y_val = y.middleRows(n_id, n_val);

  IdentifiedModel model;
  model.h = h;

  // Step 1: past window (AIC unless fixed) and Markov parameters.
  int p = config.past_window;
  if (p <= 0) {
    model.aic = select_past_window(y_id, y_val, config.p_min, config.p_max);
    p = model.aic.p_best;
  }
  require(y_id.rows() > 2 * p + 1, "identify: identification split too short for p");
  model.p = p;
  int f = config.future_window > 0 ? config.future_window : std::max(1, p - 1);
  require(f <= p, "identify: future window must satisfy f <= p");
  model.f = f;

  const Matrix m_p = estimate_markov(y_id, p);

  // Step 2: weighted product, SVD, order, states.
  const Eigen::Index l = y_id.rows() - p - 1;
  const Matrix y_past = build_data_matrix(y_id, {0, p - 1, l});
  const Matrix y_p = build_data_matrix(y_id, {p, p, l});
  const Matrix m_script = build_m_script(m_p, f, r);
  StateEstimate states = estimate_states(m_script, y_past, 1);  // order chosen below
  model.singular_values = states.singular_values;

  int n = config.order;
  if (n <= 0) {
    const Eigen::Index scan = std::min<Eigen::Index>(
        {model.singular_values.size() - 1, static_cast<Eigen::Index>(config.max_order_scan)});
    require_numeric(scan >= 1, "identify: too few singular values for order selection");
    double best_ratio = -1.0;
    for (Eigen::Index i = 0; i < scan; ++i) {
      const double denom = std::max(model.singular_values(i + 1), 1e-300);
      const double ratio = model.singular_values(i) / denom;
      if (ratio > best_ratio) {
        best_ratio = ratio;
        n = static_cast<int>(i) + 1;
      }
    }
  }
  require_numeric(n >= 1 && n <= std::min(m_script.rows(), y_past.cols()),
                  "identify: state order exceeds rank bound " +
                      std::to_string(std::min(m_script.rows(), y_past.cols())));
  model.n = n;
  states = estimate_states(m_script, y_past, n);

  // Step 3: shift-invariance regression.
  const SystemMatrices sys = estimate_system(states.X, y_p);
  model.Abar = sys.Abar;
  model.A = sys.A;
  model.Ltilde = sys.Ltilde;
  model.C = sys.C;
  model.eig_open = eigenvalues(model.A);
  model.eig_closed = eigenvalues(model.Abar);

  // Diagnostics: one continuous predictor pass from time p (first recovered
  // state), so validation predictions start from a converged filter state.
  const Matrix y_tail = y.middleRows(p, n_id + n_val - p);
  const Matrix y_hat = simulate_predictor(model.Abar, model.Ltilde, model.C, y_tail,
                                          states.X.col(0));
  model.residuals_id = y_tail.topRows(n_id - p) - y_hat.topRows(n_id - p);
  model.predictions_val = y_hat.bottomRows(n_val);
  model.residuals_val = y_val - model.predictions_val;
  model.vaf_validation = vaf(y_val, model.predictions_val);
  const int lags = std::max(
      1, std::min(config.whiteness_lags, static_cast<int>(n_val) - 1));
  model.residual_whiteness = whiteness_test(model.residuals_val, lags);
  return model;
}

}  // namespace jitterlab
