#include "jitterlab/kalman.hpp"

#include <cmath>

#include "jitterlab/lti.hpp"
#include "jitterlab/rng.hpp"

namespace jitterlab {

void NoisyStateSpace::validate() const {
  require(A.rows() == A.cols(), "NoisyStateSpace: A must be square");
  require(G.rows() == A.rows(), "NoisyStateSpace: G row count must match A");
  require(C.cols() == A.rows(), "NoisyStateSpace: C column count must match A");
  require(Q.rows() == Q.cols() && Q.rows() == G.cols(),
          "NoisyStateSpace: Q must be s x s");
  require(R.rows() == R.cols() && R.rows() == C.rows(),
          "NoisyStateSpace: R must be r x r");
  require((Q - Q.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + Q.cwiseAbs().maxCoeff()),
          "NoisyStateSpace: Q must be symmetric");
  require((R - R.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + R.cwiseAbs().maxCoeff()),
          "NoisyStateSpace: R must be symmetric");
  require(h > 0.0, "NoisyStateSpace: sample period must be positive");
}

NoisyStateSpace build_abg_model(double h, double sigma_w, double sigma_v) {
  require(h > 0.0, "build_abg_model: sample period must be positive");
  require(sigma_w >= 0.0 && sigma_v >= 0.0,
          "build_abg_model: standard deviations must be nonnegative");
  NoisyStateSpace m;
  m.h = h;
  m.A = Matrix{{1.0, h, h * h / 2.0}, {0.0, 1.0, h}, {0.0, 0.0, 1.0}};
  m.G = Matrix{{h * h / 2.0}, {h}, {1.0}};
  m.C = Matrix{{1.0, 0.0, 0.0}};
  m.Q = Matrix{{sigma_w * sigma_w}};
  m.R = Matrix{{sigma_v * sigma_v}};
  return m;
}

ObserverGain pole_place_observer(const Matrix& a, const Matrix& c,
                                 const ComplexVector& desired) {
  require(a.rows() == a.cols(), "pole_place_observer: A must be square");
  require(c.rows() == 1 && c.cols() == a.rows(),
          "pole_place_observer: single-output C of matching width required");
  const Eigen::Index n = a.rows();
  require(desired.size() == static_cast<std::size_t>(n),
          "pole_place_observer: need exactly n desired poles");

  // Conjugate closure check: the characteristic polynomial must be real.
  const std::vector<double> phi = poly_from_roots(desired);
  Complex residual = 0.0;
  for (const Complex& pole : desired) residual += Complex(0.0, pole.imag());
  {
    // Rebuild with complex coefficients to detect a non-conjugate set.
    std::vector<Complex> pc{1.0};
    for (const Complex& r : desired) {
      std::vector<Complex> next(pc.size() + 1, Complex(0.0));
      for (std::size_t i = 0; i < pc.size(); ++i) {
        next[i] += pc[i];
        next[i + 1] -= pc[i] * r;
      }
      pc = std::move(next);
    }
    double imag_mag = 0.0;
    for (const Complex& coef : pc) imag_mag = std::max(imag_mag, std::abs(coef.imag()));
    require(imag_mag <= 1e-9, "pole_place_observer: complex poles must come in conjugate pairs");
  }

  // Dual Ackermann: place eig(A' - C' Kc) then K = Kc'.
  const Matrix at = a.transpose();
  const Matrix bt = c.transpose();
  Matrix ctrb(n, n);
  Matrix col = bt;
  for (Eigen::Index i = 0; i < n; ++i) {
    ctrb.col(i) = col;
    col = at * col;
  }
  Eigen::FullPivLU<Matrix> lu(ctrb);
  require(lu.isInvertible(), "pole_place_observer: (A, C) pair is not observable");

  // phi(A') with the desired characteristic polynomial (Horner form).
  Matrix phi_at = Matrix::Zero(n, n);
  for (double coef : phi) phi_at = phi_at * at + coef * Matrix::Identity(n, n);

  Eigen::RowVectorXd last = Eigen::RowVectorXd::Zero(n);
  last(n - 1) = 1.0;
  const Eigen::RowVectorXd kc = last * lu.solve(phi_at);
  const Matrix k = kc.transpose();  // eig(A - K C) = desired

  // Recover the a-posteriori gain from A L = K.
  ObserverGain gain;
  Eigen::FullPivLU<Matrix> alu(a);
  if (alu.isInvertible()) {
    gain.L = alu.solve(k);
  } else {
    gain.L = pinv(a) * k;
    require_numeric((a * gain.L - k).norm() <= 1e-8 * (1.0 + k.norm()),
                    "pole_place_observer: A L = K has no solution for singular A");
  }
  return gain;
}

Matrix solve_dare(const Matrix& a, const Matrix& c, const Matrix& q_eff, const Matrix& r) {
  require(a.rows() == a.cols(), "solve_dare: A must be square");
  require(q_eff.rows() == a.rows() && q_eff.cols() == a.rows(),
          "solve_dare: Q_eff must be n x n");
  require(c.cols() == a.rows(), "solve_dare: C width must match A");
  require(r.rows() == c.rows() && r.cols() == c.rows(), "solve_dare: R must be r x r");

  constexpr int kMaxIterations = 100000;
  Matrix p = q_eff;
  double change = 0.0;
  for (int it = 0; it < kMaxIterations; ++it) {
    const Matrix s = c * p * c.transpose() + r;
    Eigen::LDLT<Matrix> ldlt(s);
    require_numeric(ldlt.info() == Eigen::Success,
                    "solve_dare: innovation covariance not factorizable");
    const Matrix gain_term = ldlt.solve(c * p * a.transpose());
    Matrix next = a * p * a.transpose() -
                  (a * p * c.transpose()) * gain_term + q_eff;
    next = 0.5 * (next + next.transpose()).eval();
    change = (next - p).norm();
    p = next;
    if (change <= 1e-12 * (1.0 + p.norm())) break;
  }
  require_numeric(change <= 1e-12 * (1.0 + p.norm()),
                  "solve_dare: fixed-point iteration did not converge (last change " +
                      std::to_string(change) + ")");

  // Residual contract.
  const Matrix s = c * p * c.transpose() + r;
  const Matrix residual =
      p - (a * p * a.transpose() -
           (a * p * c.transpose()) * s.ldlt().solve(c * p * a.transpose()) + q_eff);
  require_numeric(residual.norm() <= 1e-9 * (1.0 + p.norm()),
                  "solve_dare: residual contract violated");
  return p;
}

ObserverGain kalman_gain(const Matrix& p, const Matrix& c, const Matrix& r) {
  const Matrix s = c * p * c.transpose() + r;
  Eigen::FullPivLU<Matrix> lu(s);
  require_numeric(lu.isInvertible(), "kalman_gain: singular innovation covariance");
  ObserverGain gain;
  gain.L = p * c.transpose() * lu.inverse();
  return gain;
}

FilterRun run_observer(const NoisyStateSpace& model, const ObserverGain& gain,
                       const Matrix& y) {
  model.validate();
  require(y.cols() == model.r(), "run_observer: measurement width must equal r");
  require(gain.L.rows() == model.n() && gain.L.cols() == model.r(),
          "run_observer: gain must be n x r");

  const Eigen::Index n_samples = y.rows();
  FilterRun run;
  run.apriori = Matrix::Zero(n_samples, model.n());
  run.aposteriori = Matrix::Zero(n_samples, model.n());
  run.innovations = Matrix::Zero(n_samples, model.r());

  Vector x_pred = Vector::Zero(model.n());
  for (Eigen::Index k = 0; k < n_samples; ++k) {
    run.apriori.row(k) = x_pred.transpose();
    const Vector innovation = y.row(k).transpose() - model.C * x_pred;
    run.innovations.row(k) = innovation.transpose();
    const Vector x_post = x_pred + gain.L * innovation;
    run.aposteriori.row(k) = x_post.transpose();
    x_pred = model.A * x_post;
  }
  return run;
}

namespace {

// Symmetric PSD square root; tolerates exactly singular covariances (LLT does
// not), so zero-noise models remain simulable.
Matrix psd_sqrt(const Matrix& m, const char* what) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  require_numeric(es.info() == Eigen::Success,
                  std::string("simulate_noisy_model: eigensolver failed for ") + what);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  require_numeric(es.eigenvalues().minCoeff() >= -1e-10 * scale,
                  std::string("simulate_noisy_model: ") + what +
                      " is not positive semidefinite");
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace

Matrix simulate_noisy_model(const NoisyStateSpace& model, std::size_t n_samples,
                            std::uint64_t seed) {
  model.validate();
  const Matrix q_chol = psd_sqrt(model.Q, "Q");
  const Matrix r_chol = psd_sqrt(model.R, "R");

  Rng rng(seed);
  auto draw = [&rng](Eigen::Index m) {
    Vector v(m);
    for (Eigen::Index i = 0; i < m; ++i) v(i) = rng.normal();
    return v;
  };

  Matrix y(static_cast<Eigen::Index>(n_samples), model.r());
  Vector x = Vector::Zero(model.n());
  for (std::size_t k = 0; k < n_samples; ++k) {
    y.row(static_cast<Eigen::Index>(k)) =
        (model.C * x + r_chol * draw(model.r())).transpose();
    x = model.A * x + model.G * (q_chol * draw(model.s()));
  }
  return y;
}

}  // namespace jitterlab
