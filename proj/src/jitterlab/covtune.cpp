#include "jitterlab/covtune.hpp"

#include <algorithm>
#include <cmath>

#include "jitterlab/lti.hpp"

namespace jitterlab {

namespace {

double spectral_radius_of(const Matrix& m) {
  double radius = 0.0;
  for (const Complex& ev : eigenvalues(m)) radius = std::max(radius, std::abs(ev));
  return radius;
}

// Standard normal quantile by bisection on erfc (monotone, full precision).
double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, "normal_quantile: p must be in (0, 1)");
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
    (cdf < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct FactorParameterization {
  Eigen::Index s = 0;
  Eigen::Index r = 0;

  Eigen::Index lambda_count() const { return s * (s + 1) / 2; }
  Eigen::Index size() const { return lambda_count() + r; }

  Matrix lambda(const Vector& theta) const {
    Matrix l = Matrix::Zero(s, s);
    Eigen::Index idx = 0;
    for (Eigen::Index j = 0; j < s; ++j)
      for (Eigen::Index i = j; i < s; ++i) l(i, j) = theta(idx++);
    return l;
  }

  Vector rho(const Vector& theta) const { return theta.tail(r); }

  // w = [vec(Q); vec(R)] for Q = Lambda Lambda', R = diag(rho^2).
  Vector weights(const Vector& theta) const {
    const Matrix l = lambda(theta);
    const Matrix q = l * l.transpose();
    Matrix rm = Matrix::Zero(r, r);
    const Vector rh = rho(theta);
    for (Eigen::Index i = 0; i < r; ++i) rm(i, i) = rh(i) * rh(i);
    Vector w(s * s + r * r);
    w.head(s * s) = vec(q);
    w.tail(r * r) = vec(rm);
    return w;
  }

  // Chain rule from the gradient w.r.t. w to the factor parameters.
  Vector gradient(const Vector& theta, const Vector& grad_w) const {
    const Matrix l = lambda(theta);
    const Vector rh = rho(theta);
    Vector grad(size());
    Eigen::Index idx = 0;
    for (Eigen::Index j = 0; j < s; ++j) {
      for (Eigen::Index i = j; i < s; ++i) {
        // dQ/dl_ij = E_ij L' + L E_ij'
        double acc = 0.0;
        for (Eigen::Index c = 0; c < s; ++c) {
          acc += grad_w(c * s + i) * l(c, j);   // (E_ij L')(i, c) entries
          acc += grad_w(i * s + c) * l(c, j);   // (L E_ij')(c, i) entries
        }
        grad(idx++) = acc;
      }
    }
    for (Eigen::Index i = 0; i < r; ++i)
      grad(lambda_count() + i) = grad_w(s * s + i * r + i) * 2.0 * rh(i);
    return grad;
  }

  Vector clamp(Vector theta, const CovarianceBounds& bounds) const {
    const double diag_cap = std::sqrt(std::max(bounds.diag_hi, 0.0));
    const double off_cap = std::sqrt(std::max(std::abs(bounds.off_hi), 0.0));
    Eigen::Index idx = 0;
    for (Eigen::Index j = 0; j < s; ++j)
      for (Eigen::Index i = j; i < s; ++i) {
        if (i == j)
          theta(idx) = std::clamp(theta(idx), 0.0, diag_cap);
        else
          theta(idx) = std::clamp(theta(idx), -off_cap, off_cap);
        ++idx;
      }
    for (Eigen::Index i = 0; i < r; ++i)
      theta(lambda_count() + i) = std::clamp(theta(lambda_count() + i), 0.0,
                                             std::sqrt(std::max(bounds.diag_hi, 0.0)));
    return theta;
  }
};

// Principal-minor (Sylvester) validation for s <= 3, eigenvalue check beyond.
void validate_minors(const Matrix& q, double slack) {
  const Eigen::Index s = q.rows();
  const double tol = -slack * std::max(1.0, q.cwiseAbs().maxCoeff());
  if (s >= 1) require_numeric(q(0, 0) >= tol, "solve_covariances: Q11 minor violated");
  if (s >= 2) {
    require_numeric(q(1, 1) >= tol, "solve_covariances: Q22 minor violated");
    require_numeric(q(0, 0) * q(1, 1) - q(0, 1) * q(1, 0) >= tol,
                    "solve_covariances: 2x2 minor violated");
  }
  if (s >= 3) {
    require_numeric(q(2, 2) >= tol, "solve_covariances: Q33 minor violated");
    require_numeric(q(0, 0) * q(2, 2) - q(0, 2) * q(2, 0) >= tol,
                    "solve_covariances: {1,3} minor violated");
    require_numeric(q(1, 1) * q(2, 2) - q(1, 2) * q(2, 1) >= tol,
                    "solve_covariances: {2,3} minor violated");
    require_numeric(q.topLeftCorner(3, 3).determinant() >= tol,
                    "solve_covariances: 3x3 determinant violated");
  }
  if (s > 3) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(q);
    require_numeric(es.eigenvalues().minCoeff() >= tol,
                    "solve_covariances: Q not positive semidefinite");
  }
}

}  // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  require(v.size() == rows * cols, "unvec: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Vector AutocorrelationSet::stacked() const {
  if (a_hat.empty()) return Vector();
  const Eigen::Index r2 = a_hat.front().size();
  Vector out(static_cast<Eigen::Index>(a_hat.size()) * r2);
  for (std::size_t j = 0; j < a_hat.size(); ++j)
    out.segment(static_cast<Eigen::Index>(j) * r2, r2) = vec(a_hat[j]);
  return out;
}

CovarianceBounds default_bounds(double sample_variance) {
  CovarianceBounds b;
  b.diag_lo = 0.0;
  b.diag_hi = 1e6 * std::max(sample_variance, 1e-300);
  b.off_hi = b.diag_hi;
  b.off_lo = -b.diag_hi;
  return b;
}

AutocorrelationSet estimate_autocorrelations(const Matrix& innovations, int n_lags) {
  const Eigen::Index n = innovations.rows();
  const Eigen::Index r = innovations.cols();
  require(n_lags >= 0, "estimate_autocorrelations: lag count must be nonnegative");
  require(n > n_lags, "estimate_autocorrelations: need more samples than lags");

  AutocorrelationSet set;
  set.n_lags = n_lags;
  set.sample_count = static_cast<std::size_t>(n);
  set.a_hat.reserve(static_cast<std::size_t>(n_lags) + 1);
  const double n_a = static_cast<double>(n_lags);
  for (int j = 0; j <= n_lags; ++j) {
    Matrix sum = Matrix::Zero(r, r);
    for (Eigen::Index i = 0; i + j < n; ++i)
      sum += innovations.row(i).transpose() * innovations.row(i + j);
    const double lag_weight = n_lags == 0 ? 1.0 : (n_a - j + 1.0) / n_a;
    set.a_hat.push_back(sum * (lag_weight / static_cast<double>(n - j)));
  }
  return set;
}

std::vector<Matrix> theoretical_autocorrelations(const NoisyStateSpace& model,
                                                 const ObserverGain& gain, const Matrix& q,
                                                 const Matrix& r, int n_lags) {
  model.validate();
  const Matrix al = model.A * gain.L;
  const Matrix abar = model.A - al * model.C;
  require_numeric(spectral_radius_of(abar) < 1.0,
                  "theoretical_autocorrelations: closed-loop matrix is unstable");

  // Lyapunov equation P = Abar P Abar' + G Q G' + A L R L' A' by vectorization.
  const Eigen::Index n = model.n();
  const Matrix rhs = model.G * q * model.G.transpose() + al * r * al.transpose();
  const Matrix lhs = Matrix::Identity(n * n, n * n) - kron(abar, abar);
  const Matrix p = unvec(lhs.partialPivLu().solve(vec(rhs)), n, n);

  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(n_lags) + 1);
  out.push_back(model.C * p * model.C.transpose() + r);
  Matrix abar_pow = Matrix::Identity(n, n);  // Abar^{j-1}
  for (int j = 1; j <= n_lags; ++j) {
    out.push_back(model.C * abar_pow * (abar * p * model.C.transpose() - al * r));
    abar_pow = abar_pow * abar;
  }
  return out;
}

AlsRegressor build_als_regressor(const NoisyStateSpace& model, const ObserverGain& gain,
                                 int n_lags) {
  model.validate();
  const Eigen::Index n = model.n();
  const Eigen::Index r = model.r();
  const Eigen::Index s = model.s();

  const Matrix al = model.A * gain.L;
  const Matrix abar = model.A - al * model.C;
  require_numeric(spectral_radius_of(abar) < 1.0,
                  "build_als_regressor: closed-loop matrix is unstable");

  const Matrix a1 = kron(abar, abar);
  const Matrix g1 = kron(model.G, model.G);
  const Matrix a2 = kron(al, al);
  const Matrix c1 = kron(model.C, model.C);
  const Matrix inv_ia1 =
      (Matrix::Identity(n * n, n * n) - a1).partialPivLu().inverse();
  const Matrix ig1 = inv_ia1 * g1;
  const Matrix ia2 = inv_ia1 * a2;

  AlsRegressor reg;
  reg.n = n;
  reg.r = r;
  reg.s = s;
  reg.n_lags = n_lags;
  reg.H = Matrix::Zero((n_lags + 1) * r * r, s * s + r * r);

  reg.H.block(0, 0, r * r, s * s) = c1 * ig1;
  reg.H.block(0, s * s, r * r, r * r) =
      Matrix::Identity(r * r, r * r) + c1 * ia2;

  Matrix abar_pow = abar;  // Abar^j
  Matrix abar_prev = Matrix::Identity(n, n);  // Abar^{j-1}
  for (int j = 1; j <= n_lags; ++j) {
    const Matrix a3 = kron(model.C, model.C * abar_pow);
    const Matrix a4 = kron(Matrix::Identity(r, r), model.C * abar_prev * al);
    reg.H.block(j * r * r, 0, r * r, s * s) = a3 * ig1;
    reg.H.block(j * r * r, s * s, r * r, r * r) = a3 * ia2 - a4;
    abar_prev = abar_pow;
    abar_pow = abar_pow * abar;
  }
  return reg;
}

CovarianceEstimate solve_covariances(const AlsRegressor& regressor, const Vector& a_hat,
                                     const CovarianceBounds& bounds) {
  require(a_hat.size() == regressor.H.rows(),
          "solve_covariances: data vector does not match regressor rows");
  require(bounds.diag_lo <= bounds.diag_hi && bounds.off_lo <= bounds.off_hi,
          "solve_covariances: infeasible bounds");
  const Eigen::Index s = regressor.s;
  const Eigen::Index r = regressor.r;
  const FactorParameterization param{s, r};

  // Seed: unconstrained least squares projected to the feasible cone. The Q
  // part keeps its off-diagonal structure: symmetrize, clip eigenvalues at
  // zero, and triangularize the matrix square root so Lambda Lambda' equals
  // the projected Q.
  const Vector w_ls = pinv(regressor.H) * a_hat;
  Vector theta = Vector::Zero(param.size());
  {
    const Matrix q_ls = unvec(w_ls.head(s * s), s, s);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (q_ls + q_ls.transpose()));
    const Matrix sqrt_q = es.eigenvectors() *
                          es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                          es.eigenvectors().transpose();
    const Eigen::HouseholderQR<Matrix> qr(sqrt_q.transpose());
    Matrix lam = qr.matrixQR().topRows(s).triangularView<Eigen::Upper>();
    lam.transposeInPlace();
    for (Eigen::Index j = 0; j < s; ++j)  // clamp() needs nonnegative diagonals
      if (lam(j, j) < 0.0) lam.col(j) = -lam.col(j);
    Eigen::Index idx = 0;
    for (Eigen::Index j = 0; j < s; ++j)
      for (Eigen::Index i = j; i < s; ++i) theta(idx++) = lam(i, j);
    const Matrix r_ls = unvec(w_ls.tail(r * r), r, r);
    for (Eigen::Index i = 0; i < r; ++i)
      theta(param.lambda_count() + i) = std::sqrt(std::max(r_ls(i, i), 0.0));
  }
  theta = param.clamp(theta, bounds);

  const auto cost_of = [&](const Vector& th) {
    return (a_hat - regressor.H * param.weights(th)).squaredNorm();
  };
  const auto grad_of = [&](const Vector& th) {
    const Vector grad_w =
        2.0 * regressor.H.transpose() * (regressor.H * param.weights(th) - a_hat);
    return param.gradient(th, grad_w);
  };
  // Projected gradient: zero outbound components at active bounds.
  const auto projected = [&](const Vector& th, Vector grad) {
    const Vector lo_probe = param.clamp(th - Vector::Constant(th.size(), 1e-14), bounds);
    const Vector hi_probe = param.clamp(th + Vector::Constant(th.size(), 1e-14), bounds);
    for (Eigen::Index i = 0; i < th.size(); ++i) {
      const bool at_lo = lo_probe(i) == th(i) && grad(i) > 0.0;
      const bool at_hi = hi_probe(i) == th(i) && grad(i) < 0.0;
      if (at_lo || at_hi) grad(i) = 0.0;
    }
    return grad;
  };

  constexpr int kMaxIterations = 500;
  constexpr double kArmijo = 1e-4;
  double cost = cost_of(theta);
  Vector grad = grad_of(theta);
  Matrix b_inv = Matrix::Identity(param.size(), param.size());
  int it = 0;
  for (; it < kMaxIterations; ++it) {
    const Vector pgrad = projected(theta, grad);
    if (pgrad.norm() <= 1e-8 * (1.0 + std::abs(cost))) break;

    Vector direction = -(b_inv * grad);
    if (direction.dot(grad) >= 0.0) {
      b_inv.setIdentity();
      direction = -grad;
    }
    // Trust cap: the first probe must stay at the scale of the iterate, or the
    // line search starts from an absurd clamped corner of the box.
    const double cap = 10.0 * std::max(1.0, theta.cwiseAbs().maxCoeff());
    const double dir_norm = direction.cwiseAbs().maxCoeff();
    if (dir_norm > cap) direction *= cap / dir_norm;
    double step = 1.0;
    Vector trial;
    double trial_cost = cost;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      trial = param.clamp(theta + step * direction, bounds);
      trial_cost = cost_of(trial);
      if (trial_cost <= cost + kArmijo * grad.dot(trial - theta)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || trial_cost >= cost) break;  // stagnation: keep best iterate

    const Vector grad_next = grad_of(trial);
    const Vector step_vec = trial - theta;
    const Vector y_vec = grad_next - grad;
    const double sy = step_vec.dot(y_vec);
    if (sy > 1e-12 * step_vec.norm() * y_vec.norm()) {
      const Matrix identity = Matrix::Identity(param.size(), param.size());
      const Matrix v = identity - (step_vec * y_vec.transpose()) / sy;
      b_inv = v * b_inv * v.transpose() + (step_vec * step_vec.transpose()) / sy;
    }
    theta = trial;
    cost = trial_cost;
    grad = grad_next;
  }

  CovarianceEstimate est;
  const Matrix lam = param.lambda(theta);
  est.Q = lam * lam.transpose();
  est.R = Matrix::Zero(r, r);
  const Vector rho = param.rho(theta);
  for (Eigen::Index i = 0; i < r; ++i) est.R(i, i) = rho(i) * rho(i);
  est.residual = std::sqrt(cost_of(theta));
  est.iterations = it;
  est.gradient_norm = projected(theta, grad_of(theta)).norm();

  validate_minors(est.Q, 1e-10);
  for (Eigen::Index i = 0; i < r; ++i)
    require_numeric(est.R(i, i) >= 0.0, "solve_covariances: negative R entry");
  return est;
}

WhitenessResult whiteness_test(const std::vector<double>& innovations, int n_lags,
                               double confidence) {
  require(static_cast<int>(innovations.size()) > n_lags,
          "whiteness_test: need more samples than lags");
  require(n_lags >= 1, "whiteness_test: need at least one lag");
  const std::size_t n = innovations.size();
  double denom = 0.0;
  for (double e : innovations) denom += e * e;
  require(denom > 0.0, "whiteness_test: zero-variance sequence");

  WhitenessResult result;
  result.total = n_lags;
  result.bound = normal_quantile(0.5 * (1.0 + confidence)) /
                 std::sqrt(static_cast<double>(n));
  result.coefficients.resize(static_cast<std::size_t>(n_lags));
  for (int j = 1; j <= n_lags; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i + static_cast<std::size_t>(j) < n; ++i)
      acc += innovations[i] * innovations[i + static_cast<std::size_t>(j)];
    const double r_j = acc / denom;
    result.coefficients[static_cast<std::size_t>(j - 1)] = r_j;
    if (std::abs(r_j) > result.bound) ++result.exceed_count;
  }
  result.exceedance_fraction =
      static_cast<double>(result.exceed_count) / static_cast<double>(n_lags);
  result.pass = result.exceedance_fraction <= 1.0 - confidence;
  return result;
}

WhitenessResult whiteness_test(const Matrix& innovations, int n_lags, double confidence) {
  require(innovations.cols() >= 1, "whiteness_test: need at least one channel");
  WhitenessResult combined;
  for (Eigen::Index c = 0; c < innovations.cols(); ++c) {
    std::vector<double> channel(static_cast<std::size_t>(innovations.rows()));
    for (Eigen::Index i = 0; i < innovations.rows(); ++i)
      channel[static_cast<std::size_t>(i)] = innovations(i, c);
    const WhitenessResult one = whiteness_test(channel, n_lags, confidence);
    if (c == 0) {
      combined = one;
    } else {
      combined.exceed_count += one.exceed_count;
      combined.total += one.total;
      combined.coefficients.insert(combined.coefficients.end(), one.coefficients.begin(),
                                   one.coefficients.end());
    }
  }
  combined.exceedance_fraction =
      static_cast<double>(combined.exceed_count) / static_cast<double>(combined.total);
  combined.pass = combined.exceedance_fraction <= 1.0 - confidence;
  return combined;
}

TuningResult iterate_tuning(const NoisyStateSpace& model, const Matrix& y,
                            const TuningConfig& config) {
  model.validate();
  require(config.iterations >= 1, "iterate_tuning: need at least one iteration");
  require(config.n_lags >= 1, "iterate_tuning: need at least one lag");
  require(y.rows() > config.n_lags + config.transient_skip,
          "iterate_tuning: series too short for the requested lag count");
  require(model.r() == 1, "iterate_tuning: pole placement requires a single output");

  const Eigen::Index skip =
      std::min<Eigen::Index>(config.transient_skip, y.rows() / 10);

  double sample_variance = 0.0;
  {
    const double mean = y.col(0).mean();
    sample_variance = (y.col(0).array() - mean).square().sum() /
                      static_cast<double>(y.rows());
  }
  const CovarianceBounds bounds = default_bounds(sample_variance);

  TuningResult result;
  ObserverGain gain = pole_place_observer(model.A, model.C, config.initial_poles);

  for (int iteration = 1; iteration <= config.iterations; ++iteration) {
    const FilterRun run = run_observer(model, gain, y);
    const Matrix innov = run.innovations.bottomRows(run.innovations.rows() - skip);

    const AutocorrelationSet acorr = estimate_autocorrelations(innov, config.n_lags);
    const WhitenessResult whiteness = whiteness_test(innov, config.n_lags);

    AlsRegressor regressor;
    CovarianceEstimate estimate;
    try {
      regressor = build_als_regressor(model, gain, config.n_lags);
      estimate = solve_covariances(regressor, acorr.stacked(), bounds);
    } catch (const NumericError& err) {
      throw NumericError("iterate_tuning: iteration " + std::to_string(iteration) + ": " +
                         err.what());
    }

    // Floor Q/R before the Riccati step so the closed loop stays strictly
    // stable even when an early iteration collapses an estimate to zero.  The
    // reported estimates stay unfloored.
    const double innovation_variance = innov.col(0).squaredNorm() /
                                       static_cast<double>(innov.rows());
    const double floor = 1e-8 * innovation_variance;
    Matrix q_f = estimate.Q;
    Matrix r_f = estimate.R;
    for (Eigen::Index i = 0; i < q_f.rows(); ++i) q_f(i, i) = std::max(q_f(i, i), floor);
    for (Eigen::Index i = 0; i < r_f.rows(); ++i) r_f(i, i) = std::max(r_f(i, i), floor);

    try {
      const Matrix p = solve_dare(model.A, model.C,
                                  model.G * q_f * model.G.transpose(), r_f);
      gain = kalman_gain(p, model.C, r_f);
    } catch (const NumericError& err) {
      throw NumericError("iterate_tuning: iteration " + std::to_string(iteration) + ": " +
                         err.what());
    }

    result.diagnostics.push_back({iteration, estimate.Q, estimate.R, estimate.residual,
                                  whiteness.exceedance_fraction});
    result.estimate = estimate;
  }

  result.gain = gain;
  const FilterRun final_run = run_observer(model, gain, y);
  result.final_whiteness = whiteness_test(
      Matrix(final_run.innovations.bottomRows(final_run.innovations.rows() - skip)),
      config.n_lags);
  return result;
}

}  // namespace jitterlab
