#include "jitterlab/lti.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace jitterlab {

namespace {

double max_abs(const std::vector<double>& p) {
  double m = 0.0;
  for (double c : p) m = std::max(m, std::abs(c));
  return m;
}

void validate_rational(const std::vector<double>& num, const std::vector<double>& den,
                       const char* what) {
  require(!den.empty(), std::string(what) + ": denominator must be nonempty");
  require(!num.empty(), std::string(what) + ": numerator must be nonempty");
  const auto n = poly_trim(num);
  const auto d = poly_trim(den);
  require(d[0] != 0.0, std::string(what) + ": leading denominator coefficient is zero");
  require(n.size() <= d.size(), std::string(what) + ": transfer function must be proper");
  for (double c : num)
    require(std::isfinite(c), std::string(what) + ": non-finite numerator coefficient");
  for (double c : den)
    require(std::isfinite(c), std::string(what) + ": non-finite denominator coefficient");
}

}  // namespace

void ContinuousTF::validate() const { validate_rational(num, den, "ContinuousTF"); }

void DiscreteTF::validate() const {
  validate_rational(num, den, "DiscreteTF");
  require(h > 0.0, "DiscreteTF: sample period must be positive");
}

std::vector<double> poly_trim(const std::vector<double>& p, double tol) {
  const double cutoff = tol * max_abs(p);
  std::size_t first = 0;
  while (first + 1 < p.size() && std::abs(p[first]) <= cutoff) ++first;
  return {p.begin() + static_cast<std::ptrdiff_t>(first), p.end()};
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<double> poly_add(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(std::max(a.size(), b.size()), 0.0);
  const std::size_t oa = out.size() - a.size();
  const std::size_t ob = out.size() - b.size();
  for (std::size_t i = 0; i < a.size(); ++i) out[oa + i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[ob + i] += b[i];
  return out;
}

std::vector<double> poly_scale(const std::vector<double>& p, double s) {
  std::vector<double> out = p;
  for (double& c : out) c *= s;
  return out;
}

std::vector<double> poly_from_roots(const ComplexVector& roots) {
  std::vector<Complex> p{1.0};
  for (const Complex& r : roots) {
    std::vector<Complex> next(p.size() + 1, Complex(0.0));
    for (std::size_t i = 0; i < p.size(); ++i) {
      next[i] += p[i];
      next[i + 1] -= p[i] * r;
    }
    p = std::move(next);
  }
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i].real();
  return out;
}

Complex poly_eval(const std::vector<double>& p, Complex z) {
  Complex acc = 0.0;
  for (double c : p) acc = acc * z + c;
  return acc;
}

double poly_eval(const std::vector<double>& p, double x) {
  double acc = 0.0;
  for (double c : p) acc = acc * x + c;
  return acc;
}

ComplexVector poly_roots(const std::vector<double>& coeffs) {
  const auto p = poly_trim(coeffs);
  require(max_abs(p) > 0.0, "poly_roots: all-zero polynomial");
  const std::size_t degree = p.size() - 1;
  if (degree == 0) return {};
  // Monic normalization stabilizes the companion matrix.
  Matrix companion = Matrix::Zero(static_cast<Eigen::Index>(degree),
                                  static_cast<Eigen::Index>(degree));
  for (std::size_t i = 0; i < degree; ++i)
    companion(0, static_cast<Eigen::Index>(i)) = -p[i + 1] / p[0];
  for (std::size_t i = 1; i < degree; ++i)
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  return eigenvalues(companion);
}

Matrix pinv(const Matrix& m) {
  if (m.size() == 0) return m.transpose();
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double tol = static_cast<double>(std::max(m.rows(), m.cols())) *
                     std::numeric_limits<double>::epsilon() * (sv.size() > 0 ? sv(0) : 0.0);
  Vector inv = Vector::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

ComplexVector eigenvalues(const Matrix& a) {
  require(a.rows() == a.cols(), "eigenvalues: matrix must be square");
  if (a.rows() == 0) return {};
  Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
  require_numeric(solver.info() == Eigen::Success, "eigenvalues: solver failed to converge");
  ComplexVector out(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) out[static_cast<std::size_t>(i)] =
      solver.eigenvalues()(i);
  return out;
}

Matrix expm(const Matrix& a) {
  require(a.rows() == a.cols(), "expm: matrix must be square");
  const Eigen::Index n = a.rows();
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / 0.5))));
  }
  const Matrix scaled = a / std::pow(2.0, squarings);

  // Degree-6 Pade approximant of exp.
  static const double kPade[] = {1.0, 0.5, 5.0 / 44.0, 1.0 / 66.0, 1.0 / 792.0,
                                 1.0 / 15840.0, 1.0 / 665280.0};
  const Matrix identity = Matrix::Identity(n, n);
  Matrix power = identity;
  Matrix numerator = Matrix::Zero(n, n);
  Matrix denominator = Matrix::Zero(n, n);
  for (int k = 0; k <= 6; ++k) {
    numerator += kPade[k] * power;
    denominator += (k % 2 == 0 ? kPade[k] : -kPade[k]) * power;
    if (k < 6) power = power * scaled;
  }
  Matrix result = denominator.partialPivLu().solve(numerator);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

double spectral_radius(const std::vector<double>& den) {
  double radius = 0.0;
  for (const Complex& r : poly_roots(den)) radius = std::max(radius, std::abs(r));
  return radius;
}

ContinuousTF cascade(const ContinuousTF& a, const ContinuousTF& b) {
  a.validate();
  b.validate();
  ContinuousTF out{poly_mul(a.num, b.num), poly_mul(a.den, b.den)};
  out.validate();
  return out;
}

StateSpace to_state_space(const std::vector<double>& num, const std::vector<double>& den) {
  auto d = poly_trim(den);
  auto n = poly_trim(num);
  require(n.size() <= d.size(), "to_state_space: transfer function must be proper");
  // Normalize monic denominator.
  const double lead = d[0];
  for (double& c : d) c /= lead;
  for (double& c : n) c /= lead;

  const std::size_t order = d.size() - 1;
  StateSpace ss;
  if (order == 0) {
    ss.A = Matrix::Zero(0, 0);
    ss.B = Matrix::Zero(0, 1);
    ss.C = Matrix::Zero(1, 0);
    ss.D = n[0];
    return ss;
  }
  // Pad numerator to full length and split off the direct term.
  std::vector<double> nf(d.size(), 0.0);
  std::copy(n.begin(), n.end(), nf.begin() + static_cast<std::ptrdiff_t>(d.size() - n.size()));
  ss.D = nf[0];

  ss.A = Matrix::Zero(static_cast<Eigen::Index>(order), static_cast<Eigen::Index>(order));
  for (std::size_t i = 0; i < order; ++i) ss.A(0, static_cast<Eigen::Index>(i)) = -d[i + 1];
  for (std::size_t i = 1; i < order; ++i)
    ss.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  ss.B = Matrix::Zero(static_cast<Eigen::Index>(order), 1);
  ss.B(0, 0) = 1.0;
  ss.C = Matrix::Zero(1, static_cast<Eigen::Index>(order));
  // C holds num coefficients minus D * den coefficients.
  for (std::size_t i = 0; i < order; ++i)
    ss.C(0, static_cast<Eigen::Index>(i)) = nf[i + 1] - ss.D * d[i + 1];
  return ss;
}

namespace {

// Characteristic polynomial det(zI - A), monic, via Faddeev-LeVerrier.
std::vector<double> char_poly(const Matrix& a) {
  const Eigen::Index n = a.rows();
  std::vector<double> coeffs(static_cast<std::size_t>(n) + 1, 0.0);
  coeffs[0] = 1.0;
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    m = a * m + coeffs[static_cast<std::size_t>(k - 1)] * Matrix::Identity(n, n);
    coeffs[static_cast<std::size_t>(k)] = -(a * m).trace() / static_cast<double>(k);
  }
  return coeffs;
}

}  // namespace

void to_transfer_function(const StateSpace& ss, std::vector<double>& num,
                          std::vector<double>& den) {
  den = char_poly(ss.A);
  // C (zI-A)^-1 B numerator = det(zI - A + BC) - det(zI - A); add D * den for the
  // direct term.
  const std::vector<double> shifted = char_poly(ss.A - ss.B * ss.C);
  std::vector<double> strictly_proper = poly_add(shifted, poly_scale(den, -1.0));
  num = poly_add(strictly_proper, poly_scale(den, ss.D));
  // Remove the cancelling leading zero unless D keeps the function biproper.
  num = poly_trim(num, 1e-300);
  if (num.size() > den.size()) num.resize(den.size());
}

DiscreteTF discretize_zoh(const ContinuousTF& ctf, double h) {
  ctf.validate();
  require(h > 0.0, "discretize_zoh: sample period must be positive");
  const StateSpace ss = to_state_space(ctf.num, ctf.den);
  const Eigen::Index n = ss.A.rows();

  DiscreteTF out;
  out.h = h;
  if (n == 0) {
    out.num = {ss.D};
    out.den = {1.0};
    return out;
  }

  Matrix augmented = Matrix::Zero(n + 1, n + 1);
  augmented.topLeftCorner(n, n) = ss.A * h;
  augmented.topRightCorner(n, 1) = ss.B * h;
  const Matrix phi = expm(augmented);
  StateSpace discrete;
  discrete.A = phi.topLeftCorner(n, n);
  discrete.B = phi.topRightCorner(n, 1);
  discrete.C = ss.C;
  discrete.D = ss.D;
  to_transfer_function(discrete, out.num, out.den);
  return out;
}

std::vector<double> filter_series(const DiscreteTF& dtf, const std::vector<double>& u) {
  dtf.validate();
  const auto den = poly_trim(dtf.den);
  auto num = poly_trim(dtf.num);
  // Align numerator to the denominator length (missing high powers are zero).
  std::vector<double> b(den.size(), 0.0);
  std::copy(num.begin(), num.end(), b.begin() + static_cast<std::ptrdiff_t>(den.size() - num.size()));
  const double a0 = den[0];

  std::vector<double> y(u.size(), 0.0);
  for (std::size_t k = 0; k < u.size(); ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < b.size() && i <= k; ++i) acc += b[i] * u[k - i];
    for (std::size_t i = 1; i < den.size() && i <= k; ++i) acc -= den[i] * y[k - i];
    y[k] = acc / a0;
  }
  return y;
}

bool is_stable(const DiscreteTF& dtf) {
  const auto den = poly_trim(dtf.den);
  if (den.size() == 1) return true;
  return spectral_radius(den) < 1.0;
}

Complex evaluate(const DiscreteTF& dtf, Complex z) {
  return poly_eval(dtf.num, z) / poly_eval(dtf.den, z);
}

Complex evaluate(const ContinuousTF& ctf, Complex s) {
  return poly_eval(ctf.num, s) / poly_eval(ctf.den, s);
}

}  // namespace jitterlab
