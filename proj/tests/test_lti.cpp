#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "helpers.hpp"
#include "jitterlab/lti.hpp"

using namespace jitterlab;
using testutil::conv_oracle;

namespace {

// Second-order shaping section (10 s + wn^2) / (s^2 + 2 zeta wn s + wn^2).
ContinuousTF shaping_section(double f_hz, double zeta, double gain) {
  const double wn = 2.0 * M_PI * f_hz;
  ContinuousTF tf;
  tf.num = {gain, wn * wn};
  tf.den = {1.0, 2.0 * zeta * wn, wn * wn};
  return tf;
}

std::vector<double> eq4_denominator() { return {1.0, -1.876, 1.831, -1.604, 0.8282}; }

}  // namespace

TEST_CASE("cascade multiplies numerators and denominators") {
  SUBCASE("unity element leaves a filter unchanged") {
    const ContinuousTF w1 = shaping_section(2.0, 0.05, 10.0);
    ContinuousTF unity;
    unity.num = {1.0};
    unity.den = {1.0};
    const ContinuousTF out = cascade(w1, unity);
    REQUIRE(out.num.size() == w1.num.size());
    REQUIRE(out.den.size() == w1.den.size());
    for (std::size_t i = 0; i < out.num.size(); ++i)
      CHECK(out.num[i] == doctest::Approx(w1.num[i]));
    for (std::size_t i = 0; i < out.den.size(); ++i)
      CHECK(out.den[i] == doctest::Approx(w1.den[i]));
  }

  SUBCASE("1/(s+1) times 1/(s+2) = 1/(s^2+3s+2)") {
    ContinuousTF a{{1.0}, {1.0, 1.0}};
    ContinuousTF b{{1.0}, {1.0, 2.0}};
    const ContinuousTF out = cascade(a, b);
    REQUIRE(out.num.size() == 1);
    REQUIRE(out.den.size() == 3);
    CHECK(out.num[0] == doctest::Approx(1.0));
    CHECK(out.den[0] == doctest::Approx(1.0));
    CHECK(out.den[1] == doctest::Approx(3.0));
    CHECK(out.den[2] == doctest::Approx(2.0));
  }

  SUBCASE("two second-order shaping sections give the fourth-order filter") {
    const ContinuousTF w1 = shaping_section(2.0, 0.05, 10.0);
    const ContinuousTF w2 = shaping_section(10.0, 0.05, 10.0);
    const ContinuousTF w = cascade(w1, w2);
    REQUIRE(w.den.size() == 5);  // degree 4
    REQUIRE(w.num.size() == 3);  // degree 2
    const std::vector<double> num_expect = conv_oracle(w1.num, w2.num);
    const std::vector<double> den_expect = conv_oracle(w1.den, w2.den);
    for (std::size_t i = 0; i < num_expect.size(); ++i)
      CHECK(w.num[i] == doctest::Approx(num_expect[i]).epsilon(1e-12));
    for (std::size_t i = 0; i < den_expect.size(); ++i)
      CHECK(w.den[i] == doctest::Approx(den_expect[i]).epsilon(1e-12));
  }
}

TEST_CASE("discretize_zoh matches closed forms") {
  const double h = 0.025;

  SUBCASE("integrator 1/s becomes h/(z-1)") {
    ContinuousTF integ{{1.0}, {1.0, 0.0}};
    const DiscreteTF dtf = discretize_zoh(integ, h);
    CHECK(dtf.h == doctest::Approx(h));
    for (const Complex z : {Complex(2.0, 0.0), Complex(0.3, 0.7), Complex(-1.5, 0.2)}) {
      const Complex expect = h / (z - 1.0);
      CHECK(std::abs(evaluate(dtf, z) - expect) <= 1e-12 * std::abs(expect));
    }
  }

  SUBCASE("first-order lag 1/(s+a) has the textbook ZOH equivalent") {
    const double a = 3.0;
    ContinuousTF lag{{1.0}, {1.0, a}};
    const DiscreteTF dtf = discretize_zoh(lag, h);
    const double pole = std::exp(-a * h);
    const double gain = (1.0 - pole) / a;
    for (const Complex z : {Complex(1.5, 0.0), Complex(0.1, 0.9), Complex(-0.4, -0.6)}) {
      const Complex expect = gain / (z - pole);
      CHECK(std::abs(evaluate(dtf, z) - expect) <= 1e-10 * std::abs(expect));
    }
  }

  SUBCASE("DC gain is preserved for stable filters") {
    const ContinuousTF w = cascade(shaping_section(2.0, 0.05, 10.0),
                                   shaping_section(10.0, 0.05, 10.0));
    const DiscreteTF dtf = discretize_zoh(w, h);
    const Complex dc_d = evaluate(dtf, Complex(1.0, 0.0));
    const Complex dc_c = evaluate(w, Complex(0.0, 0.0));
    CHECK(std::abs(dc_d - dc_c) <= 1e-9 * std::abs(dc_c));
  }

  SUBCASE("invalid inputs are rejected") {
    ContinuousTF lag{{1.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(discretize_zoh(lag, 0.0), ConfigError);
    ContinuousTF improper{{1.0, 0.0, 0.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(discretize_zoh(improper, h), ConfigError);
  }
}

TEST_CASE("filter_series implements the exact recursion") {
  SUBCASE("unity filter returns the input") {
    DiscreteTF unity{{1.0}, {1.0}, 0.1};
    const std::vector<double> u = {1.0, -2.0, 0.5, 3.25};
    const std::vector<double> y = filter_series(unity, u);
    REQUIRE(y.size() == u.size());
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(y[i] == doctest::Approx(u[i]));
  }

  SUBCASE("FIR impulse response reads off the numerator") {
    DiscreteTF fir{{1.0, 2.0}, {1.0, 0.0}, 0.1};
    std::vector<double> u(6, 0.0);
    u[0] = 1.0;
    const std::vector<double> y = filter_series(fir, u);
    REQUIRE(y.size() == 6);
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK(y[1] == doctest::Approx(2.0));
    for (std::size_t i = 2; i < y.size(); ++i) CHECK(y[i] == doctest::Approx(0.0));
  }

  SUBCASE("filtering is linear") {
    DiscreteTF tf{{0.2, 0.1}, {1.0, -0.7, 0.12}, 0.1};
    const std::vector<double> u = testutil::white_noise(11, 256);
    const std::vector<double> w = testutil::white_noise(12, 256);
    const double alpha = 1.75;
    const double beta = -0.4;
    std::vector<double> mix(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) mix[i] = alpha * u[i] + beta * w[i];
    const std::vector<double> lhs = filter_series(tf, mix);
    const std::vector<double> yu = filter_series(tf, u);
    const std::vector<double> yw = filter_series(tf, w);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      const double rhs = alpha * yu[i] + beta * yw[i];
      CHECK(lhs[i] == doctest::Approx(rhs).epsilon(1e-12));
    }
  }

  SUBCASE("step response of a ZOH-discretized stable filter reaches the DC gain") {
    ContinuousTF lag{{2.0}, {1.0, 4.0, 2.0}};  // stable, DC gain 1
    const DiscreteTF dtf = discretize_zoh(lag, 0.05);
    std::vector<double> step(600, 1.0);
    const std::vector<double> y = filter_series(dtf, step);
    const double dc = evaluate(lag, Complex(0.0, 0.0)).real();
    CHECK(y.back() == doctest::Approx(dc).epsilon(1e-6));
  }
}

TEST_CASE("poly_roots finds and reconstructs roots") {
  SUBCASE("z^2 - 1 has roots +1 and -1") {
    const ComplexVector roots = poly_roots({1.0, 0.0, -1.0});
    REQUIRE(roots.size() == 2);
    ComplexVector expect = {Complex(1.0, 0.0), Complex(-1.0, 0.0)};
    CHECK(testutil::complex_set_distance(roots, expect) <= 1e-10);
  }

  SUBCASE("the fourth-order jitter denominator is Schur stable") {
    const ComplexVector roots = poly_roots(eq4_denominator());
    REQUIRE(roots.size() == 4);
    for (const Complex& root : roots) CHECK(std::abs(root) < 1.0);
  }

  SUBCASE("roots reconstruct a degree-5 polynomial") {
    const ComplexVector truth = {Complex(-0.9, 0.0), Complex(-0.3, 0.0), Complex(0.2, 0.0),
                                 Complex(0.5, 0.4), Complex(0.5, -0.4)};
    const std::vector<double> coeffs = poly_from_roots(truth);
    const ComplexVector roots = poly_roots(coeffs);
    const std::vector<double> rebuilt = poly_from_roots(roots);
    REQUIRE(rebuilt.size() == coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      CHECK(rebuilt[i] == doctest::Approx(coeffs[i]).epsilon(1e-6));
  }

  SUBCASE("round trip holds up to degree 10") {
    Rng rng(77);
    ComplexVector truth;
    for (int i = 0; i < 4; ++i) {
      const double re = 0.8 * rng.uniform() - 0.4;
      const double im = 0.7 * rng.uniform() + 0.1;
      truth.push_back(Complex(re, im));
      truth.push_back(Complex(re, -im));
    }
    truth.push_back(Complex(0.95, 0.0));
    truth.push_back(Complex(-0.65, 0.0));
    const std::vector<double> coeffs = poly_from_roots(truth);
    const std::vector<double> rebuilt = poly_from_roots(poly_roots(coeffs));
    REQUIRE(rebuilt.size() == coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      CHECK(rebuilt[i] == doctest::Approx(coeffs[i]).epsilon(1e-6));
  }

  SUBCASE("degenerate polynomials") {
    CHECK_THROWS_AS(poly_roots({0.0, 0.0}), ConfigError);
    CHECK(poly_roots({5.0}).empty());  // degree 0: no roots
  }
}

TEST_CASE("pinv satisfies the Penrose identities") {
  SUBCASE("identity matrix is its own pseudo-inverse") {
    const Matrix eye = Matrix::Identity(4, 4);
    CHECK((pinv(eye) - eye).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("rank-deficient diagonal inverts only the nonzero entry") {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 2.0;
    const Matrix p = pinv(d);
    CHECK(p(0, 0) == doctest::Approx(0.5));
    CHECK(p(0, 1) == doctest::Approx(0.0));
    CHECK(p(1, 0) == doctest::Approx(0.0));
    CHECK(p(1, 1) == doctest::Approx(0.0));
  }

  SUBCASE("full-rank tall matrix gives a left inverse") {
    Rng rng(5);
    const Matrix m = testutil::random_matrix(rng, 6, 4);
    const Matrix p = pinv(m);
    CHECK((p * m - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-8);
  }

  SUBCASE("all four Penrose identities hold on a random rank-deficient matrix") {
    Rng rng(6);
    const Matrix a = testutil::random_matrix(rng, 5, 2);
    const Matrix b = testutil::random_matrix(rng, 2, 4);
    const Matrix m = a * b;  // rank 2, 5 x 4
    const Matrix p = pinv(m);
    const double scale = m.cwiseAbs().maxCoeff();
    CHECK((m * p * m - m).cwiseAbs().maxCoeff() <= 1e-8 * scale);
    CHECK((p * m * p - p).cwiseAbs().maxCoeff() <= 1e-8 * scale);
    CHECK(((m * p).transpose() - m * p).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(((p * m).transpose() - p * m).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("eigenvalues cover the standard closed forms") {
  SUBCASE("diagonal matrix") {
    Matrix d = Matrix::Zero(3, 3);
    d(0, 0) = 0.3;
    d(1, 1) = 0.4;
    d(2, 2) = 0.5;
    ComplexVector expect = {Complex(0.3, 0.0), Complex(0.4, 0.0), Complex(0.5, 0.0)};
    CHECK(testutil::complex_set_distance(eigenvalues(d), expect) <= 1e-12);
  }

  SUBCASE("scaled rotation has conjugate eigenvalues rho e^{+-i theta}") {
    const double rho = 0.85;
    const double theta = 0.7;
    Matrix rot(2, 2);
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    rot *= rho;
    ComplexVector expect = {std::polar(rho, theta), std::polar(rho, -theta)};
    CHECK(testutil::complex_set_distance(eigenvalues(rot), expect) <= 1e-12);
  }

  SUBCASE("companion matrix of the jitter denominator stays inside the unit circle") {
    const std::vector<double> den = eq4_denominator();
    Matrix companion = Matrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i) companion(0, i) = -den[static_cast<std::size_t>(i) + 1];
    for (int i = 1; i < 4; ++i) companion(i, i - 1) = 1.0;
    for (const Complex& ev : eigenvalues(companion)) CHECK(std::abs(ev) < 1.0);
  }

  SUBCASE("non-square input is rejected") {
    CHECK_THROWS_AS(eigenvalues(Matrix::Zero(2, 3)), ConfigError);
  }
}

TEST_CASE("expm matches the rotation closed form") {
  const double theta = 1.2;
  Matrix gen(2, 2);
  gen << 0.0, -theta, theta, 0.0;
  const Matrix e = expm(gen);
  CHECK(e(0, 0) == doctest::Approx(std::cos(theta)).epsilon(1e-12));
  CHECK(e(0, 1) == doctest::Approx(-std::sin(theta)).epsilon(1e-12));
  CHECK(e(1, 0) == doctest::Approx(std::sin(theta)).epsilon(1e-12));
  CHECK(e(1, 1) == doctest::Approx(std::cos(theta)).epsilon(1e-12));
}
