// Acceptance gate: ten release criteria, one printed line each.
//
// Each criterion is self-contained, prints "[PASS]" or "[FAIL]" with the
// measured numbers, and the binary exits nonzero if any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "jitterlab/covtune.hpp"
#include "jitterlab/io.hpp"
#include "jitterlab/kalman.hpp"
#include "jitterlab/lti.hpp"
#include "jitterlab/rng.hpp"
#include "jitterlab/spectral.hpp"
#include "jitterlab/subid.hpp"

using namespace jitterlab;

namespace {

namespace fs = std::filesystem;

int g_failures = 0;

void report(int index, const std::string& name, bool ok, const std::string& detail) {
  if (!ok) ++g_failures;
  std::printf("[%s] criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", index,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(4);
  out << x;
  return out.str();
}

// Hausdorff-style distance between two small eigenvalue sets via the best
// permutation matching (sets here have at most 6 elements).
double eig_set_distance(ComplexVector a, ComplexVector b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<std::size_t> perm(b.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Random degree-n monic polynomial with all roots inside |z| < radius.
std::vector<double> random_stable_poly(Rng& rng, int degree, double radius) {
  ComplexVector roots;
  while (static_cast<int>(roots.size()) < degree) {
    const double r = radius * (0.15 + 0.8 * rng.uniform());
    if (degree - static_cast<int>(roots.size()) >= 2 && rng.uniform() < 0.7) {
      const double theta = 3.0 * rng.uniform();
      roots.emplace_back(r * std::cos(theta), r * std::sin(theta));
      roots.emplace_back(r * std::cos(theta), -r * std::sin(theta));
    } else {
      roots.emplace_back(rng.uniform() < 0.5 ? r : -r, 0.0);
    }
  }
  return poly_from_roots(roots);
}

// Random n x n matrix rescaled to the requested spectral radius.
Matrix random_stable_matrix(Rng& rng, Eigen::Index n, double target_radius) {
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  double rho = 0.0;
  for (const Complex& ev : eigenvalues(a)) rho = std::max(rho, std::abs(ev));
  if (rho < 1e-12) {
    a.setZero();
    a.diagonal().setConstant(target_radius);
    return a;
  }
  return a * (target_radius / rho);
}

Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

Matrix random_spd(Rng& rng, Eigen::Index n) {
  const Matrix m = random_matrix(rng, n, n);
  return m * m.transpose() + 0.1 * Matrix::Identity(n, n);
}

// The reference shaping filter: two resonant sections in cascade.
SpectralFactor reference_factor() {
  const double zeta = 0.05;
  const double w1 = 2.0 * M_PI * 2.0;
  const double w2 = 2.0 * M_PI * 10.0;
  const ContinuousTF section1{{10.0, w1 * w1}, {1.0, 2.0 * zeta * w1, w1 * w1}};
  const ContinuousTF section2{{10.0, w2 * w2}, {1.0, 2.0 * zeta * w2, w2 * w2}};
  const DiscreteTF wd = discretize_zoh(cascade(section1, section2), 0.025);
  return spectral_factorize(spectrum_from_filter(wd));
}

// ---------------------------------------------------------------------------
// Criterion 1: the reference fourth-order factor and innovation variance.
void criterion_1() {
  const std::vector<double> den_ref{1.0, -1.876, 1.831, -1.604, 0.8282};
  const std::vector<double> num_ref{1.0, -0.05229, -0.3277, -0.06164, -3.443e-10};
  bool ok = true;
  std::string detail;
  try {
    const SpectralFactor factor = reference_factor();
    double worst = 0.0;
    ok = factor.H.den.size() == 5 && factor.H.num.size() == 5;
    if (ok) {
      for (std::size_t i = 0; i < 5; ++i) {
        const double want_num = std::abs(num_ref[i]) < 1e-6 ? 0.0 : num_ref[i];
        const double got_num = std::abs(factor.H.num[i]) < 1e-6 ? 0.0 : factor.H.num[i];
        worst = std::max(worst, std::abs(factor.H.den[i] - den_ref[i]));
        worst = std::max(worst, std::abs(got_num - want_num));
      }
      ok = worst <= 1e-3 && std::abs(factor.Sv - 0.103) <= 0.005;
    }
    detail = "max coefficient error " + fmt(worst) + ", Sv " + fmt(factor.Sv);
  } catch (const std::exception& err) {
    ok = false;
    detail = std::string("exception: ") + err.what();
  }
  report(1, "spectral factor reproduces the reference filter", ok, detail);
}

// ---------------------------------------------------------------------------
// Criterion 2: |H|^2 Sv = S on the unit circle for random stable bases.
void criterion_2() {
  bool ok = true;
  std::string detail;
  try {
    Rng rng(2024);
    double worst_rel = 0.0;
    double worst_pole = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const int order = 2 + trial % 5;
      // Zeros may land outside the unit circle so the factorization has to
      // reflect them; radius 1.4 covers both sides.
      DiscreteTF base{random_stable_poly(rng, order - 1, 1.4),
                      random_stable_poly(rng, order, 0.92), 0.025};
      base.num = poly_scale(base.num, 0.5 + rng.uniform());
      const RationalSpectrum spectrum = spectrum_from_filter(base);
      const SpectralFactor factor = spectral_factorize(spectrum);

      for (const Complex& pole : poly_roots(factor.H.den))
        worst_pole = std::max(worst_pole, std::abs(pole));
      double s_max = 0.0;
      std::vector<double> s_grid(512);
      for (int i = 0; i < 512; ++i) {
        s_grid[static_cast<std::size_t>(i)] =
            spectrum_value(spectrum, M_PI * i / 512.0);
        s_max = std::max(s_max, s_grid[static_cast<std::size_t>(i)]);
      }
      for (int i = 0; i < 512; ++i) {
        const double omega = M_PI * i / 512.0;
        const Complex h = evaluate(factor.H, std::polar(1.0, omega));
        const double rebuilt = std::norm(h) * factor.Sv;
        const double target = s_grid[static_cast<std::size_t>(i)];
        worst_rel = std::max(worst_rel, std::abs(rebuilt - target) /
                                            std::max(target, 1e-12 * s_max));
      }
    }
    ok = worst_rel <= 1e-6 && worst_pole < 1.0;
    detail = "20 filters, worst grid error " + fmt(worst_rel) +
             ", largest pole magnitude " + fmt(worst_pole);
  } catch (const std::exception& err) {
    ok = false;
    detail = std::string("exception: ") + err.what();
  }
  report(2, "factorization identity holds for random stable bases", ok, detail);
}

// ---------------------------------------------------------------------------
// Criterion 3: synthesized disturbance shows both resonances in its PSD.
void criterion_3() {
  bool ok = true;
  std::string detail;
  try {
    const SpectralFactor factor = reference_factor();
    const std::vector<double> x =
        synthesize_disturbance(factor, std::size_t{1} << 17, 97);
    const PsdEstimate psd = estimate_psd(x, 0.025, 4096);
    const auto band_peak = [&](double lo, double hi) {
      double best_f = 0.0, best_v = -1.0;
      for (std::size_t i = 0; i < psd.freqs_hz.size(); ++i) {
        if (psd.freqs_hz[i] < lo || psd.freqs_hz[i] > hi) continue;
        if (psd.values[i] > best_v) {
          best_v = psd.values[i];
          best_f = psd.freqs_hz[i];
        }
      }
      return best_f;
    };
    const double peak_low = band_peak(0.5, 6.0);
    const double peak_high = band_peak(6.0, 16.0);
    ok = std::abs(peak_low - 2.0) <= 0.5 && std::abs(peak_high - 10.0) <= 0.5;
    detail = "peaks at " + fmt(peak_low) + " Hz and " + fmt(peak_high) + " Hz";
  } catch (const std::exception& err) {
    ok = false;
    detail = std::string("exception: ") + err.what();
  }
  report(3, "synthesized disturbance reproduces the 2 Hz / 10 Hz structure", ok,
         detail);
}

// ---------------------------------------------------------------------------
// Criterion 4: DARE golden-ratio oracle plus the residual contract.
void criterion_4() {
  bool ok = true;
  std::string detail;
  try {
    const Matrix one = Matrix::Identity(1, 1);
    const Matrix p_scalar = solve_dare(one, one, one, one);
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    const double scalar_err = std::abs(p_scalar(0, 0) - golden);

    Rng rng(4004);
    double worst_residual = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::Index n = 1 + trial % 4;
      const Eigen::Index r = 1 + trial % 2;
      const Matrix a = random_stable_matrix(rng, n, 0.3 + 0.65 * rng.uniform());
      const Matrix c = random_matrix(rng, r, n);
      const Matrix q_eff = random_spd(rng, n);
      const Matrix r_cov = random_spd(rng, r);
      const Matrix p = solve_dare(a, c, q_eff, r_cov);
      const Matrix s = c * p * c.transpose() + r_cov;
      const Matrix residual = a * p * a.transpose() - p -
                              a * p * c.transpose() * s.inverse() * c * p *
                                  a.transpose() +
                              q_eff;
      worst_residual = std::max(
          residual.norm() / std::max(1.0, p.norm()), worst_residual);
    }
    ok = scalar_err <= 1e-9 && worst_residual <= 1e-8;
    detail = "golden-ratio error " + fmt(scalar_err) +
             ", worst relative residual " + fmt(worst_residual) + " over 50";
  } catch (const std::exception& err) {
    ok = false;
    detail = std::string("exception: ") + err.what();
  }
  report(4, "DARE solver passes the oracle and residual contract", ok, detail);
}

// ---------------------------------------------------------------------------
// Criterion 5: the ALS regressor linearizes the autocorrelation algebra.
void criterion_5() {
  bool ok = true;
  std::string detail;
  try {
    Rng rng(5005);
    double worst_rel = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::Index n = 1 + trial % 4;
      const Eigen::Index r = 1 + trial % 2;
      const Eigen::Index s = 1 + static_cast<Eigen::Index>(rng.uniform() * n);

      NoisyStateSpace model;
      model.A = random_stable_matrix(rng, n, 0.25 + 0.65 * rng.uniform());
      model.G = random_matrix(rng, n, s);
      model.C = random_matrix(rng, r, n);
      model.Q = Matrix::Identity(s, s);
      model.R = Matrix::Identity(r, r);
      model.h = 0.025;

      // A stabilizing gain: the steady-state Kalman gain for nominal noise.
      const Matrix p0 =
          solve_dare(model.A, model.C, model.G * model.G.transpose(), model.R);
      const ObserverGain gain = kalman_gain(p0, model.C, model.R);

      // The identity must hold for arbitrary (Q, R), not the nominal pair.
      const Matrix q = random_spd(rng, s);
      const Matrix r_cov = random_spd(rng, r);
      const int n_lags = 12;
      const std::vector<Matrix> theory =
          theoretical_autocorrelations(model, gain, q, r_cov, n_lags);
      Vector stacked((n_lags + 1) * r * r);
      for (int j = 0; j <= n_lags; ++j)
        stacked.segment(j * r * r, r * r) = vec(theory[static_cast<std::size_t>(j)]);

      const AlsRegressor regressor = build_als_regressor(model, gain, n_lags);
      Vector w(s * s + r * r);
      w.head(s * s) = vec(q);
      w.tail(r * r) = vec(r_cov);
      const double rel = (stacked - regressor.H * w).norm() / stacked.norm();
      worst_rel = std::max(worst_rel, rel);
    }
    ok = worst_rel <= 1e-9;
    detail = "worst relative mismatch " + fmt(worst_rel) + " over 50 tuples";
  } catch (const std::exception& err) {
    ok = false;
    detail = std::string("exception: ") + err.what();
  }
  report(5, "ALS regressor matches theoretical autocorrelations", ok, detail);
}

// ---------------------------------------------------------------------------
// Criterion 6: Monte-Carlo covariance recovery at the reference settings.
void criterion_6() {
  bool ok = true;
  std::string detail;
  try {
    const NoisyStateSpace truth = build_abg_model(0.0177, 0.5, 1.0);
    TuningConfig config;
    config.initial_poles = {Complex(0.3, 0.0), Complex(0.4, 0.0), Complex(0.5, 0.0)};
    config.n_lags = 200;
    config.iterations = 10;
    config.transient_skip = 50;

    double worst_rel = 0.0;
    int monotone = 0;
    for (std::uint64_t seed = 301; seed <= 310; ++seed) {
      const Matrix y = simulate_noisy_model(truth, 20000, seed);
      const TuningResult result = iterate_tuning(truth, y, config);
      const double sigma_w = std::sqrt(std::max(result.estimate.Q(0, 0), 0.0));
      const double sigma_v = std::sqrt(std::max(result.estimate.R(0, 0), 0.0));
      worst_rel = std::max(worst_rel, std::abs(sigma_w - 0.5) / 0.5);
      worst_rel = std::max(worst_rel, std::abs(sigma_v - 1.0) / 1.0);
      if (result.final_whiteness.exceedance_fraction <=
          result.diagnostics.front().exceedance_fraction)
        ++monotone;
    }
    ok = worst_rel <= 0.20 && monotone >= 9;
    detail = "worst sigma error " + fmt(100.0 * worst_rel) + "%, whiteness improved in " +
             std::to_string(monotone) + "/10 seeds";
  } catch (const std::exception& err) {
    ok = false;
    detail = std::string("exception: ") + err.what();
  }
  report(6, "tuning recovers the noise covariances over 10 seeds", ok, detail);
}

// ---------------------------------------------------------------------------
// Criterion 7: whiteness exceedance calibration on true white noise.
void criterion_7() {
  bool ok = true;
  std::string detail;
  try {
    double lo = 1.0, hi = 0.0;
    for (std::uint64_t seed = 500; seed < 520; ++seed) {
      Rng rng(seed);
      std::vector<double> e(50000);
      for (double& v : e) v = rng.normal();
      const WhitenessResult w = whiteness_test(e, 200);
      lo = std::min(lo, w.exceedance_fraction);
      hi = std::max(hi, w.exceedance_fraction);
    }
    ok = lo >= 0.01 && hi <= 0.10;
    detail = "fractions in [" + fmt(lo) + ", " + fmt(hi) + "] across 20 seeds";
  } catch (const std::exception& err) {
    ok = false;
    detail = std::string("exception: ") + err.what();
  }
  report(7, "whiteness test is calibrated on white noise", ok, detail);
}

// ---------------------------------------------------------------------------
// Criteria 8 and 9 share one identification run on a frozen 4th-order truth.
struct SpinTruth {
  Matrix a{4, 4};
  Matrix c{2, 4};
  Matrix ltilde{4, 2};

  SpinTruth() {
    a << 0.934675849283142, -0.34118331841817406, 0.0, 0.0,
        0.34118331841817406, 0.934675849283142, 0.0, 0.0,
        0.0, 0.0, 0.44906016021132156, -0.882295286460821,
        0.0, 0.0, 0.882295286460821, 0.44906016021132156;
    c << 0.345584192064786, 0.8216181435011584, 0.33043707618338714,
        -1.303157231604361,
        0.9053558666731177, 0.4463745723640113, -0.5369532353602852,
        0.5811181041963531;
    ltilde << 0.18241205497480312, 1.3605502197839099,
        0.800253448152539, -0.17049589302016682,
        -0.171676663169105, -0.5337825150964355,
        0.12705327754620113, 0.2107250169232632;
  }

  Matrix simulate(Eigen::Index n, std::uint64_t seed) const {
    Rng rng(seed);
    Matrix y(n, 2);
    Vector x = Vector::Zero(4);
    for (Eigen::Index k = 0; k < n; ++k) {
      Vector e(2);
      e << rng.normal(), rng.normal();
      y.row(k) = (c * x + e).transpose();
      x = a * x + ltilde * e;
    }
    return y;
  }
};

struct SpinContext {
  SpinTruth truth;
  Eigen::Index n_id = 2000;
  Eigen::Index n_val = 200;
  Matrix y;
  SubidConfig config;
  std::optional<IdentifiedModel> model;
  std::string error;

  SpinContext() {
    y = truth.simulate(n_id + n_val, 24);
    config.past_window = 39;
    config.future_window = 0;  // default rule f = p - 1
    config.order = 0;          // singular-value gap picks n
    try {
      model = identify(y, config, n_id, n_val, 0.025);
    } catch (const std::exception& err) {
      error = err.what();
    }
  }
};

const SpinContext& spin_context() {
  static SpinContext context;
  return context;
}

void criterion_8() {
  bool ok = true;
  std::string detail;
  const SpinContext& ctx = spin_context();
  if (!ctx.model) {
    report(8, "subspace identification recovers the 4th-order truth", false,
           "identify threw: " + ctx.error);
    return;
  }
  const IdentifiedModel& model = *ctx.model;
  const double gap = model.singular_values(4) / model.singular_values(3);
  const double vaf_min = model.vaf_validation.minCoeff();
  const double dist_open =
      eig_set_distance(model.eig_open, eigenvalues(ctx.truth.a));
  const double dist_closed = eig_set_distance(
      model.eig_closed, eigenvalues(ctx.truth.a - ctx.truth.ltilde * ctx.truth.c));
  ok = model.n == 4 && vaf_min >= 95.0 && gap <= 0.2 && dist_open <= 0.02 &&
       dist_closed <= 0.02;
  detail = "n " + std::to_string(model.n) + ", VAF min " + fmt(vaf_min) +
           ", sv gap " + fmt(gap) + ", eig distance " +
           fmt(std::max(dist_open, dist_closed));
  report(8, "subspace identification recovers the 4th-order truth", ok, detail);
}

void criterion_9() {
  bool ok = true;
  std::string detail;
  const SpinContext& ctx = spin_context();
  if (!ctx.model) {
    report(9, "predictor equivalence and basis invariance", false,
           "identify threw: " + ctx.error);
    return;
  }
  try {
    const IdentifiedModel& model = *ctx.model;
    const int p = model.p;
    const Matrix y_id = ctx.y.topRows(ctx.n_id);
    const Eigen::Index l = ctx.n_id - p - 1;

    // Rebuild the one-step predictions from the exposed primitives and check
    // they reproduce the regression residuals reported by identify().
    const Matrix m_p = estimate_markov(y_id, p);
    const Matrix y_past = build_data_matrix(y_id, {0, p - 1, l});
    const Matrix m_script = build_m_script(m_p, model.f, 2);
    const StateEstimate states = estimate_states(m_script, y_past, model.n);
    const Matrix y_window = ctx.y.middleRows(p, ctx.n_id + ctx.n_val - p);
    const Matrix y_hat = simulate_predictor(model.Abar, model.Ltilde, model.C,
                                            y_window, states.X.col(0));
    const Matrix residuals = y_window - y_hat;
    const double err_id =
        (residuals.topRows(ctx.n_id - p) - model.residuals_id).cwiseAbs().maxCoeff();
    const double err_val =
        (residuals.bottomRows(ctx.n_val) - model.residuals_val).cwiseAbs().maxCoeff();

    // A similarity transform of the truth must identify the same dynamics.
    Matrix t(4, 4);
    t << 1.0, 0.2, 0.0, -0.3,
        0.0, 1.1, 0.4, 0.0,
        -0.2, 0.0, 0.9, 0.1,
        0.0, 0.3, 0.0, 1.2;
    const Matrix t_inv = t.inverse();
    SpinTruth similar;
    similar.a = t * ctx.truth.a * t_inv;
    similar.ltilde = t * ctx.truth.ltilde;
    similar.c = ctx.truth.c * t_inv;
    const Matrix y2 = similar.simulate(ctx.n_id + ctx.n_val, 24);
    SubidConfig config2 = ctx.config;
    config2.order = 4;
    const IdentifiedModel model2 = identify(y2, config2, ctx.n_id, ctx.n_val, 0.025);
    const double eig_dist = eig_set_distance(model2.eig_open, model.eig_open);
    const double vaf_diff =
        (model2.vaf_validation - model.vaf_validation).cwiseAbs().maxCoeff();

    ok = err_id <= 1e-8 && err_val <= 1e-8 && eig_dist <= 1e-6 && vaf_diff <= 0.1;
    detail = "residual reproduction " + fmt(std::max(err_id, err_val)) +
             ", transformed eig distance " + fmt(eig_dist) + ", VAF shift " +
             fmt(vaf_diff);
  } catch (const std::exception& err) {
    ok = false;
    detail = std::string("exception: ") + err.what();
  }
  report(9, "predictor equivalence and basis invariance", ok, detail);
}

// ---------------------------------------------------------------------------
// Criterion 10: the CLI pipeline is deterministic end to end.
int run_cli(const std::string& arguments) {
  const std::string command =
      std::string(JITTERLAB_CLI_PATH) + " " + arguments + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

void criterion_10() {
  bool ok = true;
  std::string detail;
  const fs::path root =
      fs::temp_directory_path() /
      ("jitterlab_acceptance_" + std::to_string(::getpid()));
  try {
    const std::string config_json = R"({
  "seed": 7,
  "disturbance": {"samples": 3000, "target_rms": 1.0},
  "bench": {"noise_sigma": 1.0, "reference": "sinusoid"},
  "covariance": {"iterations": 3},
  "subid": {"past_window": 10, "future_window": 9, "p_max": 12,
            "id_samples": 2600, "val_samples": 300}
})";
    const std::vector<std::string> artifacts{
        "factor.json",  "disturbance.csv",    "psd.csv",   "track.csv",
        "covariances.json", "gain.json",      "innovation_acf.csv",
        "model.json",   "aic.csv",            "svals.csv", "residual_acf.csv",
        "eig.csv",      "report.json"};

    std::vector<std::vector<std::string>> digests;
    for (const std::string run : {"a", "b"}) {
      const fs::path dir = root / run;
      fs::create_directories(dir);
      const std::string config_path = (dir / "config.json").string();
      write_file_atomic(config_path, config_json);
      const std::string common =
          "--config '" + config_path + "' --out '" + dir.string() + "'";
      for (const std::string command :
           {"synthesize", "bench", "tune", "identify", "validate"}) {
        const int code = run_cli(std::string(command) + " " + common);
        if (code != 0)
          throw std::runtime_error(std::string(command) + " exited with " +
                                   std::to_string(code));
      }
      std::vector<std::string> run_digests;
      for (const std::string& name : artifacts)
        run_digests.push_back(digest_file((dir / name).string()));
      digests.push_back(std::move(run_digests));
    }

    int matching = 0;
    for (std::size_t i = 0; i < artifacts.size(); ++i)
      if (digests[0][i] == digests[1][i]) ++matching;
    ok = matching == static_cast<int>(artifacts.size());
    detail = std::to_string(matching) + "/" + std::to_string(artifacts.size()) +
             " artifacts byte-identical across two seeded runs";
  } catch (const std::exception& err) {
    ok = false;
    detail = std::string("exception: ") + err.what();
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  report(10, "end-to-end pipeline is deterministic", ok, detail);
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  std::printf("%d/10 criteria passed in %.1f s\n", 10 - g_failures, elapsed);
  return g_failures == 0 ? 0 : 1;
}
