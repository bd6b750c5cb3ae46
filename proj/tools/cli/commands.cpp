#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <vector>

#include "jitterlab/bench.hpp"
#include "jitterlab/covtune.hpp"
#include "jitterlab/io.hpp"
#include "jitterlab/kalman.hpp"
#include "jitterlab/lti.hpp"
#include "jitterlab/rng.hpp"
#include "jitterlab/spectral.hpp"
#include "jitterlab/subid.hpp"

namespace jitterlab::cli {

namespace {

namespace fs = std::filesystem;

Json default_config() {
  return Json{
      {"seed", nullptr},
      {"disturbance",
       {{"f1_hz", 2.0},
        {"zeta1", 0.05},
        {"f2_hz", 10.0},
        {"zeta2", 0.05},
        {"numerator_gain", 10.0},
        {"sample_period", 0.025},
        {"samples", 4096},
        {"psd_segment", 1024},
        {"target_rms", nullptr}}},
      {"bench",
       {{"width", 128},
        {"height", 128},
        {"spot_sigma", 2.0},
        {"spot_peak", 255.0},
        {"noise_sigma", 2.0},
        {"pixel_scale", 3.0},
        {"centroid_threshold", 0.1},
        {"reference", "none"},
        {"actuator", nullptr},
        {"frame_dump", false}}},
      {"tracking", {{"axis", "x"}}},
      {"covariance",
       {{"poles", {0.3, 0.4, 0.5}},
        {"lags", 200},
        {"iterations", 10},
        {"transient_skip", 50}}},
      {"subid",
       {{"past_window", 0},
        {"future_window", 0},
        {"order", 0},
        {"p_min", 1},
        {"p_max", 40},
        {"id_samples", 2000},
        {"val_samples", 200},
        {"whiteness_lags", 50}}},
      {"io",
       {{"disturbance_csv", "disturbance.csv"},
        {"track_csv", "track.csv"},
        {"model_json", "model.json"}}},
  };
}

void reject_unknown_keys(const Json& user, const Json& defaults, const std::string& prefix) {
  if (!user.is_object()) return;
  for (const auto& [key, value] : user.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!defaults.contains(key)) throw ConfigError("config: unknown key '" + path + "'");
    // The actuator leaf is null by default but accepts a {num, den} object.
    if (path == "bench.actuator" && value.is_object()) {
      for (const auto& [akey, avalue] : value.items()) {
        (void)avalue;
        if (akey != "num" && akey != "den")
          throw ConfigError("config: unknown key '" + path + "." + akey + "'");
      }
      continue;
    }
    if (defaults.at(key).is_object()) {
      if (!value.is_object())
        throw ConfigError("config: '" + path + "' must be an object");
      reject_unknown_keys(value, defaults.at(key), path);
    }
  }
}

void merge_into(Json& base, const Json& user) {
  for (const auto& [key, value] : user.items()) {
    if (base.contains(key) && base.at(key).is_object() && value.is_object())
      merge_into(base.at(key), value);
    else
      base[key] = value;
  }
}

struct LoadedConfig {
  Json doc;                  // merged, effective
  std::uint64_t seed = 0;
  std::string config_digest;  // of the effective document
};

LoadedConfig load_config(const CommonArgs& args) {
  Json merged = default_config();
  if (!args.config_path.empty()) {
    const std::string text = read_file(args.config_path);
    Json user;
    try {
      user = Json::parse(text);
    } catch (const Json::exception& err) {
      throw ConfigError("config: cannot parse '" + args.config_path + "': " + err.what());
    }
    require(user.is_object(), "config: top level must be an object");
    reject_unknown_keys(user, merged, "");
    merge_into(merged, user);
  }
  if (args.has_seed) merged["seed"] = args.seed;
  const Json& seed = merged.at("seed");
  require(seed.is_number_integer() || seed.is_number_unsigned(),
          "config: a seed is required (top-level \"seed\" or --seed)");

  LoadedConfig out;
  out.seed = seed.get<std::uint64_t>();
  out.doc = std::move(merged);
  out.config_digest = fnv1a_hex(out.doc.dump());
  return out;
}

// All config reads funnel through these so type errors surface as exit-2
// ConfigError with the key path named.
double get_number(const Json& section, const std::string& section_name, const std::string& key) {
  const Json& v = section.at(key);
  if (!v.is_number())
    throw ConfigError("config: '" + section_name + "." + key + "' must be a number");
  return v.get<double>();
}

int get_int(const Json& section, const std::string& section_name, const std::string& key) {
  const Json& v = section.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw ConfigError("config: '" + section_name + "." + key + "' must be an integer");
  return v.get<int>();
}

std::string get_string(const Json& section, const std::string& section_name,
                       const std::string& key) {
  const Json& v = section.at(key);
  if (!v.is_string())
    throw ConfigError("config: '" + section_name + "." + key + "' must be a string");
  return v.get<std::string>();
}

bool get_bool(const Json& section, const std::string& section_name, const std::string& key) {
  const Json& v = section.at(key);
  if (!v.is_boolean())
    throw ConfigError("config: '" + section_name + "." + key + "' must be a boolean");
  return v.get<bool>();
}

std::string resolve_path(const std::string& out_dir, const std::string& path) {
  const fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(out_dir) / p).string();
}

std::string out_path(const CommonArgs& args, const std::string& name) {
  return (fs::path(args.out_dir) / name).string();
}

void ensure_out_dir(const CommonArgs& args) {
  std::error_code ec;
  fs::create_directories(args.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + args.out_dir + "'");
}

class StageTimer {
 public:
  explicit StageTimer(RunManifest& manifest) : manifest_(manifest) { reset(); }

  void finish(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    const double ms =
        std::chrono::duration<double, std::milli>(now - start_).count();
    manifest_.timings_ms.emplace_back(stage, ms);
    start_ = now;
  }

  void reset() { start_ = std::chrono::steady_clock::now(); }

 private:
  RunManifest& manifest_;
  std::chrono::steady_clock::time_point start_;
};

RunManifest make_manifest(const CommonArgs& args, const LoadedConfig& config,
                          const std::string& command) {
  RunManifest manifest;
  manifest.version = kVersion;
  manifest.command = command;
  manifest.seed = config.seed;
  manifest.config_digest = config.config_digest;
  if (!args.config_path.empty())
    manifest.inputs.emplace_back(args.config_path, digest_file(args.config_path));
  return manifest;
}

void add_output(RunManifest& manifest, const std::string& path) {
  manifest.outputs.emplace_back(path, digest_file(path));
}

Matrix to_matrix(const TimeSeries& series, const std::vector<std::string>& names) {
  Matrix y(static_cast<Eigen::Index>(series.length()),
           static_cast<Eigen::Index>(names.size()));
  for (std::size_t c = 0; c < names.size(); ++c) {
    const std::vector<double>& channel = series.channel(names[c]);
    for (std::size_t k = 0; k < channel.size(); ++k)
      y(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = channel[k];
  }
  return y;
}

Json whiteness_to_json(const WhitenessResult& w) {
  return Json{{"exceed_count", w.exceed_count},
              {"total", w.total},
              {"pass", w.pass},
              {"exceedance_fraction", w.exceedance_fraction},
              {"bound", w.bound}};
}

std::vector<std::string> axes_from_config(const Json& tracking) {
  const std::string axis = get_string(tracking, "tracking", "axis");
  if (axis == "x") return {"x"};
  if (axis == "y") return {"y"};
  if (axis == "both") return {"x", "y"};
  throw ConfigError("config: 'tracking.axis' must be one of x|y|both");
}

ContinuousTF eq3_filter(const Json& disturbance) {
  const double f1 = get_number(disturbance, "disturbance", "f1_hz");
  const double f2 = get_number(disturbance, "disturbance", "f2_hz");
  const double zeta1 = get_number(disturbance, "disturbance", "zeta1");
  const double zeta2 = get_number(disturbance, "disturbance", "zeta2");
  const double gain = get_number(disturbance, "disturbance", "numerator_gain");
  require(f1 > 0.0 && f2 > 0.0, "config: disturbance frequencies must be positive");
  require(zeta1 > 0.0 && zeta2 > 0.0, "config: disturbance damping must be positive");
  const double w1 = 2.0 * M_PI * f1;
  const double w2 = 2.0 * M_PI * f2;
  const ContinuousTF section1{{gain, w1 * w1}, {1.0, 2.0 * zeta1 * w1, w1 * w1}};
  const ContinuousTF section2{{gain, w2 * w2}, {1.0, 2.0 * zeta2 * w2, w2 * w2}};
  return cascade(section1, section2);
}

}  // namespace

void run_synthesize(const CommonArgs& args) {
  const LoadedConfig config = load_config(args);
  ensure_out_dir(args);
  RunManifest manifest = make_manifest(args, config, "synthesize");
  StageTimer timer(manifest);

  const Json& dist = config.doc.at("disturbance");
  const double h = get_number(dist, "disturbance", "sample_period");
  require(h > 0.0, "config: 'disturbance.sample_period' must be positive");
  const int samples = get_int(dist, "disturbance", "samples");
  require(samples >= 16, "config: 'disturbance.samples' must be at least 16");
  int segment = get_int(dist, "disturbance", "psd_segment");
  segment = std::max(8, std::min(segment, samples / 2));
  std::optional<double> target_rms;
  if (!dist.at("target_rms").is_null())
    target_rms = get_number(dist, "disturbance", "target_rms");

  const ContinuousTF gc = eq3_filter(dist);
  const DiscreteTF wd = discretize_zoh(gc, h);
  const RationalSpectrum spectrum = spectrum_from_filter(wd);
  const SpectralFactor factor = spectral_factorize(spectrum);
  timer.finish("factorize");

  const std::size_t n = static_cast<std::size_t>(samples);
  const std::vector<double> dx =
      synthesize_disturbance(factor, n, derive_seed(config.seed, 1), target_rms);
  const std::vector<double> dy =
      synthesize_disturbance(factor, n, derive_seed(config.seed, 2), target_rms);
  timer.finish("synthesize");

  const PsdEstimate psd_x = estimate_psd(dx, h, segment);
  const PsdEstimate psd_y = estimate_psd(dy, h, segment);
  timer.finish("psd");

  Json factor_json = tf_to_json(factor.H);
  factor_json["Sv"] = factor.Sv;
  factor_json["boundary_root_count"] = factor.boundary_roots.size();
  const std::string factor_path = out_path(args, "factor.json");
  write_file_atomic(factor_path, factor_json.dump(2) + "\n");
  add_output(manifest, factor_path);

  TimeSeries series;
  series.t0 = 0.0;
  series.h = h;
  series.seed = config.seed;
  series.channel_names = {"x", "y"};
  series.channels = {dx, dy};
  const std::string dist_path = out_path(args, "disturbance.csv");
  write_time_series_csv(series, dist_path);
  add_output(manifest, dist_path);

  const std::string psd_path = out_path(args, "psd.csv");
  write_csv(psd_path, {"freq_hz", "x", "y"}, {psd_x.freqs_hz, psd_x.values, psd_y.values});
  add_output(manifest, psd_path);
  timer.finish("write");

  write_manifest(manifest, out_path(args, "manifest_synthesize.json"));
}

void run_bench(const CommonArgs& args) {
  const LoadedConfig config = load_config(args);
  ensure_out_dir(args);
  RunManifest manifest = make_manifest(args, config, "bench");
  StageTimer timer(manifest);

  const std::string dist_path =
      resolve_path(args.out_dir, get_string(config.doc.at("io"), "io", "disturbance_csv"));
  require(file_exists(dist_path), "bench: missing input '" + dist_path + "'");
  manifest.inputs.emplace_back(dist_path, digest_file(dist_path));
  const TimeSeries disturbance = read_time_series_csv(dist_path);
  timer.finish("read");

  const Json& bench = config.doc.at("bench");
  BenchConfig bench_config;
  bench_config.width = get_int(bench, "bench", "width");
  bench_config.height = get_int(bench, "bench", "height");
  bench_config.spot_sigma = get_number(bench, "bench", "spot_sigma");
  bench_config.spot_peak = get_number(bench, "bench", "spot_peak");
  bench_config.noise_sigma = get_number(bench, "bench", "noise_sigma");
  bench_config.pixel_scale = get_number(bench, "bench", "pixel_scale");
  bench_config.centroid_threshold = get_number(bench, "bench", "centroid_threshold");
  bench_config.h = disturbance.h;  // camera frames follow the injected samples
  bench_config.seed = derive_seed(config.seed, 4);
  const std::string reference = get_string(bench, "bench", "reference");
  require(reference == "none" || reference == "sinusoid",
          "config: 'bench.reference' must be none|sinusoid");
  if (!bench.at("actuator").is_null()) {
    const Json& act = bench.at("actuator");
    require(act.is_object() && act.contains("num") && act.contains("den"),
            "config: 'bench.actuator' must be {num, den}");
    DiscreteTF tf;
    try {
      tf.num = act.at("num").get<std::vector<double>>();
      tf.den = act.at("den").get<std::vector<double>>();
    } catch (const Json::exception&) {
      throw ConfigError("config: 'bench.actuator' coefficients must be numeric arrays");
    }
    tf.h = disturbance.h;
    tf.validate();
    bench_config.actuator_x = tf;
    bench_config.actuator_y = tf;
  }
  if (get_bool(bench, "bench", "frame_dump")) {
    bench_config.frame_dump_dir = out_path(args, "frames");
    std::error_code ec;
    fs::create_directories(bench_config.frame_dump_dir, ec);
    if (ec) throw ConfigError("cannot create frame dump directory");
  }

  const TimeSeries track = simulate_bench(bench_config, disturbance.channel("x"),
                                          disturbance.channel("y"), reference == "sinusoid");
  timer.finish("simulate");

  const std::string track_path = out_path(args, "track.csv");
  write_time_series_csv(track, track_path);
  add_output(manifest, track_path);
  timer.finish("write");

  write_manifest(manifest, out_path(args, "manifest_bench.json"));
}

void run_tune(const CommonArgs& args) {
  const LoadedConfig config = load_config(args);
  ensure_out_dir(args);
  RunManifest manifest = make_manifest(args, config, "tune");
  StageTimer timer(manifest);

  const std::string track_path =
      resolve_path(args.out_dir, get_string(config.doc.at("io"), "io", "track_csv"));
  require(file_exists(track_path), "tune: missing input '" + track_path + "'");
  manifest.inputs.emplace_back(track_path, digest_file(track_path));
  const TimeSeries track = read_time_series_csv(track_path);
  timer.finish("read");

  const Json& cov = config.doc.at("covariance");
  TuningConfig tuning;
  tuning.n_lags = get_int(cov, "covariance", "lags");
  tuning.iterations = get_int(cov, "covariance", "iterations");
  tuning.transient_skip = get_int(cov, "covariance", "transient_skip");
  require(tuning.iterations >= 1, "config: 'covariance.iterations' must be at least 1");
  require(tuning.n_lags >= 1, "config: 'covariance.lags' must be at least 1");
  require(tuning.transient_skip >= 0,
          "config: 'covariance.transient_skip' must be nonnegative");
  const Json& poles = cov.at("poles");
  require(poles.is_array() && !poles.empty(), "config: 'covariance.poles' must be an array");
  for (const Json& pole : poles) {
    require(pole.is_number(), "config: 'covariance.poles' entries must be numbers");
    tuning.initial_poles.push_back(Complex(pole.get<double>(), 0.0));
  }

  const std::vector<std::string> axes = axes_from_config(config.doc.at("tracking"));
  Json covariances = Json::object();
  Json gains = Json::object();
  Json report = Json::object();
  std::vector<std::vector<double>> acf_columns;
  std::vector<std::string> acf_header{"lag"};
  double bound = 0.0;

  for (const std::string& axis : axes) {
    const NoisyStateSpace model = build_abg_model(track.h, 1.0, 1.0);
    const Matrix y = to_matrix(track, {axis});
    TuningResult result;
    try {
      result = iterate_tuning(model, y, tuning);
    } catch (const NumericError& err) {
      throw NumericError("tune: axis " + axis + ": " + err.what());
    }

    const double sigma_w = std::sqrt(std::max(result.estimate.Q(0, 0), 0.0));
    const double sigma_v = std::sqrt(std::max(result.estimate.R(0, 0), 0.0));
    covariances[axis] = Json{{"Q", matrix_to_json(result.estimate.Q)},
                             {"R", matrix_to_json(result.estimate.R)},
                             {"sigma_w", sigma_w},
                             {"sigma_v", sigma_v},
                             {"residual", result.estimate.residual}};

    const Matrix a_cl = model.A - model.A * result.gain.L * model.C;
    Json eigs = Json::array();
    for (const Complex& ev : eigenvalues(a_cl))
      eigs.push_back(Json{{"re", ev.real()}, {"im", ev.imag()}});
    gains[axis] = Json{{"L", matrix_to_json(result.gain.L)}, {"closed_loop_eigs", eigs}};

    Json iterations = Json::array();
    for (const TuningIterationDiag& diag : result.diagnostics) {
      iterations.push_back(Json{{"iteration", diag.iteration},
                                {"residual", diag.residual},
                                {"exceedance_fraction", diag.exceedance_fraction},
                                {"sigma_w", std::sqrt(std::max(diag.Q(0, 0), 0.0))},
                                {"sigma_v", std::sqrt(std::max(diag.R(0, 0), 0.0))}});
    }
    report[axis] = Json{{"whiteness", whiteness_to_json(result.final_whiteness)},
                        {"sigma_w", sigma_w},
                        {"sigma_v", sigma_v},
                        {"residual", result.estimate.residual},
                        {"iterations", iterations}};

    acf_header.push_back(axis);
    acf_columns.push_back(result.final_whiteness.coefficients);
    bound = result.final_whiteness.bound;
  }
  timer.finish("tune");

  std::vector<double> lags(acf_columns.front().size());
  for (std::size_t j = 0; j < lags.size(); ++j) lags[j] = static_cast<double>(j + 1);
  std::vector<std::vector<double>> columns;
  columns.push_back(lags);
  for (auto& col : acf_columns) columns.push_back(std::move(col));
  columns.push_back(std::vector<double>(lags.size(), bound));
  acf_header.push_back("bound");

  const std::string cov_path = out_path(args, "covariances.json");
  write_file_atomic(cov_path, covariances.dump(2) + "\n");
  add_output(manifest, cov_path);
  const std::string gain_path = out_path(args, "gain.json");
  write_file_atomic(gain_path, gains.dump(2) + "\n");
  add_output(manifest, gain_path);
  const std::string acf_path = out_path(args, "innovation_acf.csv");
  write_csv(acf_path, acf_header, columns);
  add_output(manifest, acf_path);
  const std::string report_path = out_path(args, "report.json");
  write_file_atomic(report_path, report.dump(2) + "\n");
  add_output(manifest, report_path);
  timer.finish("write");

  write_manifest(manifest, out_path(args, "manifest_tune.json"));
}

void run_identify(const CommonArgs& args) {
  const LoadedConfig config = load_config(args);
  ensure_out_dir(args);
  RunManifest manifest = make_manifest(args, config, "identify");
  StageTimer timer(manifest);

  const std::string track_path =
      resolve_path(args.out_dir, get_string(config.doc.at("io"), "io", "track_csv"));
  require(file_exists(track_path), "identify: missing input '" + track_path + "'");
  manifest.inputs.emplace_back(track_path, digest_file(track_path));
  const TimeSeries track = read_time_series_csv(track_path);
  timer.finish("read");

  const Json& sub = config.doc.at("subid");
  SubidConfig subid_config;
  subid_config.past_window = get_int(sub, "subid", "past_window");
  subid_config.future_window = get_int(sub, "subid", "future_window");
  subid_config.order = get_int(sub, "subid", "order");
  subid_config.p_min = get_int(sub, "subid", "p_min");
  subid_config.p_max = get_int(sub, "subid", "p_max");
  subid_config.whiteness_lags = get_int(sub, "subid", "whiteness_lags");
  const int n_id = get_int(sub, "subid", "id_samples");
  const int n_val = get_int(sub, "subid", "val_samples");
  require(n_id >= 4 && n_val >= 2, "config: subid split lengths must be positive");
  require(static_cast<std::size_t>(n_id) + static_cast<std::size_t>(n_val) <= track.length(),
          "identify: track shorter than id_samples + val_samples");

  const Matrix y = to_matrix(track, track.channel_names);

  // The AIC sweep always runs so the curve is exported even when p is fixed.
  const AicCurve curve = select_past_window(y.topRows(n_id), y.middleRows(n_id, n_val),
                                            subid_config.p_min, subid_config.p_max);
  if (subid_config.past_window <= 0) subid_config.past_window = curve.p_best;
  timer.finish("aic");

  IdentifiedModel model = identify(y, subid_config, n_id, n_val, track.h);
  model.aic = curve;
  timer.finish("identify");

  Json model_json;
  model_json["Abar"] = matrix_to_json(model.Abar);
  model_json["A"] = matrix_to_json(model.A);
  model_json["Ltilde"] = matrix_to_json(model.Ltilde);
  model_json["C"] = matrix_to_json(model.C);
  model_json["n"] = model.n;
  model_json["p"] = model.p;
  model_json["f"] = model.f;
  model_json["h"] = model.h;
  model_json["channels"] = track.channel_names;
  const std::string model_path = out_path(args, "model.json");
  write_file_atomic(model_path, model_json.dump(2) + "\n");
  add_output(manifest, model_path);

  std::vector<double> p_col(curve.p_values.begin(), curve.p_values.end());
  const std::string aic_path = out_path(args, "aic.csv");
  write_csv(aic_path, {"p", "aic"}, {p_col, curve.aic});
  add_output(manifest, aic_path);

  std::vector<double> idx(static_cast<std::size_t>(model.singular_values.size()));
  std::vector<double> sv(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    idx[i] = static_cast<double>(i + 1);
    sv[i] = model.singular_values(static_cast<Eigen::Index>(i));
  }
  const std::string svals_path = out_path(args, "svals.csv");
  write_csv(svals_path, {"index", "singular_value"}, {idx, sv});
  add_output(manifest, svals_path);

  // Residual autocorrelation, one column per channel plus the common bound.
  {
    std::vector<std::string> header{"lag"};
    std::vector<std::vector<double>> columns;
    const int lags = std::max(
        1, std::min(subid_config.whiteness_lags, static_cast<int>(n_val) - 1));
    std::vector<double> lag_col(static_cast<std::size_t>(lags));
    for (int j = 0; j < lags; ++j) lag_col[static_cast<std::size_t>(j)] = j + 1;
    columns.push_back(lag_col);
    double bound = 0.0;
    for (Eigen::Index c = 0; c < model.residuals_val.cols(); ++c) {
      std::vector<double> channel(static_cast<std::size_t>(model.residuals_val.rows()));
      for (Eigen::Index i = 0; i < model.residuals_val.rows(); ++i)
        channel[static_cast<std::size_t>(i)] = model.residuals_val(i, c);
      const WhitenessResult w = whiteness_test(channel, lags);
      header.push_back("residual_autocorr_" + track.channel_names[static_cast<std::size_t>(c)]);
      columns.push_back(w.coefficients);
      bound = w.bound;
    }
    header.push_back("bound");
    columns.push_back(std::vector<double>(lag_col.size(), bound));
    const std::string acf_path = out_path(args, "residual_acf.csv");
    write_csv(acf_path, header, columns);
    add_output(manifest, acf_path);
  }

  // Eigenvalues with a string-valued loop column; written directly.
  {
    std::ostringstream eig;
    eig << "re,im,loop\n";
    for (const Complex& ev : model.eig_open)
      eig << format_double(ev.real()) << "," << format_double(ev.imag()) << ",open\n";
    for (const Complex& ev : model.eig_closed)
      eig << format_double(ev.real()) << "," << format_double(ev.imag()) << ",closed\n";
    const std::string eig_path = out_path(args, "eig.csv");
    write_file_atomic(eig_path, eig.str());
    add_output(manifest, eig_path);
  }

  Json vaf_json = Json::object();
  for (Eigen::Index c = 0; c < model.vaf_validation.size(); ++c)
    vaf_json[track.channel_names[static_cast<std::size_t>(c)]] = model.vaf_validation(c);
  bool closed_stable = true;
  for (const Complex& ev : model.eig_closed)
    if (std::abs(ev) >= 1.0) closed_stable = false;
  bool open_stable = true;
  for (const Complex& ev : model.eig_open)
    if (std::abs(ev) >= 1.0) open_stable = false;
  Json report{{"p", model.p},
              {"f", model.f},
              {"n", model.n},
              {"aic_best_p", curve.p_best},
              {"vaf", vaf_json},
              {"whiteness", whiteness_to_json(model.residual_whiteness)},
              {"closed_loop_stable", closed_stable},
              {"open_loop_stable", open_stable}};
  const std::string report_path = out_path(args, "report.json");
  write_file_atomic(report_path, report.dump(2) + "\n");
  add_output(manifest, report_path);
  timer.finish("write");

  write_manifest(manifest, out_path(args, "manifest_identify.json"));
}

void run_validate(const CommonArgs& args) {
  const LoadedConfig config = load_config(args);
  ensure_out_dir(args);
  RunManifest manifest = make_manifest(args, config, "validate");
  StageTimer timer(manifest);

  const std::string model_path =
      resolve_path(args.out_dir, get_string(config.doc.at("io"), "io", "model_json"));
  const std::string track_path =
      resolve_path(args.out_dir, get_string(config.doc.at("io"), "io", "track_csv"));
  require(file_exists(model_path), "validate: missing input '" + model_path + "'");
  require(file_exists(track_path), "validate: missing input '" + track_path + "'");
  manifest.inputs.emplace_back(model_path, digest_file(model_path));
  manifest.inputs.emplace_back(track_path, digest_file(track_path));

  Json model_json;
  try {
    model_json = Json::parse(read_file(model_path));
  } catch (const Json::exception& err) {
    throw ConfigError("validate: cannot parse '" + model_path + "': " + std::string(err.what()));
  }
  Matrix abar, a, ltilde, c;
  int p = 0;
  double model_h = 0.0;
  std::vector<std::string> channels;
  try {
    abar = matrix_from_json(model_json.at("Abar"));
    a = matrix_from_json(model_json.at("A"));
    ltilde = matrix_from_json(model_json.at("Ltilde"));
    c = matrix_from_json(model_json.at("C"));
    p = model_json.at("p").get<int>();
    model_h = model_json.at("h").get<double>();
    channels = model_json.at("channels").get<std::vector<std::string>>();
  } catch (const Json::exception& err) {
    throw ConfigError("validate: malformed model file: " + std::string(err.what()));
  }

  const TimeSeries track = read_time_series_csv(track_path);
  require(std::abs(track.h - model_h) <= 1e-9 * std::max(track.h, model_h),
          "validate: track sample period does not match the model");
  timer.finish("read");

  const Json& sub = config.doc.at("subid");
  const int n_id = get_int(sub, "subid", "id_samples");
  const int n_val = get_int(sub, "subid", "val_samples");
  const int whiteness_lags = get_int(sub, "subid", "whiteness_lags");
  require(n_id >= 4 && n_val >= 2, "config: subid split lengths must be positive");
  require(static_cast<std::size_t>(n_id) + static_cast<std::size_t>(n_val) <= track.length(),
          "validate: track shorter than id_samples + val_samples");
  require(p >= 0 && p < n_id, "validate: model past window exceeds the id split");

  const Matrix y = to_matrix(track, channels);

  // Replays identify()'s diagnostic pass: predictor from time p over the id
  // split (zero initial state; the transient decays over the id run) and
  // one-step predictions scored on the validation rows.
  const Matrix y_tail = y.middleRows(p, n_id + n_val - p);
  const Matrix y_hat = simulate_predictor(abar, ltilde, c, y_tail, Vector::Zero(abar.rows()));
  const Matrix predictions = y_hat.bottomRows(n_val);
  const Matrix y_val = y.middleRows(n_id, n_val);
  const Vector vaf_val = vaf(y_val, predictions);
  const Matrix residuals = y_val - predictions;
  const int lags = std::max(1, std::min(whiteness_lags, n_val - 1));
  const WhitenessResult whiteness = whiteness_test(residuals, lags);
  timer.finish("validate");

  Json vaf_json = Json::object();
  for (Eigen::Index ch = 0; ch < vaf_val.size(); ++ch)
    vaf_json[channels[static_cast<std::size_t>(ch)]] = vaf_val(ch);
  bool closed_stable = true;
  Json eig_closed = Json::array();
  for (const Complex& ev : eigenvalues(abar)) {
    if (std::abs(ev) >= 1.0) closed_stable = false;
    eig_closed.push_back(Json{{"re", ev.real()}, {"im", ev.imag()}});
  }
  bool open_stable = true;
  Json eig_open = Json::array();
  for (const Complex& ev : eigenvalues(a)) {
    if (std::abs(ev) >= 1.0) open_stable = false;
    eig_open.push_back(Json{{"re", ev.real()}, {"im", ev.imag()}});
  }
  Json report{{"vaf", vaf_json},
              {"whiteness", whiteness_to_json(whiteness)},
              {"closed_loop_stable", closed_stable},
              {"open_loop_stable", open_stable},
              {"eig_closed", eig_closed},
              {"eig_open", eig_open},
              {"h", track.h},
              {"p", p}};
  const std::string report_path = out_path(args, "report.json");
  write_file_atomic(report_path, report.dump(2) + "\n");
  add_output(manifest, report_path);
  timer.finish("write");

  write_manifest(manifest, out_path(args, "manifest_validate.json"));
}

}  // namespace jitterlab::cli
