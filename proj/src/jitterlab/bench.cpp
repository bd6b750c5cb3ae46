#include "jitterlab/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "jitterlab/rng.hpp"

namespace jitterlab {

void BenchConfig::validate() const {
  require(width >= 16 && height >= 16, "BenchConfig: image must be at least 16x16");
  require(spot_sigma > 0.0, "BenchConfig: spot sigma must be positive");
  require(spot_peak > 0.0, "BenchConfig: spot peak must be positive");
  require(noise_sigma >= 0.0, "BenchConfig: noise sigma must be nonnegative");
  require(h > 0.0, "BenchConfig: camera period must be positive");
  require(pixel_scale > 0.0, "BenchConfig: pixel scale must be positive");
  require(centroid_threshold >= 0.0 && centroid_threshold < 1.0,
          "BenchConfig: centroid threshold must lie in [0, 1)");
  if (actuator_x) actuator_x->validate();
  if (actuator_y) actuator_y->validate();
}

SpotImage render_spot(const BenchConfig& config, std::pair<double, double> center,
                      std::uint64_t frame_seed) {
  require(std::isfinite(center.first) && std::isfinite(center.second),
          "render_spot: spot center must be finite");
  SpotImage image;
  image.intensity.resize(config.height, config.width);
  const double inv_two_sigma2 = 1.0 / (2.0 * config.spot_sigma * config.spot_sigma);
  for (int row = 0; row < config.height; ++row) {
    const double dy = row - center.second;
    for (int col = 0; col < config.width; ++col) {
      const double dx = col - center.first;
      image.intensity(row, col) =
          config.spot_peak * std::exp(-(dx * dx + dy * dy) * inv_two_sigma2);
    }
  }
  if (config.noise_sigma > 0.0) {
    Rng rng(frame_seed);
    for (int row = 0; row < config.height; ++row)
      for (int col = 0; col < config.width; ++col)
        image.intensity(row, col) += config.noise_sigma * rng.normal();
  }
  image.intensity = image.intensity.cwiseMax(0.0);
  return image;
}

std::pair<double, double> centroid(const SpotImage& image, double threshold_fraction) {
  require(image.intensity.size() > 0, "centroid: empty image");
  const double peak = image.intensity.maxCoeff();
  const double level = threshold_fraction * peak;
  double mass = 0.0, mx = 0.0, my = 0.0;
  for (Eigen::Index row = 0; row < image.intensity.rows(); ++row) {
    for (Eigen::Index col = 0; col < image.intensity.cols(); ++col) {
      const double value = image.intensity(row, col);
      if (value < level) continue;
      const double weight = value - level;  // background suppression
      mass += weight;
      mx += weight * static_cast<double>(col);
      my += weight * static_cast<double>(row);
    }
  }
  require_numeric(mass > 0.0, "centroid: no pixels above threshold");
  return {mx / mass, my / mass};
}

double sinusoid_reference(double t) {
  return 0.1 * std::sin(2.0 * t) + 0.05 * std::sin(6.0 * t) + 2.0;
}

TimeSeries simulate_bench(const BenchConfig& config, const std::vector<double>& disturbance_x,
                          const std::vector<double>& disturbance_y, bool apply_reference) {
  config.validate();
  require(disturbance_x.size() == disturbance_y.size(),
          "simulate_bench: disturbance channels must have equal length");
  require(!disturbance_x.empty(), "simulate_bench: empty disturbance");
  const std::size_t n = disturbance_x.size();

  std::vector<double> command_x = disturbance_x;
  std::vector<double> command_y = disturbance_y;
  if (apply_reference) {
    for (std::size_t k = 0; k < n; ++k) {
      const double ref = sinusoid_reference(static_cast<double>(k) * config.h);
      command_x[k] += ref;
      command_y[k] += ref;
    }
  }
  if (config.actuator_x) command_x = filter_series(*config.actuator_x, command_x);
  if (config.actuator_y) command_y = filter_series(*config.actuator_y, command_y);

  const double center_x = 0.5 * (config.width - 1);
  const double center_y = 0.5 * (config.height - 1);

  TimeSeries track;
  track.t0 = 0.0;
  track.h = config.h;
  track.seed = config.seed;
  track.channel_names = {"x", "y"};
  track.channels.assign(2, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const std::pair<double, double> spot_center = {
        center_x + config.pixel_scale * command_x[k],
        center_y + config.pixel_scale * command_y[k]};
    const SpotImage frame =
        render_spot(config, spot_center, derive_seed(config.seed, k));
    if (!config.frame_dump_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%06zu.pgm", k);
      write_pgm(frame, config.frame_dump_dir + "/" + name);
    }
    const auto c = centroid(frame, config.centroid_threshold);
    track.channels[0][k] = c.first;
    track.channels[1][k] = c.second;
  }
  return track;
}

void write_pgm(const SpotImage& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "write_pgm: cannot open '" + path + "'");
  out << "P5\n" << image.intensity.cols() << " " << image.intensity.rows() << "\n255\n";
  for (Eigen::Index row = 0; row < image.intensity.rows(); ++row)
    for (Eigen::Index col = 0; col < image.intensity.cols(); ++col) {
      const double v = std::clamp(image.intensity(row, col), 0.0, 255.0);
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v))));
    }
  require(out.good(), "write_pgm: write failed for '" + path + "'");
}

}  // namespace jitterlab
