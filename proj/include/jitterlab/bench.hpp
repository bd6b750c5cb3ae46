#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "jitterlab/lti.hpp"

namespace jitterlab {

// Virtual optical bench: camera geometry, spot shape, noise, and optional
// per-axis actuator dynamics.
struct BenchConfig {
  int width = 128;             // pixels
  int height = 128;            // pixels
  double spot_sigma = 2.0;     // pixels
  double spot_peak = 255.0;    // intensity units
  double noise_sigma = 2.0;    // additive pixel noise, intensity units
  double h = 0.0177;           // camera period, seconds
  double pixel_scale = 3.0;    // pixels per disturbance unit
  double centroid_threshold = 0.1;  // fraction of the frame maximum
  std::optional<DiscreteTF> actuator_x;
  std::optional<DiscreteTF> actuator_y;
  std::uint64_t seed = 0;
  std::string frame_dump_dir;  // empty = no PGM dump

  void validate() const;
};

struct SpotImage {
  Matrix intensity;  // height rows, width columns; intensity(row=y, col=x)
};

// Gaussian spot at `center` = (x, y) in pixel coordinates with additive
// Gaussian pixel noise (omitted when noise_sigma == 0), clamped at zero.
SpotImage render_spot(const BenchConfig& config, std::pair<double, double> center,
                      std::uint64_t frame_seed);

// Center of mass over pixels at or above threshold_fraction * max(I), with
// the threshold level subtracted before weighting.
std::pair<double, double> centroid(const SpotImage& image, double threshold_fraction);

// Two-tone reference trajectory r(t) = 0.1 sin(2t) + 0.05 sin(6t) + 2.
double sinusoid_reference(double t);

// Renders one frame per disturbance sample and extracts the centroid track.
// Per-axis command = reference (optional) + disturbance; the spot center is
// pixel_scale * (actuator-filtered) command + image center.
TimeSeries simulate_bench(const BenchConfig& config, const std::vector<double>& disturbance_x,
                          const std::vector<double>& disturbance_y, bool apply_reference);

// 8-bit binary PGM dump (values clamped to [0, 255]).
void write_pgm(const SpotImage& image, const std::string& path);

}  // namespace jitterlab
