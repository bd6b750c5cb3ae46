#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace jitterlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

// Raised for invalid configuration, arguments, or inputs.  Maps to exit code 2
// at the CLI boundary.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an algorithm fails numerically (divergence, singularity,
// infeasibility).  Maps to exit code 3 at the CLI boundary.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Uniformly sampled multichannel signal.
struct TimeSeries {
  double t0 = 0.0;                          // start time in seconds
  double h = 1.0;                           // sample period in seconds
  std::vector<std::string> channel_names;   // one per channel
  std::vector<std::vector<double>> channels;
  std::uint64_t seed = 0;                   // RNG seed used to produce it (0 = n/a)

  std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }

  void validate() const {
    if (h <= 0.0) throw ConfigError("TimeSeries: sample period must be positive");
    if (channel_names.size() != channels.size())
      throw ConfigError("TimeSeries: channel name/data count mismatch");
    for (const auto& c : channels)
      if (c.size() != length())
        throw ConfigError("TimeSeries: channels must have equal length");
  }

  const std::vector<double>& channel(const std::string& name) const {
    for (std::size_t i = 0; i < channel_names.size(); ++i)
      if (channel_names[i] == name) return channels[i];
    throw ConfigError("TimeSeries: no channel named '" + name + "'");
  }
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

inline void require_numeric(bool condition, const std::string& message) {
  if (!condition) throw NumericError(message);
}

}  // namespace jitterlab
