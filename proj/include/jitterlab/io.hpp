#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "jitterlab/core.hpp"
#include "jitterlab/lti.hpp"

namespace jitterlab {

using Json = nlohmann::json;

// `%.17g` formatting: shortest text that round-trips IEEE doubles.
std::string format_double(double x);
double parse_double(const std::string& text);

// TimeSeries CSV layout:
//   # jitterlab-timeseries h=<...> t0=<...> seed=<...>
//   t,<name>,...
//   <values>
// The comment line carries the exact sample period; readers fall back to
// t[1]-t[0] for foreign files without it.
void write_time_series_csv(const TimeSeries& series, const std::string& path);
TimeSeries read_time_series_csv(const std::string& path);

// Generic numeric CSV with a header row (used for diagnostic exports).
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

// FNV-1a 64-bit content digest, 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);
std::string digest_file(const std::string& path);

std::string read_file(const std::string& path);
bool file_exists(const std::string& path);

// Writes to `<path>.tmp` then renames, so readers never observe partial files.
void write_file_atomic(const std::string& path, const std::string& content);

// JSON <-> linear algebra helpers ({rows, cols, data} with row-major data).
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
Json tf_to_json(const DiscreteTF& tf);
DiscreteTF tf_from_json(const Json& j);

// Per-run audit record.
struct RunManifest {
  std::string tool = "jitterlab";
  std::string version;
  std::string command;
  std::string digest_algorithm = "fnv1a-64";
  std::uint64_t seed = 0;
  std::string config_digest;
  std::vector<std::pair<std::string, std::string>> inputs;   // path -> digest
  std::vector<std::pair<std::string, std::string>> outputs;  // path -> digest
  std::vector<std::pair<std::string, double>> timings_ms;
};

void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace jitterlab
