#include "jitterlab/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace jitterlab {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

// Extracts `key=value` from the metadata comment line.
bool comment_field(const std::string& line, const std::string& key, std::string& value) {
  const std::string needle = key + "=";
  const std::size_t pos = line.find(needle);
  if (pos == std::string::npos) return false;
  std::size_t end = line.find(' ', pos);
  if (end == std::string::npos) end = line.size();
  value = line.substr(pos + needle.size(), end - (pos + needle.size()));
  return true;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double parse_double(const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  require(end == text.c_str() + text.size() && !text.empty() && errno != ERANGE,
          "parse_double: '" + text + "' is not a finite number");
  return value;
}

void write_time_series_csv(const TimeSeries& series, const std::string& path) {
  series.validate();
  require(series.length() > 0, "write_time_series_csv: empty series");
  std::ostringstream out;
  out << "# jitterlab-timeseries h=" << format_double(series.h)
      << " t0=" << format_double(series.t0) << " seed=" << series.seed << "\n";
  out << "t";
  for (const std::string& name : series.channel_names) out << "," << name;
  out << "\n";
  for (std::size_t k = 0; k < series.length(); ++k) {
    out << format_double(series.t0 + static_cast<double>(k) * series.h);
    for (const auto& channel : series.channels) out << "," << format_double(channel[k]);
    out << "\n";
  }
  write_file_atomic(path, out.str());
}

TimeSeries read_time_series_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "read_time_series_csv: cannot open '" + path + "'");
  TimeSeries series;
  std::string line;
  bool have_h = false;
  // Optional metadata comments.
  while (std::getline(in, line) && !line.empty() && line.front() == '#') {
    std::string value;
    if (comment_field(line, "h", value)) {
      series.h = parse_double(value);
      have_h = true;
    }
    if (comment_field(line, "t0", value)) series.t0 = parse_double(value);
    if (comment_field(line, "seed", value)) series.seed = std::strtoull(value.c_str(), nullptr, 10);
  }
  require(!line.empty(), "read_time_series_csv: missing header in '" + path + "'");
  const std::vector<std::string> header = split(line, ',');
  require(header.size() >= 2 && header.front() == "t",
          "read_time_series_csv: header must be 't,<channel>,...' in '" + path + "'");
  series.channel_names.assign(header.begin() + 1, header.end());
  series.channels.assign(series.channel_names.size(), {});

  std::vector<double> times;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    require(cells.size() == header.size(),
            "read_time_series_csv: ragged row in '" + path + "'");
    times.push_back(parse_double(cells[0]));
    for (std::size_t c = 0; c < series.channels.size(); ++c)
      series.channels[c].push_back(parse_double(cells[c + 1]));
  }
  require(!times.empty(), "read_time_series_csv: no samples in '" + path + "'");
  if (!have_h) {
    series.t0 = times.front();
    series.h = times.size() > 1 ? times[1] - times[0] : 1.0;
  }
  series.validate();
  return series;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  require(header.size() == columns.size(), "write_csv: header/column count mismatch");
  require(!columns.empty(), "write_csv: no columns");
  const std::size_t rows = columns.front().size();
  for (const auto& col : columns)
    require(col.size() == rows, "write_csv: ragged columns");
  std::ostringstream out;
  for (std::size_t c = 0; c < header.size(); ++c)
    out << (c ? "," : "") << header[c];
  out << "\n";
  for (std::size_t k = 0; k < rows; ++k) {
    for (std::size_t c = 0; c < columns.size(); ++c)
      out << (c ? "," : "") << format_double(columns[c][k]);
    out << "\n";
  }
  write_file_atomic(path, out.str());
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char byte : bytes) {
    hash ^= byte;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string digest_file(const std::string& path) { return fnv1a_hex(read_file(path)); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "read_file: cannot open '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

bool file_exists(const std::string& path) {
  std::ifstream in(path);
  return in.good();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), "write_file_atomic: cannot open '" + tmp + "'");
    out << content;
    out.flush();
    require(out.good(), "write_file_atomic: write failed for '" + tmp + "'");
  }
  require(std::rename(tmp.c_str(), path.c_str()) == 0,
          "write_file_atomic: rename to '" + path + "' failed: " + std::strerror(errno));
}

Json matrix_to_json(const Matrix& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back(m(i, k));
  j["data"] = data;
  return j;
}

Matrix matrix_from_json(const Json& j) {
  require(j.is_object() && j.contains("rows") && j.contains("cols") && j.contains("data"),
          "matrix_from_json: expected {rows, cols, data}");
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const std::vector<double> data = j.at("data").get<std::vector<double>>();
  require(rows >= 0 && cols >= 0 &&
              data.size() == static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
          "matrix_from_json: data length mismatch");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k)
      m(i, k) = data[static_cast<std::size_t>(i * cols + k)];
  return m;
}

Json tf_to_json(const DiscreteTF& tf) {
  return Json{{"num", tf.num}, {"den", tf.den}, {"h", tf.h}};
}

DiscreteTF tf_from_json(const Json& j) {
  require(j.is_object() && j.contains("num") && j.contains("den") && j.contains("h"),
          "tf_from_json: expected {num, den, h}");
  DiscreteTF tf;
  tf.num = j.at("num").get<std::vector<double>>();
  tf.den = j.at("den").get<std::vector<double>>();
  tf.h = j.at("h").get<double>();
  tf.validate();
  return tf;
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  Json j;
  j["tool"] = manifest.tool;
  j["version"] = manifest.version;
  j["command"] = manifest.command;
  j["digest_algorithm"] = manifest.digest_algorithm;
  j["seed"] = manifest.seed;
  j["config_digest"] = manifest.config_digest;
  Json inputs = Json::object();
  for (const auto& [name, digest] : manifest.inputs) inputs[name] = digest;
  j["inputs"] = inputs;
  Json outputs = Json::object();
  for (const auto& [name, digest] : manifest.outputs) outputs[name] = digest;
  j["outputs"] = outputs;
  Json timings = Json::object();
  for (const auto& [name, ms] : manifest.timings_ms) timings[name] = ms;
  j["timings_ms"] = timings;
  write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace jitterlab
