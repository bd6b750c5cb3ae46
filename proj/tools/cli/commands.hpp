#pragma once

#include <cstdint>
#include <string>

namespace jitterlab::cli {

inline constexpr const char* kVersion = "0.1.0";

struct CommonArgs {
  std::string config_path;  // empty = all defaults
  std::string out_dir = ".";
  bool has_seed = false;
  std::uint64_t seed = 0;
};

// Each command throws ConfigError / NumericError; main maps them to exit codes.
void run_synthesize(const CommonArgs& args);
void run_bench(const CommonArgs& args);
void run_tune(const CommonArgs& args);
void run_identify(const CommonArgs& args);
void run_validate(const CommonArgs& args);

}  // namespace jitterlab::cli
