#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "jitterlab/core.hpp"

namespace {

void add_common(CLI::App* cmd, jitterlab::cli::CommonArgs& args, bool& seed_given) {
  cmd->add_option("--config", args.config_path, "Pipeline config file (JSON)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "Seed override (u64)");
  cmd->add_option("--out", args.out_dir, "Output directory (default .)");
  cmd->callback([&args, &seed_given, cmd] {
    seed_given = cmd->count("--seed") > 0;
    (void)args;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jitterlab: disturbance synthesis, covariance tuning, and subspace "
               "identification for optical-spot jitter"};
  app.set_version_flag("--version", jitterlab::cli::kVersion);
  app.require_subcommand(1);

  jitterlab::cli::CommonArgs args;
  bool seed_given = false;
  CLI::App* synthesize = app.add_subcommand(
      "synthesize", "Factorize the disturbance spectrum and synthesize time series");
  CLI::App* bench = app.add_subcommand(
      "bench", "Render the synthetic optical bench and extract the centroid track");
  CLI::App* tune = app.add_subcommand(
      "tune", "Tune tracking-filter covariances from innovation autocorrelations");
  CLI::App* identify = app.add_subcommand(
      "identify", "Identify an innovation-form model from the centroid track");
  CLI::App* validate = app.add_subcommand(
      "validate", "Validate an identified model against a track");
  for (CLI::App* cmd : {synthesize, bench, tune, identify, validate})
    add_common(cmd, args, seed_given);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  args.has_seed = seed_given;

  try {
    if (synthesize->parsed()) jitterlab::cli::run_synthesize(args);
    if (bench->parsed()) jitterlab::cli::run_bench(args);
    if (tune->parsed()) jitterlab::cli::run_tune(args);
    if (identify->parsed()) jitterlab::cli::run_identify(args);
    if (validate->parsed()) jitterlab::cli::run_validate(args);
  } catch (const jitterlab::ConfigError& e) {
    std::cerr << "error (config): " << e.what() << std::endl;
    return 2;
  } catch (const jitterlab::NumericError& e) {
    std::cerr << "error (numeric): " << e.what() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 3;
  }
  return 0;
}
