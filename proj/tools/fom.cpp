#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fom/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"First-order methods with certified duality gaps"};
  app.require_subcommand(1);

  std::vector<std::filesystem::path> configs;
  std::string out_dir;
  unsigned jobs = 1;
  auto* run = app.add_subcommand("run", "Run experiments and write trace.csv and summary.json");
  run->add_option("--config", configs, "Run configuration (JSON); repeatable")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--jobs", jobs, "Configurations to run concurrently")->check(CLI::PositiveNumber);

  std::string instance;
  std::uint64_t seed = 1;
  std::size_t samples = 10000;
  double scale = 1.0;
  auto* verify = app.add_subcommand("verify", "Sample the claimed smoothness conditions of an instance");
  verify->add_option("--instance", instance, "Registry instance name")->required();
  verify->add_option("--seed", seed, "Instance and sampling seed");
  verify->add_option("--samples", samples, "Samples per condition");
  verify->add_option("--scale", scale, "Multiply the declared constants by this factor");

  std::filesystem::path trace;
  double tail = 0.5;
  auto* rates = app.add_subcommand("rates", "Fit the log-log convergence slope of a trace");
  rates->add_option("--trace", trace, "Trace CSV")->required()->check(CLI::ExistingFile);
  rates->add_option("--tail", tail, "Fraction of final rows used in the fit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fom::cli::kExitConfigError;
  }

  if (run->parsed()) {
    std::optional<std::filesystem::path> out;
    if (!out_dir.empty()) out = out_dir;
    return fom::cli::cmd_run(configs, out, jobs, std::cout, std::cerr);
  }
  if (verify->parsed()) return fom::cli::cmd_verify(instance, seed, samples, scale, std::cout, std::cerr);
  return fom::cli::cmd_rates(trace, tail, std::cout, std::cerr);
}
