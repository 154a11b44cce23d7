// Command-line experiment runner.
#include "colmac/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kConfigError = 1;
constexpr int kPartialFailure = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed OFDMA MAC simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> experiment;
  std::optional<int> networks;
  std::vector<std::string> presets;
  bool dump_channel = false;

  CLI::App* run = app.add_subcommand("run", "Run an experiment from a key = value configuration file");
  run->add_option("config", config_path, "Configuration file")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--seed", seed, "Override the seed");
  run->add_option("--experiment", experiment, "regret | efficiency_cdf | sample_path");
  run->add_option("--networks", networks, "Number of networks");
  run->add_option("--preset", presets, "Preset applied before the file; repeatable")
      ->check(CLI::IsMember(colmac::preset_names()));
  run->add_flag("--dump-channel", dump_channel, "Write geometry and QoS matrix CSVs");

  CLI11_PARSE(app, argc, argv);

  colmac::Config config;
  try {
    for (const auto& p : presets) colmac::apply_preset(config, p);
    config = colmac::load_config(config_path, config);
    if (seed) colmac::set_key(config, "seed", std::to_string(*seed));
    if (experiment) colmac::set_key(config, "experiment", *experiment);
    if (networks) colmac::set_key(config, "n_networks", std::to_string(*networks));
    config.validate();
  } catch (const colmac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  const colmac::ExperimentOutput out = colmac::run_experiment(config, out_dir, dump_channel);
  for (const auto& f : out.files) std::cout << f.string() << '\n';
  if (out.failed_networks > 0) {
    for (const auto& r : out.networks) {
      if (!r.ok) std::cerr << "network " << r.index << " failed: " << r.error << '\n';
    }
    return kPartialFailure;
  }
  return 0;
}
