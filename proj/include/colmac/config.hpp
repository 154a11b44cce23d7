#pragma once

#include "colmac/channel.hpp"
#include "colmac/mac_engine.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace colmac {

enum class Experiment { regret, efficiency_cdf, sample_path };

std::string_view experiment_name(Experiment e);

/// Everything a run needs. Defaults are the protocol and channel tables.
struct Config {
  ProtocolParams protocol;
  ChannelParams channel;
  GeometryConfig geometry;
  EpochSchedule schedule;
  Experiment experiment = Experiment::efficiency_cdf;
  int n_networks = 50;
  int threads = 0;  // 0: hardware concurrency

  [[nodiscard]] std::uint64_t seed() const { return protocol.rng_seed; }
  /// Throws ConfigError when any cross-field invariant fails.
  void validate() const;
};

/// Bad configuration text or values. `key` is empty for file-level problems.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)) {}
  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Applies `key = value` lines on top of `base`. `#` starts a comment.
Config parse_config(std::string_view text, Config base = {});
Config load_config(const std::string& path, Config base = {});

/// Sets one key from its text form.
void set_key(Config& config, std::string_view key, std::string_view value);

/// Every key in registry order, one `key = value` per line.
std::string dump_config(const Config& config);
std::string normalize_config(std::string_view text);

/// FNV-1a of the dump, ignoring the worker count.
std::uint64_t config_hash(const Config& config);

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
void apply_preset(Config& config, std::string_view name);

}  // namespace colmac
