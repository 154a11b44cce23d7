#pragma once

#include "colmac/config.hpp"

#include <atomic>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

namespace colmac {

struct CdfPoint {
  double value = 0.0;
  double fraction = 0.0;
};

/// Empirical CDF: stable ascending sort, fraction i/n at the i-th value.
std::vector<CdfPoint> aggregate_cdf(std::vector<double> values);

/// Draws network `index` of a batch. Geometry, fading and engine streams are
/// all derived from (seed, index) so networks are independent of scheduling.
struct Network {
  ChannelRealization realization;
  ChannelProcess process;
};
Network draw_network(const Config& config, int index);

/// Engine stream of network `index`.
Rng engine_stream(const Config& config, int index);

/// Runs the configured schedule on one network.
RunLog run_network(const Config& config, ChannelProcess& process, Rng& rng);

/// Allocation-quality efficiency of the baselines over the coherence intervals
/// in [first_slot, last_slot): sum of welfare over sum of W*.
struct BaselineEfficiency {
  double greedy = 0.0;
  double random = 0.0;
};
BaselineEfficiency baseline_efficiency(const Config& config, ChannelProcess process, long first_slot,
                                       long last_slot, Rng& rng);

struct NetworkResult {
  int index = 0;
  bool ok = false;
  std::string error;
  double proposed = 0.0;
  double greedy = 0.0;
  double random = 0.0;
  std::vector<int> epochs;
  std::vector<double> regret_at_epoch_ends;
  std::vector<double> exploitation_regret;  // per epoch
  std::vector<long> epoch_end_slots;
};

/// Calls fn(i) for i in [0, n) on `threads` workers; results come back in index order.
template <typename Result, typename Fn>
std::vector<Result> parallel_map(int n, int threads, Fn fn) {
  std::vector<Result> results(static_cast<std::size_t>(n));
  const int workers = std::max(1, std::min(n, threads > 0 ? threads
                                                          : static_cast<int>(std::thread::hardware_concurrency())));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < n; i = next++) results[static_cast<std::size_t>(i)] = fn(i);
  };
  if (workers == 1) {
    work();
    return results;
  }
  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();
  return results;
}

/// Full per-network evaluation used by the batch experiments.
NetworkResult evaluate_network(const Config& config, int index, bool with_baselines);

struct ExperimentOutput {
  std::vector<std::filesystem::path> files;
  int failed_networks = 0;
  std::vector<NetworkResult> networks;
};

/// `#`-prefixed lines carrying the experiment, seed and config hash.
std::string metadata_header(const Config& config);

/// Writes the experiment's CSVs under `out_dir` (created if missing).
ExperimentOutput run_experiment(const Config& config, const std::filesystem::path& out_dir,
                                bool dump_channel = false);

}  // namespace colmac
