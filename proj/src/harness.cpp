#include "colmac/harness.hpp"

#include "colmac/allocators.hpp"
#include "colmac/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace colmac {

std::vector<CdfPoint> aggregate_cdf(std::vector<double> values) {
  require(!values.empty(), "cdf of an empty sample");
  std::stable_sort(values.begin(), values.end());
  std::vector<CdfPoint> out(values.size());
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = {values[i], static_cast<double>(i + 1) / n};
  return out;
}

namespace {

enum StreamLabel : std::uint64_t { kGeometry = 0, kFading = 1, kEngine = 2, kBaseline = 3 };

long coherence_slots(const Config& config) {
  return std::max(1L, std::lround(config.channel.coherence_time_s / config.schedule.slot_duration_s));
}

std::ofstream open_csv(const std::filesystem::path& path, const Config& config) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), "cannot write " + path.string());
  os << std::setprecision(10) << metadata_header(config);
  return os;
}

}  // namespace

Network draw_network(const Config& config, int index) {
  Rng rng = substream(config.seed(), {static_cast<std::uint64_t>(index), kGeometry});
  Geometry geometry = place_nodes(config.protocol, config.geometry, rng);
  ChannelRealization real = realize_channel(geometry, config.channel, rng);
  const std::uint64_t fading_seed = substream(config.seed(), {static_cast<std::uint64_t>(index), kFading})();
  ChannelProcess process =
      ChannelProcess::fading(real, config.channel, config.protocol, coherence_slots(config), fading_seed);
  return {std::move(real), std::move(process)};
}

Rng engine_stream(const Config& config, int index) {
  return substream(config.seed(), {static_cast<std::uint64_t>(index), kEngine});
}

RunLog run_network(const Config& config, ChannelProcess& process, Rng& rng) {
  RunLog log = config.schedule.mode == ScheduleMode::exponential
                   ? run_exponential(config.protocol, config.schedule, process, rng)
                   : run_fixed(config.protocol, config.schedule, process, rng);
  log.seed = config.seed();
  return log;
}

BaselineEfficiency baseline_efficiency(const Config& config, ChannelProcess process, long first_slot,
                                       long last_slot, Rng& rng) {
  require(first_slot <= last_slot, "empty baseline window");
  double greedy_sum = 0.0;
  double random_sum = 0.0;
  double optimal_sum = 0.0;
  auto score = [&](long weight) {
    const UtilityMatrix& q = process.truth();
    const double w = static_cast<double>(weight);
    greedy_sum += w * welfare(q, greedy_stable(q));
    random_sum += w * welfare(q, random_allocation(config.protocol, rng));
    optimal_sum += w * process.w_star();
  };
  if (!process.is_dynamic()) {
    score(1);
  } else {
    while (process.clock() < first_slot) process.advance(std::min(first_slot - process.clock(), process.slots_until_change()));
    while (process.clock() < last_slot) {
      const long span = std::min(last_slot - process.clock(), process.slots_until_change());
      score(span);
      process.advance(span);
    }
  }
  BaselineEfficiency out;
  if (optimal_sum > 0.0) {
    out.greedy = greedy_sum / optimal_sum;
    out.random = random_sum / optimal_sum;
  } else {
    out.greedy = out.random = 1.0;
  }
  return out;
}

NetworkResult evaluate_network(const Config& config, int index, bool with_baselines) {
  NetworkResult r;
  r.index = index;
  try {
    Network net = draw_network(config, index);
    const ChannelProcess initial = net.process;
    Rng rng = engine_stream(config, index);
    const RunLog log = run_network(config, net.process, rng);
    const auto series = efficiency(log);
    r.proposed = mean_efficiency(series, 1);
    r.regret_at_epoch_ends = log.regret_at_epoch_ends();
    r.exploitation_regret.assign(log.epochs.size(), 0.0);
    r.epoch_end_slots.assign(log.epochs.size(), 0);
    for (const EpochRecord& rec : log.epochs) r.epochs.push_back(rec.epoch);
    for (const Segment& s : log.segments) {
      for (std::size_t e = 0; e < log.epochs.size(); ++e) {
        if (log.epochs[e].epoch != s.epoch) continue;
        if (s.phase == Phase::exploitation) r.exploitation_regret[e] += s.regret();
        r.epoch_end_slots[e] = s.start + s.length;
      }
    }
    if (with_baselines) {
      long steady_start = 0;
      for (const Segment& s : log.segments) {
        if (s.epoch == 0) steady_start = s.start + s.length;
      }
      Rng baseline_rng = substream(config.seed(), {static_cast<std::uint64_t>(index), kBaseline});
      const auto base = baseline_efficiency(config, initial, steady_start, log.total_slots(), baseline_rng);
      r.greedy = base.greedy;
      r.random = base.random;
    }
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  return r;
}

std::string metadata_header(const Config& config) {
  std::ostringstream os;
  os << "# experiment=" << experiment_name(config.experiment) << '\n';
  os << "# seed=" << config.seed() << '\n';
  os << "# config_hash=" << std::hex << std::setw(16) << std::setfill('0') << config_hash(config) << std::dec
     << '\n';
  os << "# networks=" << config.n_networks << '\n';
  return os.str();
}

ExperimentOutput run_experiment(const Config& config, const std::filesystem::path& out_dir, bool dump_channel) {
  config.validate();
  std::filesystem::create_directories(out_dir);
  ExperimentOutput out;
  const std::string prefix(experiment_name(config.experiment));

  if (dump_channel) {
    const int n_dump = config.experiment == Experiment::sample_path ? 1 : config.n_networks;
    for (int i = 0; i < n_dump; ++i) {
      const Network net = draw_network(config, i);
      std::ostringstream tag;
      tag << std::setw(3) << std::setfill('0') << i;
      auto geo_path = out_dir / ("geometry_" + tag.str() + ".csv");
      auto q_path = out_dir / ("qos_" + tag.str() + ".csv");
      std::ofstream geo = open_csv(geo_path, config);
      write_geometry_csv(geo, net.realization.geometry);
      std::ofstream q = open_csv(q_path, config);
      write_matrix_csv(q, net.process.truth());
      out.files.push_back(geo_path);
      out.files.push_back(q_path);
    }
  }

  if (config.experiment == Experiment::sample_path) {
    Network net = draw_network(config, 0);
    Rng rng = engine_stream(config, 0);
    const RunLog log = run_network(config, net.process, rng);
    const auto series = efficiency(log);
    auto path = out_dir / "sample_path.csv";
    std::ofstream os = open_csv(path, config);
    os << "epoch,end_time_s,efficiency,truncated,reused_profile,auction_slots,flagged\n";
    long end = 0;
    for (std::size_t e = 0; e < series.size(); ++e) {
      for (const Segment& s : log.segments) {
        if (s.epoch == series[e].epoch) end = s.start + s.length;
      }
      const EpochRecord& rec = log.epochs[e];
      os << series[e].epoch << ',' << static_cast<double>(end) * config.schedule.slot_duration_s << ','
         << series[e].value << ',' << rec.truncated << ',' << rec.reused_profile << ',' << rec.auction_slots
         << ',' << series[e].flagged << '\n';
    }
    out.files.push_back(path);
    auto log_path = out_dir / "runlog.csv";
    std::ofstream los = open_csv(log_path, config);
    write_runlog_csv(los, log);
    out.files.push_back(log_path);
    NetworkResult r;
    r.ok = true;
    r.proposed = mean_efficiency(series, 1);
    out.networks.push_back(r);
    return out;
  }

  const bool baselines = config.experiment == Experiment::efficiency_cdf;
  out.networks = parallel_map<NetworkResult>(config.n_networks, config.threads,
                                             [&](int i) { return evaluate_network(config, i, baselines); });

  auto summary_path = out_dir / (prefix + "_networks.csv");
  std::ofstream summary = open_csv(summary_path, config);
  summary << "network,status,proposed,greedy,random,error\n";
  for (const NetworkResult& r : out.networks) {
    if (!r.ok) ++out.failed_networks;
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    summary << r.index << ',' << (r.ok ? "ok" : "failed") << ',' << r.proposed << ',' << r.greedy << ','
            << r.random << ',' << err << '\n';
  }
  out.files.push_back(summary_path);

  std::vector<const NetworkResult*> good;
  for (const NetworkResult& r : out.networks) {
    if (r.ok) good.push_back(&r);
  }
  if (good.empty()) return out;

  if (config.experiment == Experiment::efficiency_cdf) {
    for (const char* policy : {"proposed", "greedy", "random"}) {
      std::vector<double> values;
      for (const NetworkResult* r : good) {
        const std::string_view p = policy;
        values.push_back(p == "proposed" ? r->proposed : p == "greedy" ? r->greedy : r->random);
      }
      auto path = out_dir / (std::string("efficiency_") + policy + ".csv");
      std::ofstream os = open_csv(path, config);
      os << "efficiency,cumulative_fraction\n";
      for (const CdfPoint& p : aggregate_cdf(values)) os << p.value << ',' << p.fraction << '\n';
      out.files.push_back(path);
    }
  } else {
    // Regret curve averaged over networks at epoch ends.
    const std::size_t n_epochs = good.front()->regret_at_epoch_ends.size();
    auto path = out_dir / "regret.csv";
    std::ofstream os = open_csv(path, config);
    os << "epoch,end_slot_mean,cumulative_regret_mean,exploitation_regret_mean,zero_exploitation_fraction\n";
    for (std::size_t e = 0; e < n_epochs; ++e) {
      double slot = 0.0, regret_sum = 0.0, exploit = 0.0;
      int zero = 0;
      for (const NetworkResult* r : good) {
        slot += static_cast<double>(r->epoch_end_slots[e]);
        regret_sum += r->regret_at_epoch_ends[e];
        exploit += r->exploitation_regret[e];
        if (std::abs(r->exploitation_regret[e]) < 1e-9) ++zero;
      }
      const double n = static_cast<double>(good.size());
      os << good.front()->epochs[e] << ',' << slot / n << ',' << regret_sum / n << ',' << exploit / n << ',' << zero / n << '\n';
    }
    out.files.push_back(path);
    Network net = draw_network(config, 0);
    Rng rng = engine_stream(config, 0);
    const RunLog log = run_network(config, net.process, rng);
    auto log_path = out_dir / "runlog.csv";
    std::ofstream los = open_csv(log_path, config);
    write_runlog_csv(los, log);
    out.files.push_back(log_path);
  }
  return out;
}

}  // namespace colmac
