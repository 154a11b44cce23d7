#include "colmac/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace colmac {

std::string_view experiment_name(Experiment e) {
  switch (e) {
    case Experiment::regret: return "regret";
    case Experiment::efficiency_cdf: return "efficiency_cdf";
    case Experiment::sample_path: return "sample_path";
  }
  return "unknown";
}

namespace {

struct Key {
  std::string name;
  std::string expected;
  std::function<void(Config&, std::string_view)> set;
  std::function<std::string(const Config&)> get;
};

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError(std::string(key), "key '" + std::string(key) + "': expected " + std::string(expected) +
                                          ", got '" + std::string(value) + "'");
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

template <typename Access>
Key real_key(std::string name, Access access) {
  return {name, "real",
          [name, access](Config& c, std::string_view v) {
            double x = 0.0;
            if (!parse_number(v, x)) bad_value(name, v, "real");
            access(c) = x;
          },
          [access](const Config& c) { return format_real(access(c)); }};
}

template <typename T, typename Access>
Key int_key(std::string name, Access access) {
  const std::string expected = std::is_unsigned_v<T> ? "unsigned integer" : "integer";
  return {name, expected,
          [name, access, expected](Config& c, std::string_view v) {
            T x{};
            if (!parse_number(v, x)) bad_value(name, v, expected);
            access(c) = x;
          },
          [access](const Config& c) { return std::to_string(access(c)); }};
}

template <typename Access>
Key bool_key(std::string name, Access access) {
  return {name, "bool",
          [name, access](Config& c, std::string_view v) {
            if (v == "true" || v == "1") access(c) = true;
            else if (v == "false" || v == "0") access(c) = false;
            else bad_value(name, v, "bool");
          },
          [access](const Config& c) { return std::string(access(c) ? "true" : "false"); }};
}

template <typename E, typename Access>
Key enum_key(std::string name, std::vector<std::pair<std::string, E>> names, Access access) {
  std::string expected;
  for (const auto& [text, value] : names) expected += (expected.empty() ? "" : "|") + text;
  return {name, expected,
          [name, names, access, expected](Config& c, std::string_view v) {
            for (const auto& [text, value] : names) {
              if (v == text) {
                access(c) = value;
                return;
              }
            }
            bad_value(name, v, expected);
          },
          [names, access](const Config& c) {
            for (const auto& [text, value] : names) {
              if (access(c) == value) return text;
            }
            return std::string("?");
          }};
}

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> k;
    // protocol
    k.push_back(int_key<int>("n_users", [](auto& c) -> auto& { return c.protocol.n_users; }));
    k.push_back(int_key<int>("n_channels", [](auto& c) -> auto& { return c.protocol.n_channels; }));
    k.push_back(real_key("q_max", [](auto& c) -> auto& { return c.protocol.q_max; }));
    k.push_back(real_key("delta_min", [](auto& c) -> auto& { return c.protocol.delta_min; }));
    k.push_back(int_key<int>("beta", [](auto& c) -> auto& { return c.protocol.beta; }));
    k.push_back(real_key("zeta", [](auto& c) -> auto& { return c.protocol.zeta; }));
    k.push_back(real_key("eps_init", [](auto& c) -> auto& { return c.protocol.eps_init; }));
    k.push_back(real_key("eps_final", [](auto& c) -> auto& { return c.protocol.eps_final; }));
    k.push_back(real_key("b_star", [](auto& c) -> auto& { return c.protocol.b_star; }));
    k.push_back(int_key<int>("i_max", [](auto& c) -> auto& { return c.protocol.i_max; }));
    k.push_back(int_key<std::uint64_t>("seed", [](auto& c) -> auto& { return c.protocol.rng_seed; }));
    k.push_back(enum_key<DitherMode>("dither_mode",
                                     {{"symmetric", DitherMode::symmetric}, {"one_sided", DitherMode::one_sided}},
                                     [](auto& c) -> auto& { return c.protocol.dither_mode; }));
    k.push_back(bool_key("theory_mode", [](auto& c) -> auto& { return c.protocol.theory_mode; }));
    // channel
    k.push_back(real_key("carrier_freq_hz", [](auto& c) -> auto& { return c.channel.carrier_freq_hz; }));
    k.push_back(real_key("total_bandwidth_hz", [](auto& c) -> auto& { return c.channel.total_bandwidth_hz; }));
    k.push_back(real_key("subchannel_bandwidth_hz",
                         [](auto& c) -> auto& { return c.channel.subchannel_bandwidth_hz; }));
    k.push_back(real_key("path_loss_exponent", [](auto& c) -> auto& { return c.channel.path_loss_exponent; }));
    k.push_back(real_key("speed_of_light", [](auto& c) -> auto& { return c.channel.speed_of_light; }));
    k.push_back(int_key<int>("n_taps", [](auto& c) -> auto& { return c.channel.n_taps; }));
    k.push_back(real_key("rayleigh_variance", [](auto& c) -> auto& { return c.channel.rayleigh_variance; }));
    k.push_back(real_key("final_tap_ratio", [](auto& c) -> auto& { return c.channel.final_tap_ratio; }));
    k.push_back(real_key("shadow_log_mean", [](auto& c) -> auto& { return c.channel.shadow_log_mean; }));
    k.push_back(real_key("shadow_log_variance", [](auto& c) -> auto& { return c.channel.shadow_log_variance; }));
    k.push_back(real_key("tx_power_mw", [](auto& c) -> auto& { return c.channel.tx_power_mw; }));
    k.push_back(real_key("noise_psd_dbm_hz", [](auto& c) -> auto& { return c.channel.noise_psd_dbm_hz; }));
    k.push_back(real_key("noise_figure_db", [](auto& c) -> auto& { return c.channel.noise_figure_db; }));
    k.push_back(real_key("coherence_time_s", [](auto& c) -> auto& { return c.channel.coherence_time_s; }));
    k.push_back(enum_key<ChannelMode>(
        "channel_mode", {{"static", ChannelMode::static_channel}, {"dynamic", ChannelMode::dynamic_channel}},
        [](auto& c) -> auto& { return c.channel.mode; }));
    // geometry
    k.push_back(real_key("disk_radius_m", [](auto& c) -> auto& { return c.geometry.disk_radius_m; }));
    k.push_back(real_key("ring_inner_m", [](auto& c) -> auto& { return c.geometry.ring_inner_m; }));
    k.push_back(real_key("ring_outer_m", [](auto& c) -> auto& { return c.geometry.ring_outer_m; }));
    k.push_back(real_key("link_distance_m", [](auto& c) -> auto& { return c.geometry.link_distance_m; }));
    k.push_back(int_key<int>("n_interferers", [](auto& c) -> auto& { return c.geometry.n_interferers; }));
    k.push_back(real_key("interferer_occupancy", [](auto& c) -> auto& { return c.geometry.interferer_occupancy; }));
    k.push_back(real_key("extra_occupancy", [](auto& c) -> auto& { return c.geometry.extra_occupancy; }));
    k.push_back(real_key("interferer_power_mw", [](auto& c) -> auto& { return c.geometry.interferer_power_mw; }));
    k.push_back(real_key("jammer_x_m", [](auto& c) -> auto& { return c.geometry.jammer_position.x(); }));
    k.push_back(real_key("jammer_y_m", [](auto& c) -> auto& { return c.geometry.jammer_position.y(); }));
    // schedule
    k.push_back(enum_key<ScheduleMode>(
        "schedule_mode", {{"exponential", ScheduleMode::exponential}, {"fixed", ScheduleMode::fixed}},
        [](auto& c) -> auto& { return c.schedule.mode; }));
    k.push_back(int_key<int>("n_epochs", [](auto& c) -> auto& { return c.schedule.n_epochs; }));
    k.push_back(real_key("slot_duration_s", [](auto& c) -> auto& { return c.schedule.slot_duration_s; }));
    k.push_back(int_key<long>("t1", [](auto& c) -> auto& { return c.schedule.t1; }));
    k.push_back(int_key<long>("t2_budget", [](auto& c) -> auto& { return c.schedule.t2_budget; }));
    k.push_back(int_key<int>("auction_iterations", [](auto& c) -> auto& { return c.schedule.auction_iterations; }));
    k.push_back(int_key<long>("t3_base", [](auto& c) -> auto& { return c.schedule.t3_base; }));
    k.push_back(int_key<long>("epoch_slots", [](auto& c) -> auto& { return c.schedule.epoch_slots; }));
    k.push_back(int_key<long>("setup_t1", [](auto& c) -> auto& { return c.schedule.setup_t1; }));
    k.push_back(int_key<long>("setup_t2_budget", [](auto& c) -> auto& { return c.schedule.setup_t2_budget; }));
    k.push_back(real_key("steady_epsilon", [](auto& c) -> auto& { return c.schedule.steady_epsilon; }));
    k.push_back(bool_key("warm_start", [](auto& c) -> auto& { return c.schedule.warm_start; }));
    k.push_back(bool_key("release_stale", [](auto& c) -> auto& { return c.schedule.release_stale; }));
    // harness
    k.push_back(enum_key<Experiment>("experiment",
                                     {{"regret", Experiment::regret},
                                      {"efficiency_cdf", Experiment::efficiency_cdf},
                                      {"sample_path", Experiment::sample_path}},
                                     [](auto& c) -> auto& { return c.experiment; }));
    k.push_back(int_key<int>("n_networks", [](auto& c) -> auto& { return c.n_networks; }));
    k.push_back(int_key<int>("threads", [](auto& c) -> auto& { return c.threads; }));
    return k;
  }();
  return keys;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

void Config::validate() const {
  try {
    protocol.validate();
    channel.validate(protocol.n_channels);
    schedule.validate();
    require(n_networks >= 1, "n_networks must be at least 1");
    require(threads >= 0, "threads must be nonnegative");
    require(geometry.ring_outer_m > geometry.ring_inner_m, "ring_outer_m must exceed ring_inner_m");
    require(geometry.link_distance_m > 0.0, "link_distance_m must be positive");
  } catch (const ContractViolation& e) {
    throw ConfigError("", std::string("invalid configuration: ") + e.what());
  }
}

void set_key(Config& config, std::string_view key, std::string_view value) {
  for (const Key& k : registry()) {
    if (k.name == key) {
      k.set(config, value);
      return;
    }
  }
  if (key == "rng_seed") {
    set_key(config, "seed", value);
    return;
  }
  throw ConfigError(std::string(key), "unknown key '" + std::string(key) + "'");
}

Config parse_config(std::string_view text, Config base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + ": empty key");
    set_key(base, key, value);
  }
  base.validate();
  return base;
}

Config load_config(const std::string& path, Config base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open configuration file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string dump_config(const Config& config) {
  std::string out;
  for (const Key& k : registry()) out += k.name + " = " + k.get(config) + "\n";
  return out;
}

std::string normalize_config(std::string_view text) { return dump_config(parse_config(text)); }

std::uint64_t config_hash(const Config& config) {
  // Worker count does not change results.
  Config canonical = config;
  canonical.threads = 0;
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : dump_config(canonical)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<std::string> preset_names() {
  return {"regret-table", "regret-desk", "setup-table", "steady-table", "steady-text",
          "shadowing-db", "networks-400", "dynamic"};
}

void apply_preset(Config& c, std::string_view name) {
  if (name == "regret-table") {
    // 32 users on 8 channels, 6 epochs, 1000 exploration slots, 400 auction iterations.
    c.experiment = Experiment::regret;
    c.protocol.n_users = 32;
    c.protocol.n_channels = 8;
    c.protocol.eps_init = 1.0;
    c.protocol.zeta = 0.9808;
    c.protocol.eps_final = c.protocol.delta_min / (8.0 * 32);
    c.protocol.b_star = 8.0 * 32 * c.protocol.q_max / c.protocol.delta_min;
    c.protocol.i_max = 400;
    c.schedule.mode = ScheduleMode::exponential;
    c.schedule.n_epochs = 6;
    c.schedule.t1 = 1000;
    c.schedule.t2_budget = 0;
    c.schedule.auction_iterations = 400;
    c.schedule.t3_base = 1000;
  } else if (name == "regret-desk") {
    // 8 users on 4 channels with the theoretical auction: eps fixed at dmin/8N,
    // b* = 8 N Q_M / dmin, iteration cap at the convergence bound.
    c.experiment = Experiment::regret;
    c.protocol.n_users = 8;
    c.protocol.n_channels = 4;
    c.protocol.eps_final = c.protocol.delta_min / (8.0 * 8);
    c.protocol.eps_init = c.protocol.eps_final;
    c.protocol.zeta = 1.0;
    c.protocol.b_star = 8.0 * 8 * c.protocol.q_max / c.protocol.delta_min;
    c.protocol.i_max = static_cast<int>(std::ceil(iteration_bound(c.protocol)));
    c.schedule.mode = ScheduleMode::exponential;
    c.schedule.n_epochs = 6;
    c.schedule.t1 = 4000;
    c.schedule.t2_budget = 0;
    c.schedule.auction_iterations = 0;
    c.schedule.t3_base = 4000;
  } else if (name == "setup-table") {
    c.schedule.mode = ScheduleMode::fixed;
    c.schedule.setup_t1 = 85000;
    c.schedule.setup_t2_budget = 15000;
    c.protocol.eps_init = 1.0;
    c.protocol.zeta = 0.9808;
    c.protocol.eps_final = 1.0 / 32.0;
    c.protocol.b_star = 4.0;
    c.protocol.i_max = 500;
  } else if (name == "steady-table") {
    c.schedule.mode = ScheduleMode::fixed;
    c.schedule.epoch_slots = 5000;
    c.schedule.t1 = 50;
    c.schedule.t2_budget = 200;
    c.schedule.auction_iterations = 4;
    c.schedule.steady_epsilon = 1.0 / 32.0;
  } else if (name == "steady-text") {
    c.schedule.mode = ScheduleMode::fixed;
    c.schedule.epoch_slots = 5000;
    c.schedule.t1 = 4;
    c.schedule.t2_budget = 48;
    c.schedule.auction_iterations = 4;
  } else if (name == "shadowing-db") {
    c.channel.shadow_log_variance = ChannelParams::db_shadowing().shadow_log_variance;
  } else if (name == "networks-400") {
    c.n_networks = 400;
  } else if (name == "dynamic") {
    c.channel.mode = ChannelMode::dynamic_channel;
  } else {
    throw ConfigError("preset", "unknown preset '" + std::string(name) + "'");
  }
}

}  // namespace colmac
