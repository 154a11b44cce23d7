#include "colmac/config.hpp"

#include <doctest.h>

#include <algorithm>

using namespace colmac;

TEST_CASE("defaults follow the parameter tables") {
  const Config c;
  CHECK(c.protocol.n_users == 32);
  CHECK(c.protocol.n_channels == 8);
  CHECK(c.protocol.q_max == 8.0);
  CHECK(c.protocol.beta == 4);
  CHECK(c.protocol.b_star == 4.0);
  CHECK(c.protocol.i_max == 500);
  CHECK(c.channel.carrier_freq_hz == 2e9);
  CHECK(c.channel.n_taps == 7);
  CHECK(c.schedule.epoch_slots == 5000);
  CHECK(c.experiment == Experiment::efficiency_cdf);
  CHECK(c.n_networks == 50);
  c.validate();
}

TEST_CASE("parse applies keys, comments and whitespace") {
  const Config c = parse_config(
      "# header comment\n"
      "n_users = 16   # trailing\n"
      "\n"
      "  n_channels=4\n"
      "channel_mode = dynamic\n"
      "experiment = regret\n"
      "warm_start = false\n"
      "zeta = 0.5\n");
  CHECK(c.protocol.n_users == 16);
  CHECK(c.protocol.n_channels == 4);
  CHECK(c.channel.mode == ChannelMode::dynamic_channel);
  CHECK(c.experiment == Experiment::regret);
  CHECK_FALSE(c.schedule.warm_start);
  CHECK(c.protocol.zeta == 0.5);
}

TEST_CASE("dump round trip") {
  Config c;
  c.protocol.zeta = 0.123456789012345;
  c.channel.noise_figure_db = 3.5;
  c.schedule.mode = ScheduleMode::exponential;
  c.schedule.n_epochs = 7;
  c.protocol.rng_seed = 18446744073709551615ULL;
  const Config back = parse_config(dump_config(c));
  CHECK(dump_config(back) == dump_config(c));
  CHECK(back.protocol.zeta == c.protocol.zeta);
  CHECK(back.protocol.rng_seed == c.protocol.rng_seed);
  CHECK(config_hash(back) == config_hash(c));
}

TEST_CASE("errors name the offending key") {
  try {
    parse_config("n_userz = 3\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "n_userz");
  }
  try {
    parse_config("n_users = many\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "n_users");
  }
  CHECK_THROWS_AS(parse_config("n_users = 3.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("zeta = 0.5x\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("warm_start = maybe\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("channel_mode = wobbly\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("just text\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("= 4\n"), ConfigError);
}

TEST_CASE("cross-field validation") {
  CHECK_THROWS_AS(parse_config("n_users = 30\n"), ConfigError);  // 30 users on 8 channels
  CHECK_THROWS_AS(parse_config("ring_outer_m = 50\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("n_networks = 0\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/colmac.cfg"), ConfigError);
}

TEST_CASE("seed alias") {
  CHECK(parse_config("rng_seed = 99\n").seed() == 99);
  CHECK(parse_config("seed = 98\n").seed() == 98);
}

TEST_CASE("presets") {
  const auto names = preset_names();
  CHECK(std::find(names.begin(), names.end(), "regret-table") != names.end());
  for (const std::string& n : names) {
    Config c;
    apply_preset(c, n);
    c.validate();
  }
  Config c;
  apply_preset(c, "regret-table");
  CHECK(c.schedule.mode == ScheduleMode::exponential);
  CHECK(c.protocol.eps_final == doctest::Approx(1.0 / 256.0));
  CHECK(c.protocol.b_star == 2048.0);
  CHECK(c.protocol.lambda() == 6);

  Config d;
  apply_preset(d, "dynamic");
  CHECK(d.channel.mode == ChannelMode::dynamic_channel);
  apply_preset(d, "networks-400");
  CHECK(d.n_networks == 400);

  try {
    apply_preset(d, "nope");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "preset");
  }
}

TEST_CASE("hash tracks content, not formatting") {
  const Config a = parse_config("n_users = 16\nn_channels = 4\n");
  const Config b = parse_config("  n_channels = 4 # same\nn_users=16\n");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(normalize_config("n_users = 16\nn_channels = 4\n") == normalize_config("n_channels=4\nn_users=16"));
  CHECK(config_hash(a) != config_hash(Config{}));
}

TEST_CASE("experiment names") {
  CHECK(experiment_name(Experiment::regret) == "regret");
  CHECK(experiment_name(Experiment::efficiency_cdf) == "efficiency_cdf");
  CHECK(experiment_name(Experiment::sample_path) == "sample_path");
}
