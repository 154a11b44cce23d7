#include "colmac/channel.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

using namespace colmac;

TEST_CASE("path gain clamps below one metre") {
  CHECK(path_gain(0.2, 2.0) == 1.0);
  CHECK(path_gain(1.0, 2.0) == 1.0);
  CHECK(path_gain(10.0, 2.0) == doctest::Approx(0.01));
  CHECK(path_gain(100.0, 3.0) == doctest::Approx(1e-6));
}

TEST_CASE("thermal noise over one sub-channel") {
  const ChannelParams cp;
  // -174 dBm/Hz + 2 dB over 5 MHz = -105.01 dBm.
  const double expected_dbm = -174.0 + 2.0 + 10.0 * std::log10(5e6);
  CHECK(10.0 * std::log10(cp.noise_power_mw()) == doctest::Approx(expected_dbm));
}

TEST_CASE("tap power profile decays geometrically to the final ratio") {
  const ChannelParams cp;
  const Eigen::VectorXd p = tap_profile(cp);
  REQUIRE(p.size() == 7);
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[6] == doctest::Approx(0.1));
  for (int i = 1; i < 7; ++i) CHECK(p[i] / p[i - 1] == doctest::Approx(std::pow(0.1, 1.0 / 6.0)));
}

TEST_CASE("Rayleigh tap power has mean twice the component variance") {
  Rng rng(4);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += std::norm(draw_tap(0.01, rng));
  // |h|^2 is exponential with mean 0.02; sd of the mean is 0.02/sqrt(n).
  CHECK(std::abs(sum / n - 0.02) < 5 * 0.02 / std::sqrt(double(n)));
}

TEST_CASE("sub-channel centres are symmetric around the carrier") {
  const ChannelParams cp;
  CHECK(cp.subchannel_offset_hz(0, 8) == doctest::Approx(-17.5e6));
  CHECK(cp.subchannel_offset_hz(7, 8) == doctest::Approx(17.5e6));
  CHECK(cp.max_tap_delay_s(30.0) == doctest::Approx(std::pow(10.0, 0.25) * 1e-7));
}

TEST_CASE("single-tap link is frequency flat") {
  ChannelParams cp;
  cp.n_taps = 1;
  Rng rng(8);
  const Link link = draw_link(20.0, cp, rng);
  const Eigen::VectorXd fp = frequency_power(link, cp, 8);
  for (int k = 0; k < 8; ++k) CHECK(fp[k] == doctest::Approx(std::norm(link.taps[0])));
}

TEST_CASE("rate level is the floor of the Shannon rate in Δmin steps") {
  ProtocolParams p;
  CHECK(rate_level(0.0, p) == 0);
  CHECK(rate_level(-1.0, p) == 0);
  CHECK(rate_level(3.0, p) == 2);                        // log2(4) = 2
  CHECK(rate_level(std::pow(2.0, 3.5) - 1.0, p) == 3);   // 3.5 bits
  CHECK(rate_level(1e12, p) == 8);
  CHECK(rate_level(std::numeric_limits<double>::infinity(), p) == 8);
  p.delta_min = 0.5;
  CHECK(rate_level(std::pow(2.0, 3.5) - 1.0, p) == 7);
}

TEST_CASE("node placement respects the geometry") {
  ProtocolParams params;
  GeometryConfig cfg;
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Geometry g = place_nodes(params, cfg, rng);
    REQUIRE(g.n_users() == 32);
    for (int u = 0; u < 32; ++u) {
      CHECK(g.tx.col(u).norm() <= cfg.disk_radius_m);
      CHECK((g.rx.col(u) - g.tx.col(u)).norm() <= cfg.link_distance_m);
    }
    CHECK(g.n_ring_interferers == 16);
    for (const Interferer& s : g.interferers) {
      CHECK(s.position.norm() >= cfg.ring_inner_m);
      CHECK(s.position.norm() <= cfg.ring_outer_m);
    }
    CHECK(g.jammed_channels.size() == 4);
    CHECK(std::is_sorted(g.jammed_channels.begin(), g.jammed_channels.end()));
    CHECK(g.jammer == Eigen::Vector2d(0.0, -150.0));

    // Extra interferers: one each on round(20%) of the free, non-jammed resources.
    std::vector<char> taken(32, 0);
    for (int i = 0; i < g.n_ring_interferers; ++i) {
      for (int a : g.interferers[static_cast<std::size_t>(i)].resources) taken[static_cast<std::size_t>(a)] = 1;
    }
    int free_count = 0;
    for (int a = 0; a < 32; ++a) {
      const bool jammed = std::count(g.jammed_channels.begin(), g.jammed_channels.end(), a / 4) > 0;
      if (!jammed && !taken[static_cast<std::size_t>(a)]) ++free_count;
    }
    const int extra = static_cast<int>(g.interferers.size()) - g.n_ring_interferers;
    CHECK(extra == static_cast<int>(std::lround(0.2 * free_count)));
    for (std::size_t i = 16; i < g.interferers.size(); ++i) {
      REQUIRE(g.interferers[i].resources.size() == 1);
      const int a = g.interferers[i].resources[0];
      CHECK_FALSE(taken[static_cast<std::size_t>(a)]);
    }
  }
}

TEST_CASE("ring interferer occupancy is about one quarter") {
  ProtocolParams params;
  GeometryConfig cfg;
  Rng rng(13);
  long occupied = 0;
  long total = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Geometry g = place_nodes(params, cfg, rng);
    for (int i = 0; i < g.n_ring_interferers; ++i) {
      occupied += static_cast<long>(g.interferers[static_cast<std::size_t>(i)].resources.size());
      total += 32;
    }
  }
  const double rate = double(occupied) / double(total);
  CHECK(std::abs(rate - 0.25) < 5 * std::sqrt(0.25 * 0.75 / double(total)));
}

TEST_CASE("jammed southern users see rate zero on jammed channels") {
  ProtocolParams params;
  const ChannelParams cp;
  Rng rng(21);
  const Geometry g = place_nodes(params, GeometryConfig{}, rng);
  const ChannelRealization real = realize_channel(g, cp, rng);
  const UtilityMatrix q = qos_matrix(real, cp, params);
  CHECK(q.n_users() == 32);
  CHECK(q.n_resources() == 32);
  int southern = 0;
  for (int u = 0; u < 32; ++u) {
    if (!g.is_southern(u)) continue;
    ++southern;
    for (int k : g.jammed_channels) {
      for (int m = 0; m < 4; ++m) CHECK(q.levels()(u, k * 4 + m) == 0);
    }
  }
  CHECK(southern > 0);
  CHECK(q.levels().minCoeff() >= 0);
  CHECK(q.levels().maxCoeff() <= 8);
}

TEST_CASE("SINR matrix is constant across the slots of one channel without interference") {
  ProtocolParams params;
  params.n_users = 8;
  params.n_channels = 4;
  GeometryConfig cfg;
  cfg.n_interferers = 0;
  cfg.extra_occupancy = 0.0;
  const ChannelParams cp;
  Rng rng(30);
  const Geometry g = place_nodes(params, cfg, rng);
  const ChannelRealization real = realize_channel(g, cp, rng);
  const Eigen::MatrixXd sinr = sinr_matrix(real, cp, params);
  for (int u = 0; u < 8; ++u) {
    for (int k = 0; k < 4; ++k) CHECK(sinr(u, 2 * k) == doctest::Approx(sinr(u, 2 * k + 1)));
    // Signal-only SINR from first principles.
    const Link& l = real.signal[static_cast<std::size_t>(u)];
    const Eigen::VectorXd fp = frequency_power(l, cp, 4);
    const double expected = cp.tx_power_mw * std::pow(std::max(l.distance_m, 1.0), -2.0) * l.shadow * fp[0] /
                            cp.noise_power_mw();
    CHECK(sinr(u, 0) == doctest::Approx(expected));
  }
}

TEST_CASE("QoS samples are bounded and mean-preserving") {
  ProtocolParams p;
  Rng rng(31);
  for (double q : {0.0, 0.25, 1.0, 4.0, 7.75, 8.0}) {
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double s = qos_sample(q, p, rng);
      CHECK(s >= 0.0);
      CHECK(s <= p.q_max);
      CHECK(std::abs(s - q) <= 0.5 + 1e-12);
      sum += s;
    }
    // Uniform half-width <= 0.5: sd of the mean <= 0.5/sqrt(3n).
    CHECK(std::abs(sum / n - q) < 5 * 0.5 / std::sqrt(3.0 * n));
  }
  CHECK(qos_sample(0.0, p, rng) == 0.0);
  CHECK_THROWS_AS(qos_sample(9.0, p, rng), ContractViolation);
}

TEST_CASE("evolve redraws tap gains only") {
  ProtocolParams params;
  ChannelParams cp;
  Rng rng(40);
  const Geometry g = place_nodes(params, GeometryConfig{}, rng);
  const ChannelRealization real = realize_channel(g, cp, rng);

  const ChannelRealization same = evolve(real, cp, rng);
  CHECK(same.signal[0].taps == real.signal[0].taps);

  cp.mode = ChannelMode::dynamic_channel;
  const ChannelRealization next = evolve(real, cp, rng);
  for (std::size_t u = 0; u < real.signal.size(); ++u) {
    CHECK(next.signal[u].delays_s == real.signal[u].delays_s);
    CHECK(next.signal[u].shadow == real.signal[u].shadow);
    CHECK(next.signal[u].distance_m == real.signal[u].distance_m);
    CHECK(next.signal[u].taps != real.signal[u].taps);
  }
  CHECK(next.geometry.jammed_channels == real.geometry.jammed_channels);
}

TEST_CASE("decibel shadowing preset") {
  const double sigma_ln = std::sqrt(5.0) * std::log(10.0) / 10.0;
  CHECK(ChannelParams::db_shadowing().shadow_log_variance == doctest::Approx(sigma_ln * sigma_ln));
}

TEST_CASE("CSV dumps") {
  ProtocolParams params;
  params.n_users = 4;
  params.n_channels = 2;
  Rng rng(50);
  const Geometry g = place_nodes(params, GeometryConfig{}, rng);
  std::ostringstream geo;
  write_geometry_csv(geo, g);
  CHECK(geo.str().rfind("kind,index,x,y,resources\n", 0) == 0);
  CHECK(geo.str().find("jammer,0,0,-150,") != std::string::npos);

  Eigen::MatrixXi levels(2, 2);
  levels << 1, 2, 3, 4;
  std::ostringstream m;
  write_matrix_csv(m, UtilityMatrix(levels, 1.0, 8));
  CHECK(m.str() == "user,r0,r1\n0,1,2\n1,3,4\n");
}
