#include "colmac/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

namespace colmac {

namespace {

Eigen::Vector2d uniform_in_annulus(double inner, double outer, Rng& rng) {
  // Area-uniform radius.
  const double r2 = std::uniform_real_distribution<double>(inner * inner, outer * outer)(rng);
  const double angle = 2.0 * std::numbers::pi * uniform01(rng);
  const double r = std::sqrt(r2);
  return {r * std::cos(angle), r * std::sin(angle)};
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

ChannelParams ChannelParams::db_shadowing() {
  ChannelParams cp;
  // 5 dB variance in the dB domain, expressed for the natural-log factor.
  const double sigma_db = std::sqrt(5.0);
  const double sigma_ln = sigma_db * std::log(10.0) / 10.0;
  cp.shadow_log_variance = sigma_ln * sigma_ln;
  return cp;
}

double ChannelParams::noise_power_mw() const {
  return db_to_linear(noise_psd_dbm_hz + noise_figure_db) * subchannel_bandwidth_hz;
}

double ChannelParams::max_tap_delay_s(double distance_m) const {
  return std::pow(10.0, 0.25) * distance_m / speed_of_light;
}

double ChannelParams::subchannel_offset_hz(int k, int n_channels) const {
  return (k + 0.5) * subchannel_bandwidth_hz - 0.5 * n_channels * subchannel_bandwidth_hz;
}

void ChannelParams::validate(int n_channels) const {
  require(n_taps >= 1, "n_taps must be positive");
  require(rayleigh_variance > 0.0, "rayleigh_variance must be positive");
  require(final_tap_ratio > 0.0 && final_tap_ratio <= 1.0, "final_tap_ratio must lie in (0, 1]");
  require(shadow_log_variance >= 0.0, "shadow_log_variance must be nonnegative");
  require(n_channels * subchannel_bandwidth_hz <= total_bandwidth_hz * (1.0 + 1e-12),
          "K sub-channels must fit in the total bandwidth");
  require(coherence_time_s > 0.0, "coherence_time_s must be positive");
}

Geometry place_nodes(const ProtocolParams& params, const GeometryConfig& config, Rng& rng) {
  const int n = params.n_users;
  const int k = params.n_channels;
  const int m = params.n_slots();
  Geometry g;
  g.tx.resize(2, n);
  g.rx.resize(2, n);
  for (int u = 0; u < n; ++u) {
    g.tx.col(u) = uniform_in_annulus(0.0, config.disk_radius_m, rng);
    g.rx.col(u) = g.tx.col(u) + uniform_in_annulus(0.0, config.link_distance_m, rng);
  }

  g.jammer = config.jammer_position;
  std::vector<int> channels(static_cast<std::size_t>(k));
  std::iota(channels.begin(), channels.end(), 0);
  std::shuffle(channels.begin(), channels.end(), rng);
  g.jammed_channels.assign(channels.begin(), channels.begin() + k / 2);
  std::sort(g.jammed_channels.begin(), g.jammed_channels.end());

  const int n_res = k * m;
  std::vector<char> occupied(static_cast<std::size_t>(n_res), 0);
  std::bernoulli_distribution occupies(config.interferer_occupancy);
  for (int i = 0; i < config.n_interferers; ++i) {
    Interferer source;
    source.position = uniform_in_annulus(config.ring_inner_m, config.ring_outer_m, rng);
    source.power_mw = config.interferer_power_mw;
    for (int a = 0; a < n_res; ++a) {
      if (occupies(rng)) {
        source.resources.push_back(a);
        occupied[static_cast<std::size_t>(a)] = 1;
      }
    }
    g.interferers.push_back(std::move(source));
  }
  g.n_ring_interferers = config.n_interferers;

  std::vector<int> remaining;
  for (int a = 0; a < n_res; ++a) {
    const int channel = a / m;
    const bool jammed = std::binary_search(g.jammed_channels.begin(), g.jammed_channels.end(), channel);
    if (!jammed && !occupied[static_cast<std::size_t>(a)]) remaining.push_back(a);
  }
  const auto n_extra =
      static_cast<std::size_t>(std::lround(config.extra_occupancy * static_cast<double>(remaining.size())));
  std::shuffle(remaining.begin(), remaining.end(), rng);
  for (std::size_t i = 0; i < n_extra; ++i) {
    Interferer source;
    source.position = uniform_in_annulus(config.ring_inner_m, config.ring_outer_m, rng);
    source.power_mw = config.interferer_power_mw;
    source.resources = {remaining[i]};
    g.interferers.push_back(std::move(source));
  }
  return g;
}

double path_gain(double distance_m, double exponent) {
  return std::pow(std::max(distance_m, 1.0), -exponent);
}

std::complex<double> draw_tap(double component_variance, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(component_variance));
  const double re = gauss(rng);
  const double im = gauss(rng);
  return {re, im};
}

Eigen::VectorXd tap_profile(const ChannelParams& cp) {
  Eigen::VectorXd profile(cp.n_taps);
  for (int i = 0; i < cp.n_taps; ++i) {
    const double x = cp.n_taps > 1 ? static_cast<double>(i) / (cp.n_taps - 1) : 0.0;
    profile[i] = std::pow(cp.final_tap_ratio, x);
  }
  return profile;
}

void redraw_taps(Link& link, const ChannelParams& cp, Rng& rng) {
  const Eigen::VectorXd profile = tap_profile(cp);
  link.taps.resize(cp.n_taps);
  for (int i = 0; i < cp.n_taps; ++i) link.taps[i] = draw_tap(cp.rayleigh_variance * profile[i], rng);
}

Link draw_link(double distance_m, const ChannelParams& cp, Rng& rng) {
  Link link;
  link.distance_m = distance_m;
  std::normal_distribution<double> log_shadow(cp.shadow_log_mean, std::sqrt(cp.shadow_log_variance));
  link.shadow = std::exp(log_shadow(rng));
  link.delays_s.resize(cp.n_taps);
  std::uniform_real_distribution<double> delay(0.0, cp.max_tap_delay_s(distance_m));
  for (int i = 0; i < cp.n_taps; ++i) link.delays_s[i] = delay(rng);
  // Earliest arrival carries the strongest mean power.
  std::sort(link.delays_s.begin(), link.delays_s.end());
  redraw_taps(link, cp, rng);
  return link;
}

Eigen::VectorXd frequency_power(const Link& link, const ChannelParams& cp, int n_channels) {
  Eigen::VectorXd power(n_channels);
  for (int k = 0; k < n_channels; ++k) {
    const double f = cp.subchannel_offset_hz(k, n_channels);
    std::complex<double> h{0.0, 0.0};
    for (Eigen::Index i = 0; i < link.taps.size(); ++i) {
      h += link.taps[i] * std::polar(1.0, -2.0 * std::numbers::pi * f * link.delays_s[i]);
    }
    power[k] = std::norm(h);
  }
  return power;
}

ChannelRealization realize_channel(const Geometry& geometry, const ChannelParams& cp, Rng& rng) {
  ChannelRealization real;
  real.geometry = geometry;
  const int n = geometry.n_users();
  real.signal.reserve(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    real.signal.push_back(draw_link((geometry.tx.col(u) - geometry.rx.col(u)).norm(), cp, rng));
  }
  real.interference.resize(geometry.interferers.size());
  for (std::size_t i = 0; i < geometry.interferers.size(); ++i) {
    real.interference[i].reserve(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
      const double d = (geometry.interferers[i].position - geometry.rx.col(u)).norm();
      real.interference[i].push_back(draw_link(d, cp, rng));
    }
  }
  return real;
}

Eigen::MatrixXd sinr_matrix(const ChannelRealization& real, const ChannelParams& cp,
                            const ProtocolParams& params) {
  const int n = params.n_users;
  const int k_count = params.n_channels;
  const int m = params.n_slots();
  require(real.geometry.n_users() == n && static_cast<int>(real.signal.size()) == n,
          "realization must cover all N links");

  const double noise = cp.noise_power_mw();
  Eigen::MatrixXd interference = Eigen::MatrixXd::Constant(n, k_count * m, noise);
  for (std::size_t i = 0; i < real.interference.size(); ++i) {
    const Interferer& source = real.geometry.interferers[i];
    if (source.resources.empty()) continue;
    for (int u = 0; u < n; ++u) {
      const Link& link = real.interference[i][static_cast<std::size_t>(u)];
      const Eigen::VectorXd fp = frequency_power(link, cp, k_count);
      const double scale = source.power_mw * path_gain(link.distance_m, cp.path_loss_exponent) * link.shadow;
      for (int a : source.resources) interference(u, a) += scale * fp[a / m];
    }
  }

  Eigen::MatrixXd sinr(n, k_count * m);
  for (int u = 0; u < n; ++u) {
    const Link& link = real.signal[static_cast<std::size_t>(u)];
    const Eigen::VectorXd fp = frequency_power(link, cp, k_count);
    const double scale = cp.tx_power_mw * path_gain(link.distance_m, cp.path_loss_exponent) * link.shadow;
    for (int a = 0; a < k_count * m; ++a) sinr(u, a) = scale * fp[a / m] / interference(u, a);
  }
  return sinr;
}

int rate_level(double sinr, const ProtocolParams& params) {
  if (!(sinr > 0.0)) return 0;
  const int max_level = params.n_levels();
  if (std::isinf(sinr)) return max_level;
  const double capacity = std::log2(1.0 + sinr);
  const int level = static_cast<int>(std::floor(capacity / params.delta_min + 1e-12));
  return std::clamp(level, 0, max_level);
}

UtilityMatrix qos_matrix(const ChannelRealization& real, const ChannelParams& cp,
                         const ProtocolParams& params) {
  const Eigen::MatrixXd sinr = sinr_matrix(real, cp, params);
  const int m = params.n_slots();
  Eigen::MatrixXi levels(sinr.rows(), sinr.cols());
  for (Eigen::Index u = 0; u < sinr.rows(); ++u) {
    const bool southern = real.geometry.is_southern(static_cast<int>(u));
    for (Eigen::Index a = 0; a < sinr.cols(); ++a) {
      const int channel = static_cast<int>(a) / m;
      const bool jammed = southern && std::binary_search(real.geometry.jammed_channels.begin(),
                                                         real.geometry.jammed_channels.end(), channel);
      levels(u, a) = jammed ? 0 : rate_level(sinr(u, a), params);
    }
  }
  return UtilityMatrix(std::move(levels), params.delta_min, params.n_levels());
}

double qos_sample(double q_mean, const ProtocolParams& params, Rng& rng) {
  require(q_mean >= 0.0 && q_mean <= params.q_max, "qos_sample mean must lie in [0, Q_M]");
  const double half_width = std::min({0.5 * params.delta_min, q_mean, params.q_max - q_mean});
  if (half_width <= 0.0) return q_mean;
  return q_mean + std::uniform_real_distribution<double>(-half_width, half_width)(rng);
}

ChannelRealization evolve(const ChannelRealization& real, const ChannelParams& cp, Rng& rng) {
  ChannelRealization next = real;
  if (cp.mode == ChannelMode::static_channel) return next;
  for (Link& link : next.signal) redraw_taps(link, cp, rng);
  for (auto& per_user : next.interference) {
    for (Link& link : per_user) redraw_taps(link, cp, rng);
  }
  return next;
}

void write_geometry_csv(std::ostream& os, const Geometry& geometry) {
  os << "kind,index,x,y,resources\n";
  for (int u = 0; u < geometry.n_users(); ++u) {
    os << "tx," << u << ',' << geometry.tx(0, u) << ',' << geometry.tx(1, u) << ",\n";
    os << "rx," << u << ',' << geometry.rx(0, u) << ',' << geometry.rx(1, u) << ",\n";
  }
  for (std::size_t i = 0; i < geometry.interferers.size(); ++i) {
    const Interferer& s = geometry.interferers[i];
    os << (static_cast<int>(i) < geometry.n_ring_interferers ? "interferer," : "extra,") << i << ','
       << s.position.x() << ',' << s.position.y() << ',';
    for (std::size_t j = 0; j < s.resources.size(); ++j) os << (j ? " " : "") << s.resources[j];
    os << '\n';
  }
  os << "jammer,0," << geometry.jammer.x() << ',' << geometry.jammer.y() << ',';
  for (std::size_t j = 0; j < geometry.jammed_channels.size(); ++j) {
    os << (j ? " " : "") << geometry.jammed_channels[j];
  }
  os << '\n';
}

void write_matrix_csv(std::ostream& os, const UtilityMatrix& q) {
  os << "user";
  for (int a = 0; a < q.n_resources(); ++a) os << ",r" << a;
  os << '\n';
  for (int u = 0; u < q.n_users(); ++u) {
    os << u;
    for (int a = 0; a < q.n_resources(); ++a) os << ',' << q.rate(u, a);
    os << '\n';
  }
}

}  // namespace colmac
