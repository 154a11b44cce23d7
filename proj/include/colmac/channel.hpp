#pragma once

#include "colmac/rng.hpp"
#include "colmac/types.hpp"

#include <complex>
#include <iosfwd>
#include <vector>

namespace colmac {

enum class ChannelMode { static_channel, dynamic_channel };

/// Statistical wireless channel. Defaults are the 5G-style table values.
struct ChannelParams {
  double carrier_freq_hz = 2e9;
  double total_bandwidth_hz = 40e6;
  double subchannel_bandwidth_hz = 5e6;
  double path_loss_exponent = 2.0;
  double speed_of_light = 3e8;
  int n_taps = 7;
  /// Per-component variance of a unit-profile Rayleigh tap; E|h|^2 = 2 * variance.
  double rayleigh_variance = 0.01;
  /// Mean power of the last tap relative to the first.
  double final_tap_ratio = 0.1;
  double shadow_log_mean = 0.0;
  /// Variance of the natural-log shadowing factor.
  double shadow_log_variance = 0.01;
  double tx_power_mw = 1.0;
  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 2.0;
  double coherence_time_s = 5e-3;
  ChannelMode mode = ChannelMode::static_channel;

  /// Shadowing preset with a 5 dB log-normal variance instead of the table's 0.01.
  static ChannelParams db_shadowing();

  [[nodiscard]] double noise_power_mw() const;
  [[nodiscard]] double max_tap_delay_s(double distance_m) const;
  /// Baseband centre offset of sub-channel k.
  [[nodiscard]] double subchannel_offset_hz(int k, int n_channels) const;
  void validate(int n_channels) const;
};

/// Placement and external-interference layout.
struct GeometryConfig {
  double disk_radius_m = 100.0;
  double ring_inner_m = 100.0;
  double ring_outer_m = 200.0;
  /// Receivers are uniform in a disk of this radius around their transmitter.
  double link_distance_m = 20.0;
  int n_interferers = 16;
  /// Probability that a ring interferer statically occupies a given resource.
  double interferer_occupancy = 0.25;
  /// Fraction of the still-free, non-jammed resources given extra interference.
  double extra_occupancy = 0.20;
  double interferer_power_mw = 1.0;
  Eigen::Vector2d jammer_position{0.0, -150.0};
};

struct Interferer {
  Eigen::Vector2d position;
  std::vector<int> resources;
  double power_mw = 1.0;
};

struct Geometry {
  Eigen::Matrix2Xd tx;  // one column per user
  Eigen::Matrix2Xd rx;
  std::vector<Interferer> interferers;  // ring interferers first, then extra ones
  int n_ring_interferers = 0;
  Eigen::Vector2d jammer{0.0, -150.0};
  std::vector<int> jammed_channels;  // K/2 channels, sorted

  [[nodiscard]] int n_users() const { return static_cast<int>(tx.cols()); }
  /// Users whose receiver lies in the southern half of the disk.
  [[nodiscard]] bool is_southern(int user) const { return rx(1, user) < 0.0; }
};

/// Multipath link: tap delays are fixed for the run, tap gains fade.
struct Link {
  double distance_m = 1.0;
  double shadow = 1.0;
  Eigen::VectorXd delays_s;
  Eigen::VectorXcd taps;
};

struct ChannelRealization {
  Geometry geometry;
  std::vector<Link> signal;                     // per user
  std::vector<std::vector<Link>> interference;  // [interferer][user]
};

Geometry place_nodes(const ProtocolParams& params, const GeometryConfig& config, Rng& rng);

/// max(d, 1 m)^-alpha.
double path_gain(double distance_m, double exponent);

/// One zero-mean circular complex Gaussian tap with per-component variance.
std::complex<double> draw_tap(double component_variance, Rng& rng);

/// Mean power profile of the taps relative to the first (decays to final_tap_ratio).
Eigen::VectorXd tap_profile(const ChannelParams& cp);

Link draw_link(double distance_m, const ChannelParams& cp, Rng& rng);
void redraw_taps(Link& link, const ChannelParams& cp, Rng& rng);

/// |H(f_k)|^2 for every sub-channel of the link (without path loss or shadowing).
Eigen::VectorXd frequency_power(const Link& link, const ChannelParams& cp, int n_channels);

ChannelRealization realize_channel(const Geometry& geometry, const ChannelParams& cp, Rng& rng);

/// Received signal-to-interference-plus-noise ratio per user and resource.
Eigen::MatrixXd sinr_matrix(const ChannelRealization& real, const ChannelParams& cp,
                            const ProtocolParams& params);

/// Largest rate level whose Shannon requirement log2(1 + SINR) >= rate is met.
int rate_level(double sinr, const ProtocolParams& params);

UtilityMatrix qos_matrix(const ChannelRealization& real, const ChannelParams& cp,
                         const ProtocolParams& params);

/// Bounded i.i.d. sample with mean q_mean: q_mean + U(-h, h) with
/// h = min(delta_min / 2, q_mean, Q_M - q_mean).
double qos_sample(double q_mean, const ProtocolParams& params, Rng& rng);

/// Block fading step: static mode returns the input; dynamic mode redraws
/// every tap gain and keeps geometry, delays, shadowing and occupancy.
ChannelRealization evolve(const ChannelRealization& real, const ChannelParams& cp, Rng& rng);

/// CSV debugging dumps.
void write_geometry_csv(std::ostream& os, const Geometry& geometry);
void write_matrix_csv(std::ostream& os, const UtilityMatrix& q);

}  // namespace colmac
