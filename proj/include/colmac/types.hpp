#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace colmac {

/// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void require(bool condition, const std::string& what) {
  if (!condition) throw ContractViolation(what);
}

/// Marks a user without a resource in an ActionProfile.
inline constexpr int kUnassigned = -1;

/// One (channel, slot) cell of the OFDMA grid, 0-based.
///
/// Resources are stored linearly as `channel * n_slots + slot` everywhere in
/// the library; `index()` and `from_index()` are the only conversions.
struct Resource {
  int channel = 0;
  int slot = 0;

  [[nodiscard]] int index(int n_slots) const { return channel * n_slots + slot; }
  static Resource from_index(int index, int n_slots) { return {index / n_slots, index % n_slots}; }

  friend bool operator==(const Resource&, const Resource&) = default;
};

/// One resource index per user; entries may be kUnassigned.
using ActionProfile = Eigen::VectorXi;

/// Real-valued N x (K*M) matrices: dithered estimates, bids, profits.
using RateMatrix = Eigen::MatrixXd;

enum class DitherMode { symmetric, one_sided };

/// Global protocol parameters shared by every phase.
struct ProtocolParams {
  int n_users = 32;      // N
  int n_channels = 8;    // K
  double q_max = 8.0;    // Q_M, bits per channel use
  double delta_min = 1.0;
  int beta = 4;          // slots per contention block
  double zeta = 0.9808;  // epsilon scaling factor
  double eps_init = 1.0;
  double eps_final = 1.0 / 32.0;
  double b_star = 4.0;   // maximal discrete bid
  int i_max = 500;       // auction iteration cap
  std::uint64_t rng_seed = 1;
  DitherMode dither_mode = DitherMode::symmetric;
  /// Enforce eps_final <= delta_min / (8N).
  bool theory_mode = false;

  [[nodiscard]] int n_slots() const { return n_users / n_channels; }  // M
  [[nodiscard]] int n_resources() const { return n_channels * n_slots(); }
  [[nodiscard]] double delta() const { return delta_min / q_max; }
  /// Number of deterministic contention blocks: smallest lambda >= 1 with beta^lambda >= b*.
  [[nodiscard]] int lambda() const;
  [[nodiscard]] int n_levels() const { return static_cast<int>(q_max / delta_min + 0.5); }

  /// Throws ContractViolation naming the first violated invariant.
  void validate() const;

  /// N=n, K=k with the theoretical choices eps* = Δmin/8N and b* = 8 N Q_M / Δmin.
  static ProtocolParams theoretical(int n_users, int n_channels, double q_max = 8.0,
                                    double delta_min = 1.0);
};

/// Mean QoS matrix Q stored as integer multiples of delta_min.
class UtilityMatrix {
 public:
  UtilityMatrix() = default;
  UtilityMatrix(Eigen::MatrixXi levels, double delta_min, int max_level);

  /// Builds from real rates; every entry must be a multiple of delta_min within [0, Q_M].
  static UtilityMatrix from_rates(const Eigen::MatrixXd& rates, double delta_min, double q_max);

  [[nodiscard]] int n_users() const { return static_cast<int>(levels_.rows()); }
  [[nodiscard]] int n_resources() const { return static_cast<int>(levels_.cols()); }
  [[nodiscard]] const Eigen::MatrixXi& levels() const { return levels_; }
  [[nodiscard]] double delta_min() const { return delta_min_; }
  [[nodiscard]] double q_max() const { return delta_min_ * max_level_; }
  [[nodiscard]] int max_level() const { return max_level_; }
  [[nodiscard]] double rate(int user, int resource) const {
    return delta_min_ * levels_(user, resource);
  }
  [[nodiscard]] Eigen::MatrixXd rates() const { return levels_.cast<double>() * delta_min_; }

  friend bool operator==(const UtilityMatrix& a, const UtilityMatrix& b) {
    return a.delta_min_ == b.delta_min_ && a.max_level_ == b.max_level_ &&
           a.levels_.rows() == b.levels_.rows() && a.levels_.cols() == b.levels_.cols() &&
           a.levels_ == b.levels_;
  }

 private:
  Eigen::MatrixXi levels_;
  double delta_min_ = 1.0;
  int max_level_ = 8;
};

}  // namespace colmac
