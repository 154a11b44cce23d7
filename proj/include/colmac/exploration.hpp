#pragma once

#include "colmac/rng.hpp"
#include "colmac/types.hpp"

#include <functional>
#include <span>
#include <vector>

namespace colmac {

/// Per-user sample statistics, all users stacked row-wise (N x K*M).
struct EstimationState {
  Eigen::MatrixXd sums;       // S
  Eigen::MatrixXi visits;     // V
  Eigen::MatrixXd dither;     // D
  Eigen::MatrixXd estimates;  // dithered estimate Q-hat
  int epoch = 0;              // completed exploration phases

  static EstimationState empty(const ProtocolParams& params);
  /// Undithered estimate S/V, 0 where unvisited.
  [[nodiscard]] Eigen::MatrixXd empirical_means() const;
};

/// Quantities the regret analysis is stated in.
struct ExplorationConstants {
  double d_max = 0.0;   // Δmin / 8N
  double xi_max = 0.0;  // 3 Δmin / 8N
  double p_ss = 0.0;    // (1/N)(1 - 1/N)^(N-1)
  double t1 = 0.0;      // 10 N^3 Q_M^2 / Δmin^2
  double n_users = 0.0;
  double delta = 0.0;

  static ExplorationConstants from(const ProtocolParams& params);
  /// 5 j N^2 / (2 Δ^2).
  [[nodiscard]] double v_min(int epoch) const;
};

struct SlotOutcome {
  std::vector<int> draws;      // resource drawn by each user
  std::vector<char> success;   // pilot decoded (unique draw)
  double welfare = 0.0;        // sum of delivered sample rates
};

/// One exploration slot: every user pilots a uniformly drawn resource and a
/// pilot succeeds iff no other user drew the same resource.
SlotOutcome explore_slot(EstimationState& state, const UtilityMatrix& truth,
                         const ProtocolParams& params, Rng& rng);

/// Same as explore_slot with the resource draws supplied by the caller.
SlotOutcome explore_slot_with(EstimationState& state, const UtilityMatrix& truth,
                              const ProtocolParams& params, std::span<const int> draws, Rng& rng);

/// i.i.d. dithers for every (user, resource).
Eigen::MatrixXd draw_dither(const ProtocolParams& params, Rng& rng);

/// Draws a fresh dither and recomputes Q-hat = S/V + D (S/V taken as 0 when unvisited).
void finalize_estimates(EstimationState& state, const ProtocolParams& params, Rng& rng);

/// Runs `count` exploration slots without touching the estimates.
/// `on_slot`, when set, receives each slot's welfare.
void explore_slots(long count, EstimationState& state, const UtilityMatrix& truth,
                   const ProtocolParams& params, Rng& rng,
                   const std::function<void(double)>& on_slot = {});

/// Runs `duration` exploration slots followed by finalize_estimates.
/// `on_slot`, when set, receives each slot's welfare.
void run_exploration(long duration, EstimationState& state, const UtilityMatrix& truth,
                     const ProtocolParams& params, Rng& rng,
                     const std::function<void(double)>& on_slot = {});

struct EstimationError {
  double xi = 0.0;  // max |Q-hat - Q|; +inf when a resource was never visited
  bool all_visited = true;
};
EstimationError estimation_error(const EstimationState& state, const UtilityMatrix& truth);

}  // namespace colmac
