#pragma once

#include "colmac/rng.hpp"
#include "colmac/types.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace colmac {

/// Shared state of the distributed auction.
///
/// Row n of `bids` is user n's private bid vector; nobody reads another
/// user's row. `holder` mirrors `assignment` from the resource side.
struct AuctionState {
  RateMatrix bids;
  ActionProfile assignment;
  Eigen::VectorXi holder;
  double epsilon = 0.0;
  int iteration = 0;

  static AuctionState fresh(const ProtocolParams& params);
  [[nodiscard]] int n_unassigned() const;
  [[nodiscard]] bool all_assigned() const { return n_unassigned() == 0; }
};

/// Profit of every resource: estimate minus own bid.
template <typename DerivedA, typename DerivedB>
Eigen::VectorXd profits(const Eigen::MatrixBase<DerivedA>& q_hat_row,
                        const Eigen::MatrixBase<DerivedB>& bid_row) {
  require(q_hat_row.size() == bid_row.size(), "profit vectors must have equal length");
  return (q_hat_row.template cast<double>() - bid_row.template cast<double>()).eval();
}

struct BestAndGap {
  int resource = 0;
  double gap = 0.0;  // best minus second best; +inf with a single resource
};

/// Most profitable resource (lowest index on ties) and the profit gap.
BestAndGap best_and_gap(const Eigen::Ref<const Eigen::VectorXd>& g);

/// Bid step for one user. Assigned users keep their resource and bid;
/// unassigned users raise the bid on their best resource by eps + gap.
/// Returns the resource the user contends for this iteration.
int calculate_bid(AuctionState& state, int user, const Eigen::Ref<const Eigen::VectorXd>& q_hat_row,
                  double eps);

/// max(eps_final, eps * zeta).
double scale_epsilon(double eps, double zeta, double eps_final);

/// Base-beta digits of rho = 1 - bid/Q_M truncated to lambda digits.
/// Bids are clipped to [0, Q_M] first; a higher bid never yields larger digits.
std::vector<int> quantize_bid(double bid, const ProtocolParams& params);

struct Bidder {
  int user = 0;
  std::vector<int> digits;
};

/// What one contention block looked like on the channel.
struct BlockEvent {
  bool deterministic = true;
  std::vector<int> users;   // undetermined users entering the block
  std::vector<int> slots;   // 1-based transmit slot of each of them
  bool nack = false;        // collision notification slot was busy
};

struct ContentionOutcome {
  int winner = -1;
  int deterministic_blocks = 0;
  int random_blocks = 0;
  bool capped = false;  // random-block cap fired; lowest surviving user won
  std::vector<BlockEvent> slot_trace;

  [[nodiscard]] int blocks() const { return deterministic_blocks + random_blocks; }
  /// beta + 1 slots per deterministic block, 2 + 1 per random block.
  [[nodiscard]] long slots(int beta) const;
};

inline constexpr int kRandomBlockCap = 64;

/// Carrier-sensing contest over one resource.
ContentionOutcome resolve_contention(std::span<const Bidder> bidders, const ProtocolParams& params,
                                     Rng& rng, bool record_trace = false);

struct AuctionTraceRow {
  int iteration = 0;
  double epsilon = 0.0;    // increment used for this iteration's bids
  int unassigned = 0;      // after the iteration
  int frame_blocks = 0;    // sum over frames of the per-frame block count
  int deterministic_blocks = 0;
  int random_blocks = 0;
  long slots = 0;          // frames plus the unassigned-notification slot
  double partial_welfare = 0.0;
  bool capped = false;
};

struct AuctionTrace {
  std::vector<AuctionTraceRow> rows;
};

/// Per-resource contest stream for one iteration.
Rng contest_stream(std::uint64_t iteration_seed, int resource);

/// One auction iteration: bids, epsilon scaling, M frames of K parallel
/// contests, then the unassigned-notification slot.
AuctionTraceRow run_iteration(AuctionState& state, const RateMatrix& q_hat,
                              const ProtocolParams& params, Rng& rng);

struct AuctionOptions {
  /// Iteration cap; <= 0 uses params.i_max.
  int max_iterations = 0;
  /// Stop once this many slots are used; <= 0 means unlimited.
  long slot_budget = 0;
};

struct AuctionResult {
  ActionProfile profile;
  AuctionTrace trace;
  bool truncated = false;
  int iterations = 0;
  long slots = 0;
};

/// Fresh auction: zero bids, everyone unassigned, epsilon = eps_init.
AuctionResult run_auction(const RateMatrix& q_hat, const ProtocolParams& params, Rng& rng,
                          const AuctionOptions& options = {});

/// Runs iterations on an existing state until all users are assigned or a cap fires.
AuctionResult continue_auction(AuctionState& state, const RateMatrix& q_hat,
                               const ProtocolParams& params, Rng& rng,
                               const AuctionOptions& options = {});

/// Largest violation of epsilon-complementary slackness over assigned users:
/// max_a(q - B) - (q - B)[own]. Zero when every assigned user is optimal.
double slackness_violation(const AuctionState& state, const RateMatrix& q_hat);

/// Unassigns users whose assignment violates epsilon-CS under new estimates.
/// Returns how many were released.
int release_stale(AuctionState& state, const RateMatrix& q_hat);

/// (8 N^3 Q_M / Δmin)(1 + 1/16N).
double iteration_bound(const ProtocolParams& params);

void write_trace_csv(std::ostream& os, const AuctionTrace& trace);

}  // namespace colmac
