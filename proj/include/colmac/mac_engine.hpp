#pragma once

#include "colmac/auction.hpp"
#include "colmac/channel.hpp"
#include "colmac/exploration.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace colmac {

enum class ScheduleMode { exponential, fixed };
enum class Phase { exploration, auction, exploitation };

std::string_view phase_name(Phase phase);

/// Slot budgets of every epoch. Counts are in contention slots.
struct EpochSchedule {
  ScheduleMode mode = ScheduleMode::fixed;
  int n_epochs = 100;
  double slot_duration_s = 1e-6;

  long t1 = 50;           // exploration slots per epoch
  long t2_budget = 200;   // auction slot cap; 0 picks i_max iterations' worth
  int auction_iterations = 4;  // per-epoch iteration cap; 0 uses i_max

  long t3_base = 4000;    // exponential: t3(j) = t3_base * 2^j
  long epoch_slots = 5000;  // fixed: t1 + auction + exploitation

  long setup_t1 = 85000;  // fixed: setup-phase exploration
  long setup_t2_budget = 15000;
  /// Steady-state epsilon; zeta is 1 after the setup phase.
  double steady_epsilon = 1.0 / 32.0;
  /// Steady auctions keep bids and assignment from the previous epoch.
  bool warm_start = true;
  /// On warm start, unassign users violating epsilon-CS under the new estimates.
  bool release_stale = false;

  [[nodiscard]] long t3(int epoch) const;
  /// Resolved auction slot budget for the given parameters.
  [[nodiscard]] long auction_budget(const ProtocolParams& params) const;
  void validate() const;

  /// Fixed 5 ms frames with 50 μs exploration and a 200 μs auction budget.
  static EpochSchedule steady_table();
  /// Fixed frames with the 4 μs / 48 μs split quoted in the protocol text.
  static EpochSchedule steady_text();
  /// Exponential schedule with the theoretical T1 for the given parameters.
  static EpochSchedule exponential_default(const ProtocolParams& params);
};

/// The true QoS as seen by the engine; block-fading in dynamic mode.
class ChannelProcess {
 public:
  /// Static, externally supplied Q.
  static ChannelProcess constant(UtilityMatrix q);
  /// Drawn channel. Dynamic mode evolves every `coherence_slots`.
  static ChannelProcess fading(ChannelRealization real, ChannelParams cp, ProtocolParams params,
                               long coherence_slots, std::uint64_t seed);

  [[nodiscard]] const UtilityMatrix& truth() const { return q_; }
  [[nodiscard]] double w_star() const { return w_star_; }
  [[nodiscard]] const ActionProfile& optimal_profile() const { return optimal_; }
  [[nodiscard]] bool is_dynamic() const { return dynamic_; }
  [[nodiscard]] long clock() const { return clock_; }
  [[nodiscard]] int interval() const { return interval_; }
  [[nodiscard]] long coherence_slots() const { return coherence_; }
  /// Slots left before the next fading step (huge when static).
  [[nodiscard]] long slots_until_change() const;
  /// Moves the clock; may not skip past a fading step.
  void advance(long slots);

 private:
  void refresh();

  UtilityMatrix q_;
  double w_star_ = 0.0;
  ActionProfile optimal_;
  bool dynamic_ = false;
  long clock_ = 0;
  long coherence_ = 0;
  int interval_ = 0;
  std::optional<ChannelRealization> real_;
  ChannelParams cp_;
  ProtocolParams params_;
  Rng rng_;
};

/// A run of consecutive slots with one phase and one channel state.
struct Segment {
  long start = 0;   // first slot, 0-based
  long length = 0;
  int epoch = 0;    // 0 is the setup phase
  Phase phase = Phase::exploration;
  double welfare = 0.0;  // total over the segment
  double w_star = 0.0;   // per slot
  [[nodiscard]] double regret() const { return w_star * length - welfare; }
};

struct EpochRecord {
  int epoch = 0;
  long t1 = 0;
  long auction_slots = 0;
  long t3 = 0;
  int auction_iterations = 0;
  bool truncated = false;
  /// Exploitation used an older complete profile (or a partial one when none existed).
  bool reused_profile = false;
  ActionProfile profile;
  AuctionTrace trace;
};

struct RunLog {
  std::uint64_t seed = 0;
  std::vector<Segment> segments;
  std::vector<EpochRecord> epochs;
  double cumulative_regret = 0.0;  // running counter kept by the engine

  [[nodiscard]] long total_slots() const;
  /// Cumulative regret after the last slot of each epoch, in epoch order.
  [[nodiscard]] std::vector<double> regret_at_epoch_ends() const;
};

/// Everything a run carries from epoch to epoch.
struct EngineState {
  EstimationState estimation;
  AuctionState auction;
  ActionProfile last_complete;  // size 0 until an auction completes
  bool auction_started = false;

  static EngineState fresh(const ProtocolParams& params);
};

struct EpochPlan {
  long t1 = 0;
  long t2_budget = 0;
  int max_iterations = 0;
  /// Exploitation length; ignored when fill_to > 0.
  long t3 = 0;
  /// Fixed frames: exploitation fills the epoch up to this many slots.
  long fill_to = 0;
  bool fresh_auction = true;
  bool release_stale = false;
};

struct EpochHooks {
  /// Runs after the estimates are finalized and before the auction.
  std::function<void(EstimationState&)> after_exploration;
};

/// One exploration / auction / exploitation cycle, appended to `log`.
void run_epoch(int epoch, EngineState& state, ChannelProcess& channel, const EpochPlan& plan,
               const ProtocolParams& auction_params, Rng& rng, RunLog& log,
               const EpochHooks& hooks = {});

/// Epochs 1..J with exploitation doubling every epoch and a fresh auction each time.
RunLog run_exponential(const ProtocolParams& params, const EpochSchedule& schedule,
                       ChannelProcess& channel, Rng& rng, const EpochHooks& hooks = {});

/// Setup phase (epoch 0: exploration and auction only) then fixed frames.
RunLog run_fixed(const ProtocolParams& params, const EpochSchedule& schedule, ChannelProcess& channel,
                 Rng& rng, const EpochHooks& hooks = {});

struct EpochEfficiency {
  int epoch = 0;
  double value = 0.0;
  bool flagged = false;  // W* was 0 while welfare was not
};

/// Epoch welfare over epoch W* (sums over the epoch's slots).
std::vector<EpochEfficiency> efficiency(const RunLog& log);

/// Mean efficiency over epochs >= first_epoch.
double mean_efficiency(const std::vector<EpochEfficiency>& series, int first_epoch = 1);

/// One row per segment: slot is the segment's last slot, welfare its per-slot mean.
void write_runlog_csv(std::ostream& os, const RunLog& log);

}  // namespace colmac
