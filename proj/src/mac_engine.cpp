#include "colmac/mac_engine.hpp"

#include "colmac/allocators.hpp"
#include "colmac/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

namespace colmac {

std::string_view phase_name(Phase phase) {
  switch (phase) {
    case Phase::exploration: return "exploration";
    case Phase::auction: return "auction";
    case Phase::exploitation: return "exploitation";
  }
  return "unknown";
}

long EpochSchedule::t3(int epoch) const {
  require(epoch >= 0 && epoch < 62, "epoch index out of range");
  return t3_base * (1L << epoch);
}

long EpochSchedule::auction_budget(const ProtocolParams& params) const {
  if (t2_budget > 0) return t2_budget;
  const long iterations = auction_iterations > 0 ? auction_iterations : params.i_max;
  const long per_iteration = static_cast<long>(params.n_slots()) * params.lambda() * (params.beta + 1) + 1;
  return iterations * per_iteration;
}

void EpochSchedule::validate() const {
  require(n_epochs >= 1, "n_epochs must be at least 1");
  require(slot_duration_s > 0.0, "slot_duration must be positive");
  require(t1 >= 0 && t2_budget >= 0 && auction_iterations >= 0, "phase budgets must be nonnegative");
  if (mode == ScheduleMode::exponential) {
    require(t3_base >= 1, "t3_base must be positive");
    require(n_epochs < 40, "exponential schedule supports fewer than 40 epochs");
  } else {
    require(epoch_slots > t1, "epoch_slots must exceed the exploration length");
    require(t2_budget <= epoch_slots - t1, "t1 + t2_budget must fit in one epoch");
    require(setup_t1 >= 0 && setup_t2_budget >= 0, "setup budgets must be nonnegative");
    require(steady_epsilon > 0.0, "steady_epsilon must be positive");
  }
}

EpochSchedule EpochSchedule::steady_table() { return EpochSchedule{}; }

EpochSchedule EpochSchedule::steady_text() {
  EpochSchedule s;
  s.t1 = 4;
  s.t2_budget = 48;
  return s;
}

EpochSchedule EpochSchedule::exponential_default(const ProtocolParams& params) {
  EpochSchedule s;
  s.mode = ScheduleMode::exponential;
  s.n_epochs = 6;
  const double n = params.n_users;
  s.t1 = static_cast<long>(std::ceil(10.0 * n * n * n * params.q_max * params.q_max /
                                     (params.delta_min * params.delta_min)));
  s.t2_budget = 0;
  s.auction_iterations = 0;
  s.t3_base = s.t1;
  return s;
}

ChannelProcess ChannelProcess::constant(UtilityMatrix q) {
  ChannelProcess p;
  p.q_ = std::move(q);
  p.refresh();
  return p;
}

ChannelProcess ChannelProcess::fading(ChannelRealization real, ChannelParams cp, ProtocolParams params,
                                      long coherence_slots, std::uint64_t seed) {
  ChannelProcess p;
  p.dynamic_ = cp.mode == ChannelMode::dynamic_channel;
  require(!p.dynamic_ || coherence_slots >= 1, "coherence interval must be at least one slot");
  p.coherence_ = coherence_slots;
  p.rng_ = Rng(seed);
  p.q_ = qos_matrix(real, cp, params);
  p.real_ = std::move(real);
  p.cp_ = cp;
  p.params_ = params;
  p.refresh();
  return p;
}

void ChannelProcess::refresh() {
  const auto best = hungarian(q_);
  w_star_ = best.welfare;
  optimal_ = best.profile;
}

long ChannelProcess::slots_until_change() const {
  if (!dynamic_) return std::numeric_limits<long>::max() / 4;
  return coherence_ - clock_ % coherence_;
}

void ChannelProcess::advance(long slots) {
  require(slots >= 0 && slots <= slots_until_change(), "advance may not skip a fading step");
  clock_ += slots;
  if (dynamic_ && slots > 0 && clock_ % coherence_ == 0) {
    real_ = evolve(*real_, cp_, rng_);
    q_ = qos_matrix(*real_, cp_, params_);
    ++interval_;
    refresh();
  }
}

long RunLog::total_slots() const {
  return segments.empty() ? 0 : segments.back().start + segments.back().length;
}

std::vector<double> RunLog::regret_at_epoch_ends() const {
  std::vector<double> out;
  double running = 0.0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    running += segments[i].regret();
    if (i + 1 == segments.size() || segments[i + 1].epoch != segments[i].epoch) out.push_back(running);
  }
  return out;
}

EngineState EngineState::fresh(const ProtocolParams& params) {
  EngineState s;
  s.estimation = EstimationState::empty(params);
  s.auction = AuctionState::fresh(params);
  return s;
}

namespace {

void push_segment(RunLog& log, ChannelProcess& channel, int epoch, Phase phase, long length,
                  double welfare) {
  Segment seg;
  seg.start = log.total_slots();
  seg.length = length;
  seg.epoch = epoch;
  seg.phase = phase;
  seg.welfare = welfare;
  seg.w_star = channel.w_star();
  log.cumulative_regret += seg.regret();
  log.segments.push_back(seg);
  channel.advance(length);
}

// Splits `length` slots at fading steps; `per_slot` sees the channel of each piece.
template <typename PerSlot>
void emit(RunLog& log, ChannelProcess& channel, int epoch, Phase phase, long length, PerSlot per_slot) {
  while (length > 0) {
    const long chunk = std::min(length, channel.slots_until_change());
    push_segment(log, channel, epoch, phase, chunk, per_slot(channel.truth()) * static_cast<double>(chunk));
    length -= chunk;
  }
}

}  // namespace

void run_epoch(int epoch, EngineState& state, ChannelProcess& channel, const EpochPlan& plan,
               const ProtocolParams& auction_params, Rng& rng, RunLog& log, const EpochHooks& hooks) {
  require(plan.t1 >= 0 && plan.t3 >= 0 && plan.fill_to >= 0, "epoch plan lengths must be nonnegative");
  EpochRecord rec;
  rec.epoch = epoch;
  rec.t1 = plan.t1;

  for (long remaining = plan.t1; remaining > 0;) {
    const long chunk = std::min(remaining, channel.slots_until_change());
    double total = 0.0;
    explore_slots(chunk, state.estimation, channel.truth(), auction_params, rng,
                  [&](double w) { total += w; });
    push_segment(log, channel, epoch, Phase::exploration, chunk, total);
    remaining -= chunk;
  }
  finalize_estimates(state.estimation, auction_params, rng);
  if (hooks.after_exploration) hooks.after_exploration(state.estimation);

  AuctionState& auction = state.auction;
  if (plan.fresh_auction || !state.auction_started) {
    auction = AuctionState::fresh(auction_params);
  } else {
    if (plan.release_stale) release_stale(auction, state.estimation.estimates);
    auction.epsilon = auction_params.eps_init;
  }
  state.auction_started = true;
  AuctionOptions options;
  options.max_iterations = plan.max_iterations;
  options.slot_budget = plan.t2_budget;
  AuctionResult result = continue_auction(auction, state.estimation.estimates, auction_params, rng, options);
  emit(log, channel, epoch, Phase::auction, result.slots, [](const UtilityMatrix&) { return 0.0; });
  rec.auction_slots = result.slots;
  rec.auction_iterations = result.iterations;
  rec.truncated = result.truncated;
  rec.trace = std::move(result.trace);

  if (auction.all_assigned()) {
    state.last_complete = auction.assignment;
    rec.profile = auction.assignment;
  } else {
    rec.reused_profile = true;
    rec.profile = state.last_complete.size() > 0 ? state.last_complete : auction.assignment;
  }

  rec.t3 = plan.fill_to > 0 ? std::max(0L, plan.fill_to - plan.t1 - result.slots) : plan.t3;
  const ActionProfile& profile = rec.profile;
  emit(log, channel, epoch, Phase::exploitation, rec.t3,
       [&](const UtilityMatrix& q) { return welfare(q, profile); });
  log.epochs.push_back(std::move(rec));
}

RunLog run_exponential(const ProtocolParams& params, const EpochSchedule& schedule,
                       ChannelProcess& channel, Rng& rng, const EpochHooks& hooks) {
  params.validate();
  schedule.validate();
  require(schedule.mode == ScheduleMode::exponential, "run_exponential needs an exponential schedule");
  RunLog log;
  EngineState state = EngineState::fresh(params);
  EpochPlan plan;
  plan.t1 = schedule.t1;
  plan.t2_budget = schedule.auction_budget(params);
  plan.max_iterations = schedule.auction_iterations;
  plan.fresh_auction = true;
  for (int j = 1; j <= schedule.n_epochs; ++j) {
    plan.t3 = schedule.t3(j);
    run_epoch(j, state, channel, plan, params, rng, log, hooks);
  }
  return log;
}

RunLog run_fixed(const ProtocolParams& params, const EpochSchedule& schedule, ChannelProcess& channel,
                 Rng& rng, const EpochHooks& hooks) {
  params.validate();
  schedule.validate();
  require(schedule.mode == ScheduleMode::fixed, "run_fixed needs a fixed schedule");
  RunLog log;
  EngineState state = EngineState::fresh(params);

  EpochPlan setup;
  setup.t1 = schedule.setup_t1;
  setup.t2_budget = schedule.setup_t2_budget;
  setup.max_iterations = params.i_max;
  setup.fresh_auction = true;
  run_epoch(0, state, channel, setup, params, rng, log, hooks);

  ProtocolParams steady = params;
  steady.eps_init = schedule.steady_epsilon;
  steady.eps_final = schedule.steady_epsilon;
  steady.zeta = 1.0;
  EpochPlan frame;
  frame.t1 = schedule.t1;
  frame.t2_budget = schedule.auction_budget(steady);
  frame.max_iterations = schedule.auction_iterations;
  frame.fill_to = schedule.epoch_slots;
  frame.fresh_auction = !schedule.warm_start;
  frame.release_stale = schedule.release_stale;
  for (int j = 1; j <= schedule.n_epochs; ++j) run_epoch(j, state, channel, frame, steady, rng, log, hooks);
  return log;
}

std::vector<EpochEfficiency> efficiency(const RunLog& log) {
  std::vector<EpochEfficiency> out;
  double welfare_sum = 0.0;
  double optimal_sum = 0.0;
  auto close = [&](int epoch) {
    EpochEfficiency e;
    e.epoch = epoch;
    if (optimal_sum > 0.0) {
      e.value = welfare_sum / optimal_sum;
    } else {
      e.value = welfare_sum == 0.0 ? 1.0 : 0.0;
      e.flagged = welfare_sum != 0.0;
    }
    out.push_back(e);
    welfare_sum = 0.0;
    optimal_sum = 0.0;
  };
  for (std::size_t i = 0; i < log.segments.size(); ++i) {
    const Segment& s = log.segments[i];
    welfare_sum += s.welfare;
    optimal_sum += s.w_star * static_cast<double>(s.length);
    if (i + 1 == log.segments.size() || log.segments[i + 1].epoch != s.epoch) close(s.epoch);
  }
  return out;
}

double mean_efficiency(const std::vector<EpochEfficiency>& series, int first_epoch) {
  double total = 0.0;
  int count = 0;
  for (const auto& e : series) {
    if (e.epoch < first_epoch) continue;
    total += e.value;
    ++count;
  }
  require(count > 0, "no epochs to average");
  return total / count;
}

void write_runlog_csv(std::ostream& os, const RunLog& log) {
  os << "slot,epoch,phase,welfare,w_star,cumulative_regret\n";
  double running = 0.0;
  for (const Segment& s : log.segments) {
    running += s.regret();
    os << s.start + s.length << ',' << s.epoch << ',' << phase_name(s.phase) << ','
       << s.welfare / static_cast<double>(s.length) << ',' << s.w_star << ',' << running << '\n';
  }
}

}  // namespace colmac
