#include "colmac/auction.hpp"

#include "colmac/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace colmac {

AuctionState AuctionState::fresh(const ProtocolParams& params) {
  AuctionState s;
  s.bids = RateMatrix::Zero(params.n_users, params.n_resources());
  s.assignment = ActionProfile::Constant(params.n_users, kUnassigned);
  s.holder = Eigen::VectorXi::Constant(params.n_resources(), kUnassigned);
  s.epsilon = params.eps_init;
  return s;
}

int AuctionState::n_unassigned() const {
  return static_cast<int>((assignment.array() == kUnassigned).count());
}

BestAndGap best_and_gap(const Eigen::Ref<const Eigen::VectorXd>& g) {
  require(g.size() >= 1, "profit vector must not be empty");
  BestAndGap out;
  double best = -std::numeric_limits<double>::infinity();
  double second = -std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < g.size(); ++a) {
    if (g[a] > best) {
      second = best;
      best = g[a];
      out.resource = static_cast<int>(a);
    } else if (g[a] > second) {
      second = g[a];
    }
  }
  out.gap = g.size() < 2 ? std::numeric_limits<double>::infinity() : best - second;
  return out;
}

int calculate_bid(AuctionState& state, int user, const Eigen::Ref<const Eigen::VectorXd>& q_hat_row,
                  double eps) {
  require(eps > 0.0, "bid increment must be positive");
  if (state.assignment[user] != kUnassigned) return state.assignment[user];
  const Eigen::VectorXd g = profits(q_hat_row, state.bids.row(user).transpose());
  const BestAndGap choice = best_and_gap(g);
  // A lone resource has no competitor to be indifferent to.
  const double gap = std::isfinite(choice.gap) ? choice.gap : 0.0;
  state.bids(user, choice.resource) += eps + gap;
  return choice.resource;
}

double scale_epsilon(double eps, double zeta, double eps_final) {
  require(zeta > 0.0 && zeta <= 1.0, "zeta must lie in (0, 1]");
  return std::max(eps_final, eps * zeta);
}

std::vector<int> quantize_bid(double bid, const ProtocolParams& params) {
  const int lambda = params.lambda();
  long long scale = 1;
  for (int i = 0; i < lambda; ++i) scale *= params.beta;
  const double clipped = std::clamp(bid, 0.0, params.q_max);
  const double rho = 1.0 - clipped / params.q_max;
  long long level = static_cast<long long>(std::floor(rho * static_cast<double>(scale)));
  level = std::clamp(level, 0LL, scale - 1);
  std::vector<int> digits(static_cast<std::size_t>(lambda));
  for (int i = lambda - 1; i >= 0; --i) {
    digits[static_cast<std::size_t>(i)] = static_cast<int>(level % params.beta);
    level /= params.beta;
  }
  return digits;
}

long ContentionOutcome::slots(int beta) const {
  return static_cast<long>(deterministic_blocks) * (beta + 1) + static_cast<long>(random_blocks) * 3;
}

ContentionOutcome resolve_contention(std::span<const Bidder> bidders, const ProtocolParams& params,
                                     Rng& rng, bool record_trace) {
  require(!bidders.empty(), "contention needs at least one bidder");
  const int lambda = params.lambda();
  ContentionOutcome out;
  std::vector<std::size_t> alive(bidders.size());
  for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = i;
  std::vector<int> slot(bidders.size(), 0);

  auto record = [&](bool deterministic, bool nack) {
    if (!record_trace) return;
    BlockEvent ev;
    ev.deterministic = deterministic;
    ev.nack = nack;
    for (std::size_t i : alive) {
      ev.users.push_back(bidders[i].user);
      ev.slots.push_back(slot[i]);
    }
    out.slot_trace.push_back(std::move(ev));
  };
  // Users transmitting after the earliest busy slot sense the carrier and drop out.
  auto survivors = [&]() {
    int earliest = std::numeric_limits<int>::max();
    for (std::size_t i : alive) earliest = std::min(earliest, slot[i]);
    std::vector<std::size_t> next;
    for (std::size_t i : alive) {
      if (slot[i] == earliest) next.push_back(i);
    }
    return next;
  };

  for (int block = 0; block < lambda; ++block) {
    for (std::size_t i : alive) {
      require(static_cast<int>(bidders[i].digits.size()) == lambda, "digit sequence length must be lambda");
      slot[i] = bidders[i].digits[static_cast<std::size_t>(block)] + 1;
    }
    std::vector<std::size_t> next = survivors();
    const bool nack = next.size() > 1;
    record(true, nack);
    alive = std::move(next);
    ++out.deterministic_blocks;
    if (!nack) {
      out.winner = bidders[alive.front()].user;
      return out;
    }
  }

  std::bernoulli_distribution second_slot(0.5);
  while (out.random_blocks < kRandomBlockCap) {
    for (std::size_t i : alive) slot[i] = second_slot(rng) ? 2 : 1;
    // With nobody in slot 1, everybody sits in slot 2 and all continue.
    std::vector<std::size_t> next = survivors();
    const bool nack = next.size() > 1;
    record(false, nack);
    alive = std::move(next);
    ++out.random_blocks;
    if (!nack) {
      out.winner = bidders[alive.front()].user;
      return out;
    }
  }
  out.capped = true;
  int lowest = std::numeric_limits<int>::max();
  for (std::size_t i : alive) lowest = std::min(lowest, bidders[i].user);
  out.winner = lowest;
  return out;
}

Rng contest_stream(std::uint64_t iteration_seed, int resource) {
  return substream(iteration_seed, {static_cast<std::uint64_t>(resource)});
}

AuctionTraceRow run_iteration(AuctionState& state, const RateMatrix& q_hat,
                              const ProtocolParams& params, Rng& rng) {
  const int n_users = params.n_users;
  const int k_count = params.n_channels;
  const int m_count = params.n_slots();
  require(q_hat.rows() == n_users && q_hat.cols() == params.n_resources(),
          "estimates must be N x (K*M)");

  AuctionTraceRow row;
  row.iteration = ++state.iteration;
  row.epsilon = state.epsilon;

  std::vector<int> chosen(static_cast<std::size_t>(n_users));
  for (int n = 0; n < n_users; ++n) {
    chosen[static_cast<std::size_t>(n)] = calculate_bid(state, n, q_hat.row(n).transpose(), state.epsilon);
  }
  state.epsilon = scale_epsilon(state.epsilon, params.zeta, params.eps_final);

  std::vector<std::vector<int>> contenders(static_cast<std::size_t>(params.n_resources()));
  for (int n = 0; n < n_users; ++n) contenders[static_cast<std::size_t>(chosen[static_cast<std::size_t>(n)])].push_back(n);

  const std::uint64_t iteration_seed = rng();
  const long min_frame_slots = params.beta + 1;
  for (int m = 0; m < m_count; ++m) {
    long frame_slots = min_frame_slots;
    int frame_blocks = 0;
    for (int k = 0; k < k_count; ++k) {
      const int a = Resource{k, m}.index(m_count);
      const auto& users = contenders[static_cast<std::size_t>(a)];
      if (users.empty()) continue;
      std::vector<Bidder> bidders;
      bidders.reserve(users.size());
      for (int n : users) bidders.push_back({n, quantize_bid(state.bids(n, a), params)});
      Rng stream = users.size() > 1 ? contest_stream(iteration_seed, a) : Rng{};
      const ContentionOutcome outcome = resolve_contention(bidders, params, stream);

      const int previous = state.holder[a];
      if (previous != kUnassigned && previous != outcome.winner) state.assignment[previous] = kUnassigned;
      state.holder[a] = outcome.winner;
      state.assignment[outcome.winner] = a;

      row.deterministic_blocks += outcome.deterministic_blocks;
      row.random_blocks += outcome.random_blocks;
      row.capped = row.capped || outcome.capped;
      frame_blocks = std::max(frame_blocks, outcome.blocks());
      frame_slots = std::max(frame_slots, outcome.slots(params.beta));
    }
    row.frame_blocks += frame_blocks;
    row.slots += frame_slots;
  }
  row.slots += 1;  // unassigned-notification slot
  row.unassigned = state.n_unassigned();
  row.partial_welfare = welfare(q_hat, state.assignment);
  return row;
}

AuctionResult continue_auction(AuctionState& state, const RateMatrix& q_hat,
                               const ProtocolParams& params, Rng& rng,
                               const AuctionOptions& options) {
  const int cap = options.max_iterations > 0 ? options.max_iterations : params.i_max;
  AuctionResult result;
  while (!state.all_assigned()) {
    if (result.iterations >= cap || (options.slot_budget > 0 && result.slots >= options.slot_budget)) {
      result.truncated = true;
      break;
    }
    AuctionTraceRow row = run_iteration(state, q_hat, params, rng);
    ++result.iterations;
    result.slots += row.slots;
    result.trace.rows.push_back(row);
  }
  result.profile = state.assignment;
  return result;
}

AuctionResult run_auction(const RateMatrix& q_hat, const ProtocolParams& params, Rng& rng,
                          const AuctionOptions& options) {
  AuctionState state = AuctionState::fresh(params);
  return continue_auction(state, q_hat, params, rng, options);
}

double slackness_violation(const AuctionState& state, const RateMatrix& q_hat) {
  double worst = 0.0;
  for (int n = 0; n < state.assignment.size(); ++n) {
    const int a = state.assignment[n];
    if (a == kUnassigned) continue;
    const Eigen::VectorXd g = q_hat.row(n).transpose() - state.bids.row(n).transpose();
    worst = std::max(worst, g.maxCoeff() - g[a]);
  }
  return worst;
}

int release_stale(AuctionState& state, const RateMatrix& q_hat) {
  int released = 0;
  for (int n = 0; n < state.assignment.size(); ++n) {
    const int a = state.assignment[n];
    if (a == kUnassigned) continue;
    const Eigen::VectorXd g = q_hat.row(n).transpose() - state.bids.row(n).transpose();
    if (g.maxCoeff() - g[a] > state.epsilon) {
      state.assignment[n] = kUnassigned;
      state.holder[a] = kUnassigned;
      ++released;
    }
  }
  return released;
}

double iteration_bound(const ProtocolParams& params) {
  const double n = params.n_users;
  return 8.0 * n * n * n * params.q_max / params.delta_min * (1.0 + 1.0 / (16.0 * n));
}

void write_trace_csv(std::ostream& os, const AuctionTrace& trace) {
  os << "iteration,epsilon,unassigned,frame_blocks,deterministic_blocks,random_blocks,slots,partial_welfare\n";
  for (const auto& r : trace.rows) {
    os << r.iteration << ',' << r.epsilon << ',' << r.unassigned << ',' << r.frame_blocks << ','
       << r.deterministic_blocks << ',' << r.random_blocks << ',' << r.slots << ',' << r.partial_welfare
       << '\n';
  }
}

}  // namespace colmac
