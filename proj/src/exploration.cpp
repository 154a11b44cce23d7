#include "colmac/exploration.hpp"

#include "colmac/channel.hpp"

#include <cmath>
#include <limits>

namespace colmac {

EstimationState EstimationState::empty(const ProtocolParams& params) {
  const int n = params.n_users;
  const int r = params.n_resources();
  EstimationState s;
  s.sums = Eigen::MatrixXd::Zero(n, r);
  s.visits = Eigen::MatrixXi::Zero(n, r);
  s.dither = Eigen::MatrixXd::Zero(n, r);
  s.estimates = Eigen::MatrixXd::Zero(n, r);
  return s;
}

Eigen::MatrixXd EstimationState::empirical_means() const {
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(sums.rows(), sums.cols());
  for (Eigen::Index i = 0; i < sums.size(); ++i) {
    if (visits.data()[i] > 0) means.data()[i] = sums.data()[i] / visits.data()[i];
  }
  return means;
}

ExplorationConstants ExplorationConstants::from(const ProtocolParams& params) {
  ExplorationConstants c;
  const double n = params.n_users;
  c.n_users = n;
  c.delta = params.delta();
  c.d_max = params.delta_min / (8.0 * n);
  c.xi_max = 3.0 * params.delta_min / (8.0 * n);
  c.p_ss = (1.0 / n) * std::pow(1.0 - 1.0 / n, n - 1.0);
  c.t1 = 10.0 * n * n * n * params.q_max * params.q_max / (params.delta_min * params.delta_min);
  return c;
}

double ExplorationConstants::v_min(int epoch) const {
  return 5.0 * epoch * n_users * n_users / (2.0 * delta * delta);
}

namespace {

// Shared slot kernel; `counts` is scratch of size K*M.
double pilot_round(EstimationState& state, const UtilityMatrix& truth, const ProtocolParams& params,
                   std::span<const int> draws, std::vector<int>& counts, std::vector<char>* success,
                   Rng& rng) {
  std::fill(counts.begin(), counts.end(), 0);
  for (int a : draws) ++counts[static_cast<std::size_t>(a)];
  double welfare = 0.0;
  for (int n = 0; n < static_cast<int>(draws.size()); ++n) {
    const int a = draws[static_cast<std::size_t>(n)];
    const bool ok = counts[static_cast<std::size_t>(a)] == 1;
    if (success) (*success)[static_cast<std::size_t>(n)] = ok ? 1 : 0;
    if (!ok) continue;
    const double q = qos_sample(truth.rate(n, a), params, rng);
    state.sums(n, a) += q;
    state.visits(n, a) += 1;
    welfare += q;
  }
  return welfare;
}

}  // namespace

SlotOutcome explore_slot_with(EstimationState& state, const UtilityMatrix& truth,
                              const ProtocolParams& params, std::span<const int> draws, Rng& rng) {
  const int r = params.n_resources();
  require(static_cast<int>(draws.size()) == params.n_users, "one draw per user required");
  for (int a : draws) require(a >= 0 && a < r, "draw out of range");
  SlotOutcome out;
  out.draws.assign(draws.begin(), draws.end());
  out.success.assign(draws.size(), 0);
  std::vector<int> counts(static_cast<std::size_t>(r), 0);
  out.welfare = pilot_round(state, truth, params, draws, counts, &out.success, rng);
  return out;
}

SlotOutcome explore_slot(EstimationState& state, const UtilityMatrix& truth,
                         const ProtocolParams& params, Rng& rng) {
  std::vector<int> draws(static_cast<std::size_t>(params.n_users));
  for (int& a : draws) a = uniform_index(rng, params.n_resources());
  return explore_slot_with(state, truth, params, draws, rng);
}

Eigen::MatrixXd draw_dither(const ProtocolParams& params, Rng& rng) {
  const double d_max = params.delta_min / (8.0 * params.n_users);
  const double lo = params.dither_mode == DitherMode::symmetric ? -d_max : 0.0;
  const double hi = params.dither_mode == DitherMode::symmetric ? d_max : params.eps_final;
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::MatrixXd d(params.n_users, params.n_resources());
  for (Eigen::Index i = 0; i < d.size(); ++i) d.data()[i] = dist(rng);
  return d;
}

void finalize_estimates(EstimationState& state, const ProtocolParams& params, Rng& rng) {
  state.dither = draw_dither(params, rng);
  state.estimates = state.empirical_means() + state.dither;
  ++state.epoch;
}

void explore_slots(long count, EstimationState& state, const UtilityMatrix& truth,
                   const ProtocolParams& params, Rng& rng, const std::function<void(double)>& on_slot) {
  require(count >= 0, "exploration duration must be nonnegative");
  const int r = params.n_resources();
  std::vector<int> draws(static_cast<std::size_t>(params.n_users));
  std::vector<int> counts(static_cast<std::size_t>(r), 0);
  std::uniform_int_distribution<int> pick(0, r - 1);
  for (long t = 0; t < count; ++t) {
    for (int& a : draws) a = pick(rng);
    const double w = pilot_round(state, truth, params, draws, counts, nullptr, rng);
    if (on_slot) on_slot(w);
  }
}

void run_exploration(long duration, EstimationState& state, const UtilityMatrix& truth,
                     const ProtocolParams& params, Rng& rng,
                     const std::function<void(double)>& on_slot) {
  explore_slots(duration, state, truth, params, rng, on_slot);
  finalize_estimates(state, params, rng);
}

EstimationError estimation_error(const EstimationState& state, const UtilityMatrix& truth) {
  EstimationError err;
  for (int n = 0; n < truth.n_users(); ++n) {
    for (int a = 0; a < truth.n_resources(); ++a) {
      if (state.visits(n, a) == 0) err.all_visited = false;
      err.xi = std::max(err.xi, std::abs(state.estimates(n, a) - truth.rate(n, a)));
    }
  }
  if (!err.all_visited) err.xi = std::numeric_limits<double>::infinity();
  return err;
}

}  // namespace colmac
