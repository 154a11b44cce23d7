#include "colmac/allocators.hpp"

#include <algorithm>
#include <numeric>

namespace colmac {

Assignment<double> hungarian(const UtilityMatrix& q) {
  auto levels = hungarian(q.levels());
  return {std::move(levels.profile), q.delta_min() * static_cast<double>(levels.welfare)};
}

ActionProfile greedy_stable(const UtilityMatrix& q) { return greedy_stable(q.levels()); }

ActionProfile random_allocation(const ProtocolParams& params, Rng& rng) {
  const int n = params.n_users;
  ActionProfile profile(n);
  std::iota(profile.begin(), profile.end(), 0);
  std::shuffle(profile.begin(), profile.end(), rng);
  return profile;
}

ExhaustiveResult exhaustive_best_two(const Eigen::MatrixXd& q) {
  require(q.rows() == q.cols(), "exhaustive search needs a square matrix");
  require(q.rows() <= 7, "exhaustive search is limited to N <= 7");
  const int n = static_cast<int>(q.rows());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);

  ExhaustiveResult result;
  result.best = -std::numeric_limits<double>::infinity();
  result.second = -std::numeric_limits<double>::infinity();
  // Welfares within this tolerance count as the same optimum.
  constexpr double tie = 1e-12;
  do {
    double w = 0.0;
    for (int i = 0; i < n; ++i) w += q(i, perm[i]);
    if (w > result.best + tie) {
      result.second = result.best;
      result.best = w;
      result.n_optimal = 1;
      result.best_profile = Eigen::Map<const ActionProfile>(perm.data(), n);
    } else if (w >= result.best - tie) {
      ++result.n_optimal;
    } else if (w > result.second) {
      result.second = w;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (result.n_optimal > 1) result.second = result.best;
  if (n == 1) result.second = result.best;
  return result;
}

}  // namespace colmac
