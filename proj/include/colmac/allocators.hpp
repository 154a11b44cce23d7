#pragma once

#include "colmac/model.hpp"
#include "colmac/rng.hpp"
#include "colmac/types.hpp"

#include <algorithm>
#include <limits>
#include <type_traits>
#include <vector>

namespace colmac {

template <typename Scalar>
struct Assignment {
  ActionProfile profile;
  Scalar welfare{};
};

/// Maximum-weight perfect assignment of users (rows) to resources (columns).
///
/// Kuhn-Munkres with row/column potentials, O(n^3). Integer matrices are
/// solved in 64-bit integer arithmetic so the returned welfare is exact.
template <typename Derived>
auto hungarian(const Eigen::MatrixBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  using Work = std::conditional_t<std::is_integral_v<Scalar>, long long, double>;
  require(q.rows() == q.cols(), "hungarian needs a square matrix (N = K*M)");
  const int n = static_cast<int>(q.rows());
  const Work inf = std::numeric_limits<Work>::max() / 4;

  // 1-based arrays; column 0 is the virtual start column.
  std::vector<Work> u(n + 1, 0), v(n + 1, 0);
  std::vector<int> owner(n + 1, 0), way(n + 1, 0);
  for (int row = 1; row <= n; ++row) {
    owner[0] = row;
    int col0 = 0;
    std::vector<Work> min_slack(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const int row0 = owner[col0];
      Work delta = inf;
      int col1 = 0;
      for (int col = 1; col <= n; ++col) {
        if (used[col]) continue;
        const Work cost = -static_cast<Work>(q(row0 - 1, col - 1)) - u[row0] - v[col];
        if (cost < min_slack[col]) {
          min_slack[col] = cost;
          way[col] = col0;
        }
        if (min_slack[col] < delta) {
          delta = min_slack[col];
          col1 = col;
        }
      }
      for (int col = 0; col <= n; ++col) {
        if (used[col]) {
          u[owner[col]] += delta;
          v[col] -= delta;
        } else {
          min_slack[col] -= delta;
        }
      }
      col0 = col1;
    } while (owner[col0] != 0);
    do {
      const int col1 = way[col0];
      owner[col0] = owner[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  Assignment<Scalar> result;
  result.profile = ActionProfile::Constant(n, kUnassigned);
  for (int col = 1; col <= n; ++col) {
    if (owner[col] != 0) result.profile[owner[col] - 1] = col - 1;
  }
  result.welfare = Scalar(0);
  for (int row = 0; row < n; ++row) result.welfare += q(row, result.profile[row]);
  return result;
}

/// Optimal orthogonal profile of Q and its welfare W* in rate units.
Assignment<double> hungarian(const UtilityMatrix& q);

/// Greedy descent: repeatedly match the largest remaining (user, resource)
/// entry; ties go to the lowest user, then the lowest resource.
template <typename Derived>
ActionProfile greedy_stable(const Eigen::MatrixBase<Derived>& q) {
  require(q.rows() == q.cols(), "greedy_stable needs a square matrix (N = K*M)");
  const int n = static_cast<int>(q.rows());
  std::vector<int> order(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n * n; ++i) order[i] = i;
  // Row-major entry id = user * n + resource, so the stable sort keeps the
  // (user, resource) tie order.
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return q(x / n, x % n) > q(y / n, y % n);
  });
  ActionProfile profile = ActionProfile::Constant(n, kUnassigned);
  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  int matched = 0;
  for (int id : order) {
    const int user = id / n;
    const int resource = id % n;
    if (profile[user] != kUnassigned || taken[resource]) continue;
    profile[user] = resource;
    taken[resource] = 1;
    if (++matched == n) break;
  }
  return profile;
}

ActionProfile greedy_stable(const UtilityMatrix& q);

/// Uniformly random perfect matching of the N users onto the N resources.
ActionProfile random_allocation(const ProtocolParams& params, Rng& rng);

/// Best and second-best orthogonal welfare by enumerating all N! profiles.
/// Only for N <= 7. `second` equals `best` when several optima exist.
struct ExhaustiveResult {
  ActionProfile best_profile;
  double best = 0.0;
  double second = 0.0;
  long n_optimal = 0;
};
ExhaustiveResult exhaustive_best_two(const Eigen::MatrixXd& q);

}  // namespace colmac
