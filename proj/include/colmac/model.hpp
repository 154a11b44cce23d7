#pragma once

#include "colmac/types.hpp"

#include <span>
#include <vector>

namespace colmac {

// Utility, welfare and regret. The templated overloads accept any dense
// Eigen matrix (estimates, integer levels, ...); the UtilityMatrix overloads
// return rates in bits per channel use.

/// True when no two assigned users share a resource and all are assigned.
bool is_orthogonal(const ActionProfile& profile, int n_resources);

/// Utility of `user`: its matrix entry when its resource is not shared, else 0.
template <typename Derived>
typename Derived::Scalar utility(const Eigen::MatrixBase<Derived>& q, const ActionProfile& profile,
                                 int user) {
  require(profile.size() == q.rows(), "profile length must equal the number of users");
  require(user >= 0 && user < profile.size(), "user index out of range");
  const int a = profile[user];
  if (a == kUnassigned) return typename Derived::Scalar(0);
  require(a >= 0 && a < q.cols(), "resource index out of range");
  for (int other = 0; other < profile.size(); ++other) {
    if (other != user && profile[other] == a) return typename Derived::Scalar(0);
  }
  return q(user, a);
}

/// Sum of utilities. Collisions zero every colliding user.
template <typename Derived>
typename Derived::Scalar welfare(const Eigen::MatrixBase<Derived>& q, const ActionProfile& profile) {
  require(profile.size() == q.rows(), "profile length must equal the number of users");
  std::vector<int> load(static_cast<std::size_t>(q.cols()), 0);
  for (int n = 0; n < profile.size(); ++n) {
    const int a = profile[n];
    if (a == kUnassigned) continue;
    require(a >= 0 && a < q.cols(), "resource index out of range");
    ++load[static_cast<std::size_t>(a)];
  }
  typename Derived::Scalar total(0);
  for (int n = 0; n < profile.size(); ++n) {
    const int a = profile[n];
    if (a != kUnassigned && load[static_cast<std::size_t>(a)] == 1) total += q(n, a);
  }
  return total;
}

double utility(const UtilityMatrix& q, const ActionProfile& profile, int user);
double welfare(const UtilityMatrix& q, const ActionProfile& profile);

/// Welfare in integer units of delta_min; exact.
long welfare_levels(const UtilityMatrix& q, const ActionProfile& profile);

/// Realized welfare trajectory against the optimum.
struct WelfareSeries {
  std::vector<double> welfare;
  double optimal = 0.0;
};

/// Sum over slots of (W* - W^t). Empty series gives 0.
double regret(const WelfareSeries& series);
double regret(double optimal, std::span<const double> welfare);

}  // namespace colmac
