#include "colmac/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace colmac {

int ProtocolParams::lambda() const {
  int lambda = 1;
  double reach = beta;
  while (reach < b_star * (1.0 - 1e-12)) {
    reach *= beta;
    ++lambda;
  }
  return lambda;
}

void ProtocolParams::validate() const {
  auto fail = [](const std::string& what) { throw ContractViolation(what); };
  if (n_users < 1) fail("n_users must be positive");
  if (n_channels < 1) fail("n_channels must be positive");
  if (n_users % n_channels != 0) {
    std::ostringstream os;
    os << "n_users (" << n_users << ") must be a multiple of n_channels (" << n_channels << ")";
    fail(os.str());
  }
  if (!(delta_min > 0.0) || delta_min > q_max) fail("require 0 < delta_min <= q_max");
  const double levels = q_max / delta_min;
  if (std::abs(levels - std::round(levels)) > 1e-9) fail("q_max must be a multiple of delta_min");
  if (beta < 2) fail("beta must be at least 2");
  if (!(zeta > 0.0) || zeta > 1.0) fail("zeta must lie in (0, 1]");
  if (!(eps_final > 0.0)) fail("eps_final must be positive");
  if (eps_init < eps_final) fail("eps_init must be >= eps_final");
  if (b_star < 1.0) fail("b_star must be >= 1");
  if (i_max < 1) fail("i_max must be positive");
  if (theory_mode && eps_final > delta_min / (8.0 * n_users) * (1.0 + 1e-12)) {
    fail("theory_mode requires eps_final <= delta_min / (8 n_users)");
  }
}

ProtocolParams ProtocolParams::theoretical(int n_users, int n_channels, double q_max,
                                           double delta_min) {
  ProtocolParams p;
  p.n_users = n_users;
  p.n_channels = n_channels;
  p.q_max = q_max;
  p.delta_min = delta_min;
  p.eps_final = delta_min / (8.0 * n_users);
  p.eps_init = p.eps_final;
  p.zeta = 1.0;
  p.b_star = 8.0 * n_users * q_max / delta_min;
  p.i_max = 1'000'000;
  p.theory_mode = true;
  return p;
}

UtilityMatrix::UtilityMatrix(Eigen::MatrixXi levels, double delta_min, int max_level)
    : levels_(std::move(levels)), delta_min_(delta_min), max_level_(max_level) {
  require(delta_min_ > 0.0, "delta_min must be positive");
  require(max_level_ >= 1, "max_level must be positive");
  require(levels_.size() == 0 || (levels_.minCoeff() >= 0 && levels_.maxCoeff() <= max_level_),
          "utility levels must lie in [0, Q_M / delta_min]");
}

UtilityMatrix UtilityMatrix::from_rates(const Eigen::MatrixXd& rates, double delta_min,
                                        double q_max) {
  const int max_level = static_cast<int>(std::lround(q_max / delta_min));
  Eigen::MatrixXi levels(rates.rows(), rates.cols());
  for (Eigen::Index i = 0; i < rates.size(); ++i) {
    const double scaled = rates.data()[i] / delta_min;
    const long rounded = std::lround(scaled);
    require(std::abs(scaled - static_cast<double>(rounded)) < 1e-9,
            "rates must be integer multiples of delta_min");
    levels.data()[i] = static_cast<int>(rounded);
  }
  return UtilityMatrix(std::move(levels), delta_min, max_level);
}

bool is_orthogonal(const ActionProfile& profile, int n_resources) {
  std::vector<char> used(static_cast<std::size_t>(n_resources), 0);
  for (int n = 0; n < profile.size(); ++n) {
    const int a = profile[n];
    if (a < 0 || a >= n_resources || used[static_cast<std::size_t>(a)]) return false;
    used[static_cast<std::size_t>(a)] = 1;
  }
  return true;
}

double utility(const UtilityMatrix& q, const ActionProfile& profile, int user) {
  return q.delta_min() * utility(q.levels(), profile, user);
}

long welfare_levels(const UtilityMatrix& q, const ActionProfile& profile) {
  return welfare(q.levels(), profile);
}

double welfare(const UtilityMatrix& q, const ActionProfile& profile) {
  return q.delta_min() * static_cast<double>(welfare_levels(q, profile));
}

double regret(double optimal, std::span<const double> welfare) {
  double total = 0.0;
  for (double w : welfare) total += optimal - w;
  return total;
}

double regret(const WelfareSeries& series) { return regret(series.optimal, series.welfare); }

}  // namespace colmac
