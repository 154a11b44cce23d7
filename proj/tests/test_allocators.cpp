#include "colmac/allocators.hpp"

#include "oracle.hpp"

#include <doctest.h>

#include <map>

using namespace colmac;

TEST_CASE("hungarian matches the subset-DP oracle on integer matrices") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 10;
    const Eigen::MatrixXi levels = oracle::random_levels(n, n, 8, rng);
    const auto best = hungarian(levels);
    CHECK(is_orthogonal(best.profile, n));
    CHECK(best.welfare == static_cast<int>(oracle::best_assignment(levels)));
    std::vector<int> v(best.profile.data(), best.profile.data() + n);
    CHECK(oracle::welfare(levels, v) == best.welfare);
  }
}

TEST_CASE("hungarian on real matrices") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-2.0, 9.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 8;
    Eigen::MatrixXd q(n, n);
    for (Eigen::Index i = 0; i < q.size(); ++i) q.data()[i] = d(rng);
    const auto best = hungarian(q);
    CHECK(best.welfare == doctest::Approx(oracle::best_assignment(q)).epsilon(1e-12));
  }
}

TEST_CASE("hungarian rejects non-square input") {
  CHECK_THROWS_AS(hungarian(Eigen::MatrixXd::Zero(2, 3)), ContractViolation);
}

TEST_CASE("hungarian on a UtilityMatrix reports rates") {
  Eigen::MatrixXi levels(2, 2);
  levels << 4, 1, 3, 4;
  const auto best = hungarian(UtilityMatrix(levels, 0.5, 8));
  CHECK(best.welfare == doctest::Approx(4.0));
}

TEST_CASE("greedy takes the largest entries first") {
  Eigen::MatrixXi q(2, 2);
  q << 3, 2,
       2, 0;
  const ActionProfile p = greedy_stable(q);
  CHECK(p[0] == 0);
  CHECK(p[1] == 1);
  CHECK(welfare(q, p) == 3);
  CHECK(hungarian(q).welfare == 4);
}

TEST_CASE("greedy tie-break: lowest user, then lowest resource") {
  const Eigen::MatrixXi q = Eigen::MatrixXi::Constant(3, 3, 5);
  const ActionProfile p = greedy_stable(q);
  CHECK(p[0] == 0);
  CHECK(p[1] == 1);
  CHECK(p[2] == 2);
}

TEST_CASE("greedy is orthogonal and never beats the optimum") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 7;
    const Eigen::MatrixXi levels = oracle::random_levels(n, n, 8, rng);
    const ActionProfile p = greedy_stable(levels);
    CHECK(is_orthogonal(p, n));
    CHECK(welfare(levels, p) <= oracle::best_assignment(levels));
  }
}

TEST_CASE("random allocation is a uniform permutation") {
  ProtocolParams params;
  params.n_users = 3;
  params.n_channels = 3;
  Rng rng(17);
  std::map<std::vector<int>, int> counts;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) {
    const ActionProfile p = random_allocation(params, rng);
    REQUIRE(is_orthogonal(p, 3));
    counts[{p[0], p[1], p[2]}]++;
  }
  CHECK(counts.size() == 6);
  // 6 equally likely outcomes: sd of each count is ~91.
  for (const auto& [perm, c] : counts) CHECK(std::abs(c - draws / 6) < 500);
}

TEST_CASE("exhaustive best two against enumeration") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 5;
    const Eigen::MatrixXd q = oracle::random_levels(n, n, 8, rng).cast<double>();
    std::vector<double> values;
    for (const auto& prof : oracle::all_profiles(n)) values.push_back(oracle::welfare(q, prof));
    std::sort(values.rbegin(), values.rend());
    const long n_opt = std::count(values.begin(), values.end(), values.front());
    const ExhaustiveResult r = exhaustive_best_two(q);
    CHECK(r.best == values.front());
    CHECK(r.n_optimal == n_opt);
    CHECK(r.second == (n_opt > 1 ? values.front() : values[static_cast<std::size_t>(n_opt)]));
  }
  CHECK_THROWS_AS(exhaustive_best_two(Eigen::MatrixXd::Zero(8, 8)), ContractViolation);
}
