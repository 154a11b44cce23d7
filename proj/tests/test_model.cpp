#include "colmac/model.hpp"

#include "oracle.hpp"

#include <doctest.h>

using namespace colmac;

namespace {

UtilityMatrix small_q() {
  Eigen::MatrixXi levels(3, 3);
  levels << 5, 3, 1,
            2, 6, 4,
            7, 0, 8;
  return UtilityMatrix(levels, 1.0, 8);
}

}  // namespace

TEST_CASE("resource index round trip") {
  for (int m_count : {1, 2, 4}) {
    for (int k = 0; k < 8; ++k) {
      for (int m = 0; m < m_count; ++m) {
        const Resource r{k, m};
        CHECK(Resource::from_index(r.index(m_count), m_count) == r);
      }
    }
  }
  CHECK(Resource{2, 3}.index(4) == 11);
}

TEST_CASE("welfare of an orthogonal profile is the sum of entries") {
  const UtilityMatrix q = small_q();
  ActionProfile p(3);
  p << 0, 1, 2;
  CHECK(welfare(q, p) == doctest::Approx(5 + 6 + 8));
  CHECK(is_orthogonal(p, 3));
}

TEST_CASE("collisions zero every colliding user") {
  const UtilityMatrix q = small_q();
  ActionProfile p(3);
  p << 0, 0, 2;
  CHECK(utility(q, p, 0) == 0.0);
  CHECK(utility(q, p, 1) == 0.0);
  CHECK(utility(q, p, 2) == 8.0);
  CHECK(welfare(q, p) == 8.0);
  CHECK_FALSE(is_orthogonal(p, 3));

  p << 1, 1, 1;
  CHECK(welfare(q, p) == 0.0);
}

TEST_CASE("idle users contribute nothing") {
  const UtilityMatrix q = small_q();
  ActionProfile p(3);
  p << kUnassigned, 1, 2;
  CHECK(welfare(q, p) == 14.0);
  CHECK_FALSE(is_orthogonal(p, 3));
}

TEST_CASE("welfare matches the pairwise-collision oracle") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> pick(-1, 4);
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::MatrixXi levels = oracle::random_levels(5, 5, 8, rng);
    const UtilityMatrix q(levels, 0.5, 8);
    ActionProfile p(5);
    std::vector<int> v(5);
    for (int n = 0; n < 5; ++n) v[n] = p[n] = pick(rng);
    CHECK(welfare(q, p) == doctest::Approx(0.5 * oracle::welfare(levels, v)));
    CHECK(welfare_levels(q, p) == static_cast<long>(oracle::welfare(levels, v)));
  }
}

TEST_CASE("templated welfare works on real matrices") {
  Eigen::MatrixXd q(2, 2);
  q << 0.25, 1.5, 2.0, 0.75;
  ActionProfile p(2);
  p << 1, 0;
  CHECK(welfare(q, p) == doctest::Approx(3.5));
  CHECK_THROWS_AS(welfare(q, ActionProfile::Zero(3)), ContractViolation);
}

TEST_CASE("regret sums the shortfall") {
  CHECK(regret(WelfareSeries{{}, 10.0}) == 0.0);
  CHECK(regret(WelfareSeries{{10.0, 10.0, 10.0}, 10.0}) == 0.0);
  CHECK(regret(WelfareSeries{{4.0, 6.0, 10.0}, 10.0}) == doctest::Approx(10.0));
}

TEST_CASE("protocol parameters") {
  ProtocolParams p;
  CHECK(p.n_slots() == 4);
  CHECK(p.n_resources() == 32);
  CHECK(p.lambda() == 1);
  CHECK(p.delta() == doctest::Approx(1.0 / 8.0));
  p.validate();

  p.b_star = 2048;
  CHECK(p.lambda() == 6);
  p.b_star = 512;
  CHECK(p.lambda() == 5);
  p.b_star = 256;
  CHECK(p.lambda() == 4);
  p.b_star = 1;
  CHECK(p.lambda() == 1);

  ProtocolParams bad;
  bad.n_users = 30;
  CHECK_THROWS_AS(bad.validate(), ContractViolation);
  bad = ProtocolParams{};
  bad.zeta = 1.5;
  CHECK_THROWS_AS(bad.validate(), ContractViolation);
  bad = ProtocolParams{};
  bad.theory_mode = true;  // eps_final = 1/32 > 1/256
  CHECK_THROWS_AS(bad.validate(), ContractViolation);
}

TEST_CASE("theoretical parameter choice") {
  const ProtocolParams p = ProtocolParams::theoretical(16, 4);
  CHECK(p.eps_final == doctest::Approx(1.0 / 128.0));
  CHECK(p.eps_init == p.eps_final);
  CHECK(p.zeta == 1.0);
  CHECK(p.b_star == doctest::Approx(1024.0));
  CHECK(p.lambda() == 5);
  p.validate();
}

TEST_CASE("utility matrix construction") {
  Eigen::MatrixXd rates(2, 2);
  rates << 0.0, 0.5, 1.5, 4.0;
  const UtilityMatrix q = UtilityMatrix::from_rates(rates, 0.5, 4.0);
  CHECK(q.levels()(1, 1) == 8);
  CHECK(q.rate(1, 0) == 1.5);
  CHECK(q.q_max() == 4.0);
  rates(0, 0) = 0.3;
  CHECK_THROWS_AS(UtilityMatrix::from_rates(rates, 0.5, 4.0), ContractViolation);
  Eigen::MatrixXi too_big = Eigen::MatrixXi::Constant(2, 2, 9);
  CHECK_THROWS_AS(UtilityMatrix(too_big, 1.0, 8), ContractViolation);
}
