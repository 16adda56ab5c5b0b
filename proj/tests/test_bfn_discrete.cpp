#include <doctest.h>

#include <cmath>
#include <vector>

#include "bfpp/bfn_discrete.hpp"
#include "stat_utils.hpp"

using namespace bfpp;

namespace {

void check_simplex(const CategoricalParams& p) {
  double sum = 0.0;
  for (double x : p.probs) {
    REQUIRE(x >= 0.0);
    sum += x;
  }
  REQUIRE(std::abs(sum - 1.0) < 1e-9);
}

}  // namespace

TEST_CASE("sender vanishes in the zero-accuracy limit") {
  Rng rng(1);
  const std::vector<double> y = sender_sample_disc(1, 1e-12, 3, rng);
  for (double v : y) CHECK(std::abs(v) < 1e-4);
  CHECK_THROWS_AS(sender_sample_disc(0, 0.0, 3, rng), NonPositiveAccuracy);
  CHECK_THROWS_AS(sender_sample_disc(3, 1.0, 3, rng), ValidationError);
}

TEST_CASE("sender empirical mean and covariance at M=3") {
  Rng rng(2);
  const int n = 100000, M = 3, mark = 1;
  const double alpha = 0.8;
  std::vector<double> mean(M, 0.0);
  std::vector<double> cov(M * M, 0.0);
  std::vector<std::vector<double>> draws(n);
  for (int s = 0; s < n; ++s) {
    draws[s] = sender_sample_disc(mark, alpha, M, rng);
    for (int i = 0; i < M; ++i) mean[i] += draws[s][i] / n;
  }
  const double sd = std::sqrt(alpha * M);
  for (int i = 0; i < M; ++i) {
    const double expected = alpha * (M * (i == mark ? 1.0 : 0.0) - 1.0);
    CHECK(std::abs(mean[i] - expected) < 4.0 * sd / std::sqrt(n));
  }
  for (int s = 0; s < n; ++s)
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j) cov[i * M + j] += (draws[s][i] - mean[i]) * (draws[s][j] - mean[j]) / n;
  for (int i = 0; i < M; ++i) {
    CHECK(std::abs(cov[i * M + i] - alpha * M) < 4.0 * alpha * M * std::sqrt(2.0 / n));
    for (int j = 0; j < M; ++j)
      if (i != j) CHECK(std::abs(cov[i * M + j]) < 4.0 * alpha * M / std::sqrt(n));
  }
}

TEST_CASE("bayes update identity and saturation") {
  const CategoricalParams u = CategoricalParams::uniform(3);
  const CategoricalParams same = bayes_update_disc(u, std::vector<double>{0.0, 0.0, 0.0});
  for (int i = 0; i < 3; ++i) CHECK(same.probs[i] == doctest::Approx(1.0 / 3).epsilon(1e-15));

  const CategoricalParams sat = bayes_update_disc(u, std::vector<double>{0.0, 500.0, 0.0});
  CHECK(sat.probs[1] > 1.0 - 1e-12);
  check_simplex(sat);
}

TEST_CASE("bayes update hand evaluation at M=2") {
  const CategoricalParams u = CategoricalParams::uniform(2);
  const CategoricalParams q = bayes_update_disc(u, std::vector<double>{std::log(2.0), 0.0});
  CHECK(q.probs[0] == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(q.probs[1] == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("flow at t=0 is exactly uniform") {
  Rng rng(3);
  const DiscreteSchedule sched{1.0};
  const CategoricalParams p = flow_sample_disc(2, 0.0, sched, 4, rng);
  for (double x : p.probs) CHECK(x == 0.25);
}

TEST_CASE("flow concentrates on the true mark at large accuracy") {
  Rng rng(4);
  const DiscreteSchedule sched{200.0};
  int hits = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const CategoricalParams p = flow_sample_disc(1, 1.0, sched, 3, rng);
    check_simplex(p);
    int argmax = 0;
    for (int j = 1; j < 3; ++j)
      if (p.probs[j] > p.probs[argmax]) argmax = j;
    hits += argmax == 1 ? 1 : 0;
  }
  CHECK(static_cast<double>(hits) / n > 0.999);
}

TEST_CASE("flow equals one Bayesian update of the uniform prior") {
  // softmax(y) == update(uniform, y), same y
  Rng rng(5);
  const int M = 4;
  const DiscreteSchedule sched{2.0};
  const double t = 0.6, b = sched.beta(t);
  const double sd = std::sqrt(b * M);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> y(M);
    for (int i = 0; i < M; ++i)
      y[i] = b * (M * (i == 2 ? 1.0 : 0.0) - 1.0) + sd * rng.normal();
    const CategoricalParams via_update = bayes_update_disc(CategoricalParams::uniform(M), y);
    // flow path applies softmax directly
    std::vector<double> shifted = y;
    const double mx = *std::max_element(shifted.begin(), shifted.end());
    double z = 0.0;
    for (double v : shifted) z += std::exp(v - mx);
    for (int i = 0; i < M; ++i)
      REQUIRE(std::abs(via_update.probs[i] - std::exp(y[i] - mx) / z) < 1e-12);
  }
}

TEST_CASE("update additivity in distribution") {
  Rng rng(6);
  const int M = 3, mark = 0, draws = 10000;
  const double a1 = 0.4, a2 = 1.1;
  std::vector<double> coord_two(draws), coord_one(draws);
  for (int d = 0; d < draws; ++d) {
    CategoricalParams p = CategoricalParams::uniform(M);
    p = bayes_update_disc(p, sender_sample_disc(mark, a1, M, rng));
    p = bayes_update_disc(p, sender_sample_disc(mark, a2, M, rng));
    coord_two[d] = p.probs[mark];
    const CategoricalParams q = bayes_update_disc(CategoricalParams::uniform(M),
                                                  sender_sample_disc(mark, a1 + a2, M, rng));
    coord_one[d] = q.probs[mark];
  }
  CHECK(statu::ks_test_two_sample(coord_two, coord_one) > 0.01);
}

TEST_CASE("alpha_step_disc closed forms and telescoping") {
  CHECK(alpha_step_disc(1, 1, 3.5) == 3.5);
  for (int K : {2, 10, 100}) {
    double sum = 0.0, prev = 0.0;
    for (int i = 1; i <= K; ++i) {
      const double a = alpha_step_disc(i, K, 3.5);
      CHECK(a > prev);
      prev = a;
      sum += a;
    }
    CHECK(std::abs(sum - 3.5) < 1e-9);
  }
  CHECK_THROWS_AS(alpha_step_disc(0, 5, 1.0), Error);
}

TEST_CASE("simplex closure along random op chains") {
  Rng rng(7);
  const DiscreteSchedule sched{1.5};
  for (int rep = 0; rep < 200; ++rep) {
    const int M = 2 + static_cast<int>(rng.next_u64() % 5);
    CategoricalParams p = flow_sample_disc(0, rng.uniform(), sched, M, rng);
    check_simplex(p);
    for (int step = 0; step < 5; ++step) {
      p = bayes_update_disc(p, sender_sample_disc(static_cast<int>(rng.next_u64() % M),
                                                  0.1 + rng.uniform(), M, rng));
      check_simplex(p);
    }
  }
}
