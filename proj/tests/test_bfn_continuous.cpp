#include <doctest.h>

#include <cmath>
#include <vector>

#include "bfpp/bfn_continuous.hpp"
#include "stat_utils.hpp"

using namespace bfpp;

TEST_CASE("sender collapses onto tau at huge accuracy") {
  Rng rng(1);
  for (int i = 0; i < 100; ++i)
    CHECK(std::abs(sender_sample_cont(0.37, 1e12, rng) - 0.37) < 1e-5);
  CHECK_THROWS_AS(sender_sample_cont(0.0, 0.0, rng), NonPositiveAccuracy);
}

TEST_CASE("sender empirical mean and variance") {
  Rng rng(2);
  const int n = 100000;
  const double tau = 1.3, alpha = 4.0;
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = sender_sample_cont(tau, alpha, rng);
    s += y;
    ss += (y - tau) * (y - tau);
  }
  CHECK(std::abs(s / n - tau) < 3.0 * std::sqrt(0.25 / n));
  CHECK(std::abs(ss / n - 0.25) < 3.0 * 0.25 * std::sqrt(2.0 / n));
}

TEST_CASE("bayes update direct formula") {
  const ContinuousParams p{0.0, 1.0};
  const ContinuousParams q = bayes_update_cont(p, 2.0, 1.0);
  CHECK(q.mu == 1.0);
  CHECK(q.rho == 2.0);
  CHECK_THROWS_AS(bayes_update_cont(p, 0.0, -1.0), NonPositiveAccuracy);
}

TEST_CASE("bayes update is inert in the no-information limit") {
  const ContinuousParams p{0.42, 2.5};
  const ContinuousParams q = bayes_update_cont(p, 100.0, 1e-15);
  CHECK(std::abs(q.mu - p.mu) < 1e-12);
  CHECK(std::abs(q.rho - p.rho) < 1e-12);
}

TEST_CASE("bayes update equals the brute-force grid posterior") {
  // posterior of N(tau; mu, 1/rho) prior with N(y; tau, 1/alpha) likelihood,
  // normalized on a fine tau-grid; moments must match the conjugate formula.
  const double mu = 0.3, rho = 2.0, y = -0.8, alpha = 1.7;
  const ContinuousParams post = bayes_update_cont({mu, rho}, y, alpha);
  const double lo = -10.0, hi = 10.0;
  const int n = 400000;
  const double h = (hi - lo) / n;
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double tau = lo + i * h;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    const double dens = std::exp(-0.5 * rho * (tau - mu) * (tau - mu)) *
                        std::exp(-0.5 * alpha * (y - tau) * (y - tau));
    z += w * dens;
    m1 += w * dens * tau;
    m2 += w * dens * tau * tau;
  }
  m1 /= z;
  m2 /= z;
  CHECK(std::abs(m1 - post.mu) < 1e-6);
  CHECK(std::abs((m2 - m1 * m1) - 1.0 / post.rho) < 1e-6);
}

TEST_CASE("conjugacy exactness on random triples") {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double mu = rng.normal() * 3.0;
    const double rho = std::exp(rng.normal());
    const double y = rng.normal() * 3.0;
    const double alpha = std::exp(rng.normal() * 2.0);
    const ContinuousParams q = bayes_update_cont({mu, rho}, y, alpha);
    const double rho_ref = rho + alpha;
    const double mu_ref = (mu * rho + y * alpha) / rho_ref;
    REQUIRE(std::abs(q.rho - rho_ref) <= 1e-12 * std::max(1.0, std::abs(rho_ref)));
    REQUIRE(std::abs(q.mu - mu_ref) <= 1e-12 * std::max(1.0, std::abs(mu_ref)));
  }
}

TEST_CASE("two updates compose like one with summed accuracy") {
  const double mu = 0.1, rho = 1.0, a1 = 0.7, a2 = 2.2, y1 = 1.5, y2 = -0.4;
  const ContinuousParams two = bayes_update_cont(bayes_update_cont({mu, rho}, y1, a1), y2, a2);
  const double y_comb = (a1 * y1 + a2 * y2) / (a1 + a2);
  const ContinuousParams one = bayes_update_cont({mu, rho}, y_comb, a1 + a2);
  CHECK(two.rho == doctest::Approx(one.rho).epsilon(1e-15));
  CHECK(two.mu == doctest::Approx(one.mu).epsilon(1e-13));
}

TEST_CASE("flow at t=0 is exactly the prior") {
  Rng rng(4);
  const ContinuousSchedule sched{0.001};
  const ContinuousParams p = flow_sample_cont(2.7, 0.0, sched, rng);
  CHECK(p.mu == 0.0);
  CHECK(p.rho == 1.0);
}

TEST_CASE("flow at t=1 concentrates on tau for small sigma1") {
  Rng rng(5);
  const ContinuousSchedule sched{1e-6};
  for (int i = 0; i < 100; ++i) {
    const ContinuousParams p = flow_sample_cont(0.8, 1.0, sched, rng);
    CHECK(std::abs(p.mu - 0.8) < 1e-4);
  }
}

TEST_CASE("paper-form flow variance uses tau(1-gamma) clamped at zero") {
  Rng rng(6);
  const ContinuousSchedule sched{0.5};
  // negative tau: variance clamps to zero, mu deterministic
  const ContinuousParams p =
      flow_sample_cont(-1.0, 0.5, sched, rng, FlowVariance::kPaperForm);
  CHECK(p.mu == sched.gamma(0.5) * -1.0);
}

TEST_CASE("flow matches the composition of discrete updates") {
  // distribution of mu at t: flow sample vs 64 Bayesian updates whose
  // accuracies sum to beta(t), starting at the prior
  const ContinuousSchedule sched{0.02};
  const double t = 0.5, tau = 0.9;
  const int draws = 10000, steps = 64;
  std::vector<double> flow_mu(draws), composed_mu(draws);
  Rng rng(7);
  const double beta_total = sched.beta(t);
  for (int d = 0; d < draws; ++d) {
    flow_mu[d] = flow_sample_cont(tau, t, sched, rng).mu;
    ContinuousParams p{0.0, 1.0};
    for (int s = 0; s < steps; ++s) {
      const double a = beta_total / steps;
      p = bayes_update_cont(p, sender_sample_cont(tau, a, rng), a);
    }
    composed_mu[d] = p.mu;
  }
  CHECK(statu::ks_test_two_sample(flow_mu, composed_mu) > 0.01);
}

TEST_CASE("alpha_step closed form, monotonicity and telescoping") {
  const double s1 = 0.02;
  CHECK(alpha_step_cont(1, 1, s1) ==
        doctest::Approx((1.0 - s1 * s1) / (s1 * s1)).epsilon(1e-12));
  for (int K : {2, 10, 100}) {
    double sum = 0.0, prev = 0.0;
    for (int i = 1; i <= K; ++i) {
      const double a = alpha_step_cont(i, K, s1);
      CHECK(a > prev);
      prev = a;
      sum += a;
    }
    CHECK(std::abs(sum - (1.0 / (s1 * s1) - 1.0)) < 1e-9 * (1.0 / (s1 * s1)));
  }
  CHECK_THROWS_AS(alpha_step_cont(0, 10, s1), Error);
  CHECK_THROWS_AS(alpha_step_cont(11, 10, s1), Error);
}

TEST_CASE("precision after the full schedule is 1/sigma1^2") {
  const double s1 = 0.05;
  const int K = 100;
  double rho = 1.0;
  for (int i = 1; i <= K; ++i) rho += alpha_step_cont(i, K, s1);
  CHECK(rho == doctest::Approx(1.0 / (s1 * s1)).epsilon(1e-12));
  const ContinuousSchedule sched{s1};
  CHECK(sched.rho_at(1.0) == doctest::Approx(1.0 / (s1 * s1)).epsilon(1e-12));
}
