#pragma once

#include <span>
#include <vector>

#include "bfpp/errors.hpp"
#include "bfpp/rng.hpp"

namespace bfpp {

// Point on the mark simplex; prior is uniform 1/M.
struct CategoricalParams {
  std::vector<double> probs;

  static CategoricalParams uniform(int num_marks) {
    CategoricalParams p;
    p.probs.assign(num_marks, 1.0 / num_marks);
    return p;
  }
};

// Quadratic accuracy schedule beta(t) = beta1 t^2.
struct DiscreteSchedule {
  double beta1 = 1.0;  // > 0

  double beta(double t) const { return beta1 * t * t; }
};

// CLT-Gaussian sender: y ~ N(alpha (M e_m - 1), alpha M I).
std::vector<double> sender_sample_disc(int mark, double alpha, int num_marks, Rng& rng);

// theta' proportional to exp(y) ⊙ theta, renormalized (log-space arithmetic).
CategoricalParams bayes_update_disc(const CategoricalParams& p, std::span<const double> y);

// theta = softmax(y), y ~ N(beta(t) (M e_m - 1), beta(t) M I); exactly uniform at t = 0.
CategoricalParams flow_sample_disc(int mark, double t, const DiscreteSchedule& sched,
                                   int num_marks, Rng& rng);

// Per-step accuracy beta1 (2i - 1) / K^2; sums over i = 1..K to beta1.
double alpha_step_disc(int i, int k_steps, double beta1);

}  // namespace bfpp
