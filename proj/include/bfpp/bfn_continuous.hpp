#pragma once

#include <cmath>

#include "bfpp/errors.hpp"
#include "bfpp/rng.hpp"

namespace bfpp {

// Gaussian input-distribution parameters for the interval variable.
// Prior is {mu = 0, rho = 1}.
struct ContinuousParams {
  double mu = 0.0;
  double rho = 1.0;  // precision, > 0
};

enum class FlowVariance {
  kStandard,  // gamma (1 - gamma)
  kPaperForm  // tau (1 - gamma), clamped at 0
};

// Accuracy schedule gamma(t) = 1 - sigma1^(2t); cumulative accuracy
// beta(t) = sigma1^(-2t) - 1, so the precision after flowing to t is 1/(1-gamma).
struct ContinuousSchedule {
  double sigma1 = 0.001;  // in (0,1)

  double gamma(double t) const { return 1.0 - std::pow(sigma1, 2.0 * t); }
  double beta(double t) const { return std::pow(sigma1, -2.0 * t) - 1.0; }
  double rho_at(double t) const { return 1.0 + beta(t); }
};

// Draw from N(tau, 1/alpha).
double sender_sample_cont(double tau, double alpha, Rng& rng);

// Exact conjugate posterior update: rho' = rho + alpha,
// mu' = (mu rho + y alpha) / rho'.
ContinuousParams bayes_update_cont(const ContinuousParams& p, double y, double alpha);

// Sample the flow state at time t: mu ~ N(gamma tau, var), rho = 1/(1-gamma).
ContinuousParams flow_sample_cont(double tau, double t, const ContinuousSchedule& sched, Rng& rng,
                                  FlowVariance variance = FlowVariance::kStandard);

// Per-step accuracy of the K-step sampler: sigma1^(-2i/K) (1 - sigma1^(2/K)).
// Sums over i = 1..K to sigma1^(-2) - 1.
double alpha_step_cont(int i, int k_steps, double sigma1);

}  // namespace bfpp
