#include "bfpp/bfn_continuous.hpp"

#include <algorithm>

namespace bfpp {

double sender_sample_cont(double tau, double alpha, Rng& rng) {
  if (!(alpha > 0.0)) throw NonPositiveAccuracy("sender_sample_cont: alpha must be > 0");
  return tau + rng.normal() / std::sqrt(alpha);
}

ContinuousParams bayes_update_cont(const ContinuousParams& p, double y, double alpha) {
  if (!(alpha > 0.0)) throw NonPositiveAccuracy("bayes_update_cont: alpha must be > 0");
  ContinuousParams out;
  out.rho = p.rho + alpha;
  out.mu = (p.mu * p.rho + y * alpha) / out.rho;
  return out;
}

ContinuousParams flow_sample_cont(double tau, double t, const ContinuousSchedule& sched, Rng& rng,
                                  FlowVariance variance) {
  const double g = sched.gamma(t);
  const double var =
      variance == FlowVariance::kStandard ? g * (1.0 - g) : std::max(tau, 0.0) * (1.0 - g);
  ContinuousParams out;
  out.mu = g * tau + (var > 0.0 ? rng.normal() * std::sqrt(var) : 0.0);
  out.rho = 1.0 / (1.0 - g);
  return out;
}

double alpha_step_cont(int i, int k_steps, double sigma1) {
  if (i < 1 || i > k_steps) throw Error("alpha_step_cont: step index out of range");
  const double s2k = std::pow(sigma1, 2.0 / k_steps);
  return std::pow(sigma1, -2.0 * i / k_steps) * (1.0 - s2k);
}

}  // namespace bfpp
