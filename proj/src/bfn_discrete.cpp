#include "bfpp/bfn_discrete.hpp"

#include <cmath>

#include "bfpp/linalg.hpp"

namespace bfpp {

std::vector<double> sender_sample_disc(int mark, double alpha, int num_marks, Rng& rng) {
  if (!(alpha > 0.0)) throw NonPositiveAccuracy("sender_sample_disc: alpha must be > 0");
  if (mark < 0 || mark >= num_marks) throw ValidationError("sender_sample_disc: mark out of range");
  const double sd = std::sqrt(alpha * num_marks);
  std::vector<double> y(num_marks);
  for (int i = 0; i < num_marks; ++i)
    y[i] = alpha * (num_marks * (i == mark ? 1.0 : 0.0) - 1.0) + sd * rng.normal();
  return y;
}

CategoricalParams bayes_update_disc(const CategoricalParams& p, std::span<const double> y) {
  const size_t m = p.probs.size();
  if (y.size() != m) throw DimensionMismatch("bayes_update_disc: dims disagree");
  std::vector<double> logits(m);
  for (size_t i = 0; i < m; ++i) logits[i] = y[i] + std::log(p.probs[i]);
  CategoricalParams out;
  out.probs = softmax(logits);
  return out;
}

CategoricalParams flow_sample_disc(int mark, double t, const DiscreteSchedule& sched,
                                   int num_marks, Rng& rng) {
  const double b = sched.beta(t);
  if (b == 0.0) return CategoricalParams::uniform(num_marks);
  const double sd = std::sqrt(b * num_marks);
  std::vector<double> y(num_marks);
  for (int i = 0; i < num_marks; ++i)
    y[i] = b * (num_marks * (i == mark ? 1.0 : 0.0) - 1.0) + sd * rng.normal();
  CategoricalParams out;
  out.probs = softmax(y);
  return out;
}

double alpha_step_disc(int i, int k_steps, double beta1) {
  if (i < 1 || i > k_steps) throw Error("alpha_step_disc: step index out of range");
  return beta1 * (2.0 * i - 1.0) / (static_cast<double>(k_steps) * k_steps);
}

}  // namespace bfpp
