#include "bfpp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bfpp {

GenResult generate_next(ModelRuntime& rt, std::span<const double> h, const SampleConfig& cfg,
                        Rng& rng) {
  const ModelState& m = *rt.model;
  const int M = m.num_marks;
  const int K = cfg.k_steps;
  const std::vector<double> c = m.effective_c(cfg.joint_noise);

  GenResult out;
  ContinuousParams cont;  // prior {0, 1}
  CategoricalParams theta = CategoricalParams::uniform(M);
  for (int k = 1; k <= K; ++k) {
    const double time = static_cast<double>(k - 1) / K;
    const PredictionOutput pred = rt.predict(cont.mu, theta.probs, time, h);
    ++out.predictions_made;
    const double alpha_c = alpha_step_cont(k, K, m.cfg.sigma1);
    const double alpha_d = alpha_step_disc(k, K, m.cfg.beta1);
    const int mark_draw = sample_categorical(rng, pred.p_out);
    const JointCovariance cov = build_joint_cov(alpha_c, alpha_d, M, c);
    const JointSample y = joint_sender_sample(pred.tau_hat, mark_draw, cov, rng);
    cont = bayes_update_cont(cont, y.y_tau, alpha_c);
    theta = bayes_update_disc(theta, y.y_mark);
    ++out.steps_run;
  }
  const PredictionOutput final_pred = rt.predict(cont.mu, theta.probs, 1.0, h);
  ++out.predictions_made;
  out.tau_norm = final_pred.tau_hat;
  out.tau_raw = denormalize(final_pred.tau_hat, m.norm);
  out.p_out_final = final_pred.p_out;
  out.mark = static_cast<int>(std::max_element(final_pred.p_out.begin(), final_pred.p_out.end()) -
                              final_pred.p_out.begin());
  out.final_rho = cont.rho;
  return out;
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw EmptyData("median: no values");
  std::sort(xs.begin(), xs.end());
  const size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

PointPrediction predict_point(ModelRuntime& rt, std::span<const double> h,
                              const SampleConfig& cfg, Rng& rng) {
  const int M = rt.model->num_marks;
  PointPrediction out;
  out.p_out_mean.assign(M, 0.0);
  out.tau_draws.reserve(cfg.num_samples);
  for (int s = 0; s < cfg.num_samples; ++s) {
    const GenResult g = generate_next(rt, h, cfg, rng);
    out.tau_draws.push_back(g.tau_raw);
    for (int i = 0; i < M; ++i) out.p_out_mean[i] += g.p_out_final[i] / cfg.num_samples;
  }
  out.tau_point = cfg.point == PointRule::kMedian
                      ? median(out.tau_draws)
                      : std::accumulate(out.tau_draws.begin(), out.tau_draws.end(), 0.0) /
                            out.tau_draws.size();
  out.mark_point = static_cast<int>(
      std::max_element(out.p_out_mean.begin(), out.p_out_mean.end()) - out.p_out_mean.begin());
  return out;
}

}  // namespace bfpp
