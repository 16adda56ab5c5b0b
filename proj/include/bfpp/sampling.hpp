#pragma once

#include <span>
#include <vector>

#include "bfpp/model.hpp"

namespace bfpp {

enum class PointRule { kMedian, kMean };

struct SampleConfig {
  int k_steps = 100;
  int num_samples = 100;  // draws per point prediction
  uint64_t seed = 0;
  bool joint_noise = true;
  PointRule point = PointRule::kMedian;
};

struct GenResult {
  double tau_raw = 0.0;  // denormalized, > 0
  int mark = 0;
  std::vector<double> p_out_final;
  double tau_norm = 0.0;  // the final clipped estimate before denormalization
  double final_rho = 0.0;
  int steps_run = 0;
  int predictions_made = 0;
};

// K-step generation: predict at t = (k-1)/K, draw a mark from p_out, draw the
// joint sender sample around (tau_hat, mark'), fold it into the running
// Bayesian updates, then predict once more at t = 1.
GenResult generate_next(ModelRuntime& rt, std::span<const double> h, const SampleConfig& cfg,
                        Rng& rng);

struct PointPrediction {
  double tau_point = 0.0;
  int mark_point = 0;
  std::vector<double> p_out_mean;
  std::vector<double> tau_draws;  // raw scale, one per sample
};

// Median (or mean) of the sampled times; mark by argmax of the averaged p_out.
PointPrediction predict_point(ModelRuntime& rt, std::span<const double> h,
                              const SampleConfig& cfg, Rng& rng);

double median(std::vector<double> xs);

}  // namespace bfpp
