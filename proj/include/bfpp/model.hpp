#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bfpp/bfn_continuous.hpp"
#include "bfpp/encoder.hpp"
#include "bfpp/event_data.hpp"
#include "bfpp/joint.hpp"
#include "bfpp/psi.hpp"

namespace bfpp {

enum class Optimizer { kSgd, kAdam };

struct TrainConfig {
  int epochs = 200;
  double lr = 1e-4;
  int k_steps = 100;  // discretized loss / sampler steps
  double sigma1 = 0.001;
  double beta1 = 1.0;
  bool joint_noise = true;
  int mc_samples = 1;
  uint64_t seed = 0;
  int batch_size = 1;  // sequences per gradient step
  int dim = 16;
  int layers = 1;
  Optimizer optimizer = Optimizer::kSgd;
  FlowVariance flow_variance = FlowVariance::kStandard;
  int vlb_every = 0;  // 0 = never log the bound during training
};

struct ModelState {
  int num_marks = 0;
  EncoderParams encoder;
  PsiParams psi;
  CrossCovariance cross_cov;
  NormStats norm;
  TrainConfig cfg;  // echo of the training configuration

  ContinuousSchedule cont_schedule() const { return ContinuousSchedule{cfg.sigma1}; }
  DiscreteSchedule disc_schedule() const { return DiscreteSchedule{cfg.beta1}; }

  // c actually used when sampling/training; zero with joint noise disabled.
  std::vector<double> effective_c(bool joint_noise_on) const {
    if (!joint_noise_on) return std::vector<double>(num_marks, 0.0);
    return cross_cov.constrained();
  }

  static ModelState init(int num_marks, const NormStats& norm, const TrainConfig& cfg);
};

// Owns a tape with the model parameters as its leaf prefix. rewind to
// `after_params` between forward passes; refresh() re-copies values after an
// optimizer step. One runtime per thread.
struct ModelRuntime {
  const ModelState* model;
  ad::Tape tape;
  int32_t enc_base = 0;
  int32_t psi_base = 0;
  int32_t craw_base = 0;
  ad::Tape::Mark after_params{};

  explicit ModelRuntime(const ModelState& m);
  void refresh();

  nn::TapeParams enc_view() { return {&tape, enc_base}; }
  nn::TapeParams psi_view() { return {&tape, psi_base}; }
  ad::Vec craw_vec() { return {&tape, craw_base, model->num_marks}; }

  // Value-level prediction at (mu, theta, t | h); rewinds the tape around the call.
  PredictionOutput predict(double mu, std::span<const double> theta, double time,
                           std::span<const double> h);

  // Embeddings for every prefix of the sequence, as values.
  std::vector<std::vector<double>> encode_values(std::span<const TimedMark> events);
};

}  // namespace bfpp
