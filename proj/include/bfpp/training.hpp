#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "bfpp/model.hpp"

namespace bfpp {

// Discretized K-step Monte Carlo estimate of the per-event KL between the
// joint sender and the mixture receiver, at a random step k ~ U{1..K}.
// Gradients flow through the prediction heads and, via the reparameterized
// joint draw, into the cross-covariance.
ad::Var event_loss_term(ModelRuntime& rt, ad::Vec h, ad::Vec c, double tau_norm, int mark,
                        Rng& rng);

// Mean event loss of one sequence on the runtime tape. When `run_backward`
// is set the adjoints for all parameter leaves are left on the tape.
double sequence_loss(ModelRuntime& rt, std::span<const TimedMark> events, Rng& rng,
                     bool run_backward);

// Plain (tape-free) MC estimate of the same KL given a fixed prediction;
// the independent route used by tests and the bound below.
double joint_kl_estimate(double tau_hat, const CategoricalParams& p_out, double tau_norm,
                         int mark, double alpha_cont, double alpha_disc,
                         std::span<const double> c, Rng& rng, int n_draws);

struct EpochLog {
  int epoch = 0;
  double mean_loss = 0.0;
  double vlb = 0.0;
  bool has_vlb = false;
  double seconds = 0.0;
};
using EpochCallback = std::function<void(const EpochLog&, const ModelState&)>;

struct TrainStats {
  size_t loss_terms = 0;
  std::vector<double> epoch_losses;
  std::array<uint64_t, 5> final_rng_state{};
};

// Optimizes model.encoder/model.psi (and cross_cov.raw when joint noise is on)
// over the already-normalized sequences; deterministic in model.cfg.seed.
TrainStats train_model(ModelState& model, const std::vector<std::vector<TimedMark>>& sequences,
                       const EpochCallback& cb = nullptr);

// fit_norm on the training split, init, normalize, optimize.
ModelState train(const Dataset& train_data, const TrainConfig& cfg,
                 const EpochCallback& cb = nullptr, TrainStats* stats_out = nullptr);

// Variational bound, nats per event: discretized K-step loss estimate plus the
// reconstruction terms at t = 1 (mark: -ln p_out(m); interval: Gaussian of
// width sigma1^2 at tau_norm).
double vlb(const Dataset& data, const ModelState& model, Rng& rng, int threads = 1);

std::vector<TimedMark> to_timed_marks(const IntervalizedSequence& s, const NormStats& norm);

}  // namespace bfpp
