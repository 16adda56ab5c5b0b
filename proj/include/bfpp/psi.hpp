#pragma once

#include <span>
#include <vector>

#include "bfpp/bfn_discrete.hpp"
#include "bfpp/nn.hpp"
#include "bfpp/tape.hpp"

namespace bfpp {

inline constexpr double kTMin = 1e-6;
inline constexpr double kTauClipBound = 1.0;  // estimates live in [-1, 1], normalized scale

// Output network: consumes [mu; theta; sinusoid(t); h] and produces the
// interval estimate (clipped) and mark logits through two residual
// feed-forward blocks of width 4x the input.
struct PsiParams {
  int num_marks = 0;
  int hist_dim = 0;  // D
  int in_dim = 0;    // 1 + M + D/2 + D
  int hidden = 0;    // 4 * in_dim
  std::vector<double> w;

  struct BlockOffsets {
    int w1, b1;  // hidden x in, hidden
    int w2, b2;  // in x hidden, in
  };
  BlockOffsets block[2];
  int off_tau_w = 0, off_tau_b = 0;      // in, 1
  int off_logit_w = 0, off_logit_b = 0;  // M x in, M

  static PsiParams layout(int num_marks, int hist_dim);  // offsets, zero weights
  static PsiParams init(int num_marks, int hist_dim, Rng& rng);
  size_t size() const { return w.size(); }
};

struct PredictionOutput {
  double tau_hat = 0.0;           // clipped to [-1, 1]; forced to 0 below t_min
  std::vector<double> p_out;      // softmax of logits, on the simplex
  std::vector<double> logits;
};

struct PsiOutTape {
  ad::Var tau_hat;
  ad::Vec log_p_out;
  ad::Vec logits;
  bool below_t_min = false;
};

// Tape forward; below t_min the estimate is the constant 0 while the mark
// head is still evaluated so the sampler stays total.
PsiOutTape output_prediction_tape(ad::Tape& t, const nn::TapeParams& view, const PsiParams& p,
                                  double mu, std::span<const double> theta, double time,
                                  ad::Vec h);

// Value-level forward on a scratch tape.
PredictionOutput output_prediction(const PsiParams& p, double mu, std::span<const double> theta,
                                   double time, std::span<const double> h);

}  // namespace bfpp
