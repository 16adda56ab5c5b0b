#include "bfpp/psi.hpp"

#include <cmath>

#include "bfpp/errors.hpp"

namespace bfpp {

PsiParams PsiParams::layout(int num_marks, int hist_dim) {
  if (hist_dim < 2 || hist_dim % 2 != 0) throw ValidationError("psi: hist_dim must be even");
  PsiParams p;
  p.num_marks = num_marks;
  p.hist_dim = hist_dim;
  p.in_dim = 1 + num_marks + hist_dim / 2 + hist_dim;
  p.hidden = 4 * p.in_dim;
  int off = 0;
  auto take = [&off](int n) {
    const int o = off;
    off += n;
    return o;
  };
  for (auto& b : p.block) {
    b.w1 = take(p.hidden * p.in_dim);
    b.b1 = take(p.hidden);
    b.w2 = take(p.in_dim * p.hidden);
    b.b2 = take(p.in_dim);
  }
  p.off_tau_w = take(p.in_dim);
  p.off_tau_b = take(1);
  p.off_logit_w = take(num_marks * p.in_dim);
  p.off_logit_b = take(num_marks);
  p.w.assign(off, 0.0);
  return p;
}

PsiParams PsiParams::init(int num_marks, int hist_dim, Rng& rng) {
  PsiParams p = layout(num_marks, hist_dim);
  for (auto& b : p.block) {
    nn::xavier_init(std::span(p.w).subspan(b.w1, p.hidden * p.in_dim), p.hidden, p.in_dim, rng);
    nn::xavier_init(std::span(p.w).subspan(b.w2, p.in_dim * p.hidden), p.in_dim, p.hidden, rng);
  }
  nn::xavier_init(std::span(p.w).subspan(p.off_tau_w, p.in_dim), 1, p.in_dim, rng);
  nn::xavier_init(std::span(p.w).subspan(p.off_logit_w, num_marks * p.in_dim), num_marks,
                  p.in_dim, rng);
  return p;
}

PsiOutTape output_prediction_tape(ad::Tape& t, const nn::TapeParams& view, const PsiParams& p,
                                  double mu, std::span<const double> theta, double time,
                                  ad::Vec h) {
  if (static_cast<int>(theta.size()) != p.num_marks)
    throw DimensionMismatch("output_prediction: theta length != M");
  if (h.n != p.hist_dim) throw DimensionMismatch("output_prediction: h length != D");

  std::vector<double> consts;
  consts.reserve(1 + p.num_marks + p.hist_dim / 2);
  consts.push_back(mu);
  consts.insert(consts.end(), theta.begin(), theta.end());
  const std::vector<double> tf = nn::sinusoid_features(time, p.hist_dim / 2);
  consts.insert(consts.end(), tf.begin(), tf.end());

  std::vector<ad::Var> in_vars;
  in_vars.reserve(p.in_dim);
  ad::Vec cpart = t.constants(consts);
  for (int i = 0; i < cpart.n; ++i) in_vars.push_back(cpart[i]);
  for (int i = 0; i < h.n; ++i) in_vars.push_back(h[i]);
  ad::Vec x = t.pack(in_vars);

  for (const auto& b : p.block) {
    ad::Vec u = nn::matvec(t, view.slice(b.w1, p.hidden * p.in_dim), p.hidden, p.in_dim, x,
                           view.slice(b.b1, p.hidden));
    ad::Vec a = nn::tanh_vec(t, u);
    ad::Vec r = nn::matvec(t, view.slice(b.w2, p.in_dim * p.hidden), p.in_dim, p.hidden, a,
                           view.slice(b.b2, p.in_dim));
    x = nn::add_vec(t, x, r);
  }

  PsiOutTape out;
  out.logits = nn::matvec(t, view.slice(p.off_logit_w, p.num_marks * p.in_dim), p.num_marks,
                          p.in_dim, x, view.slice(p.off_logit_b, p.num_marks));
  out.log_p_out = nn::log_softmax_tape(t, out.logits);
  out.below_t_min = time < kTMin;
  if (out.below_t_min) {
    out.tau_hat = t.constant(0.0);
  } else {
    ad::Var raw = t.dot(view.slice(p.off_tau_w, p.in_dim), x) + view.at(p.off_tau_b);
    out.tau_hat = t.clip_abs(raw, kTauClipBound);
  }
  return out;
}

PredictionOutput output_prediction(const PsiParams& p, double mu, std::span<const double> theta,
                                   double time, std::span<const double> h) {
  ad::Tape t;
  nn::TapeParams view{&t, 0};
  t.leaves(p.w);
  ad::Vec hv = t.constants(h);
  PsiOutTape res = output_prediction_tape(t, view, p, mu, theta, time, hv);
  PredictionOutput out;
  out.tau_hat = res.tau_hat.value();
  out.logits.resize(p.num_marks);
  out.p_out.resize(p.num_marks);
  for (int i = 0; i < p.num_marks; ++i) {
    out.logits[i] = res.logits[i].value();
    out.p_out[i] = std::exp(res.log_p_out[i].value());
  }
  return out;
}

}  // namespace bfpp
