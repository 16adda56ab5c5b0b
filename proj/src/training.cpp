#include "bfpp/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bfpp {

std::vector<TimedMark> to_timed_marks(const IntervalizedSequence& s, const NormStats& norm) {
  std::vector<TimedMark> out(s.intervals.size());
  for (size_t i = 0; i < s.intervals.size(); ++i)
    out[i] = {normalize(s.intervals[i], norm), s.marks[i]};
  return out;
}

ad::Var event_loss_term(ModelRuntime& rt, ad::Vec h, ad::Vec c, double tau_norm, int mark,
                        Rng& rng) {
  const ModelState& m = *rt.model;
  const int M = m.num_marks;
  const int K = m.cfg.k_steps;
  ad::Tape& t = rt.tape;

  const int k = 1 + static_cast<int>(rng.next_u64() % static_cast<uint64_t>(K));
  const double time = static_cast<double>(k - 1) / K;

  // Flow draws are inputs to the prediction, not differentiated through.
  const ContinuousParams flow_c =
      flow_sample_cont(tau_norm, time, m.cont_schedule(), rng, m.cfg.flow_variance);
  const CategoricalParams flow_d = flow_sample_disc(mark, time, m.disc_schedule(), M, rng);

  PsiOutTape pred =
      output_prediction_tape(t, rt.psi_view(), m.psi, flow_c.mu, flow_d.probs, time, h);

  const double alpha_c = alpha_step_cont(k, K, m.cfg.sigma1);
  const double alpha_d = alpha_step_disc(k, K, m.cfg.beta1);
  JointCovTape cov = build_joint_cov_tape(t, alpha_c, alpha_d, M, c);

  std::vector<double> mean(M + 1);
  mean[0] = tau_norm;
  for (int i = 0; i < M; ++i) mean[i + 1] = alpha_d * (M * (i == mark ? 1.0 : 0.0) - 1.0);

  std::vector<ad::Var> log_p(M);
  for (int i = 0; i < M; ++i) log_p[i] = pred.log_p_out[i];

  ad::Var acc = t.constant(0.0);
  std::vector<double> z(M + 1);
  for (int j = 0; j < m.cfg.mc_samples; ++j) {
    for (double& zi : z) zi = rng.normal();
    std::vector<ad::Var> y = joint_reparam_sample_tape(t, mean, cov, z);
    ad::Var ln_ps = joint_sender_logpdf_tape(t, cov, z);
    ad::Var ln_pr = joint_receiver_logpdf_tape(t, y, pred.tau_hat, log_p, cov);
    acc = acc + (ln_ps - ln_pr);
  }
  return acc * (static_cast<double>(K) / m.cfg.mc_samples);
}

double sequence_loss(ModelRuntime& rt, std::span<const TimedMark> events, Rng& rng,
                     bool run_backward) {
  ad::Tape& t = rt.tape;
  t.rewind(rt.after_params);
  std::vector<ad::Vec> hs = encode_history_tape(t, rt.enc_view(), rt.model->encoder, events);
  ad::Vec c = rt.model->cfg.joint_noise
                  ? constrain_c_tape(t, rt.craw_vec())
                  : t.constants(std::vector<double>(rt.model->num_marks, 0.0));
  ad::Var total = t.constant(0.0);
  for (size_t i = 0; i < events.size(); ++i) {
    ad::Var term = event_loss_term(rt, hs[i], c, events[i].tau_norm, events[i].mark, rng);
    total = total + term;
  }
  ad::Var loss = total * (1.0 / static_cast<double>(events.size()));
  if (run_backward) t.backward(loss);
  return loss.value();
}

double joint_kl_estimate(double tau_hat, const CategoricalParams& p_out, double tau_norm,
                         int mark, double alpha_cont, double alpha_disc,
                         std::span<const double> c, Rng& rng, int n_draws) {
  const int M = static_cast<int>(c.size());
  const JointCovariance cov = build_joint_cov(alpha_cont, alpha_disc, M, c);
  const std::vector<double> mean_s = joint_sender_mean(tau_norm, mark, cov);
  std::vector<double> y(M + 1);
  double acc = 0.0;
  for (int j = 0; j < n_draws; ++j) {
    const JointSample draw = joint_sender_sample(tau_norm, mark, cov, rng);
    y[0] = draw.y_tau;
    std::copy(draw.y_mark.begin(), draw.y_mark.end(), y.begin() + 1);
    const double ln_ps = log_mvn_pdf(y, mean_s, cov.factor);
    const double ln_pr = joint_receiver_logpdf(y, tau_hat, p_out, cov);
    acc += ln_ps - ln_pr;
  }
  return acc / n_draws;
}

namespace {

struct AdamState {
  std::vector<double> m, v;
  int t = 0;
};

void apply_step(std::vector<double>& w, std::span<const double> g, double lr, Optimizer opt,
                AdamState* adam) {
  if (opt == Optimizer::kSgd) {
    for (size_t i = 0; i < w.size(); ++i) w[i] -= lr * g[i];
    return;
  }
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  adam->t += 1;
  const double c1 = 1.0 - std::pow(b1, adam->t);
  const double c2 = 1.0 - std::pow(b2, adam->t);
  for (size_t i = 0; i < w.size(); ++i) {
    adam->m[i] = b1 * adam->m[i] + (1.0 - b1) * g[i];
    adam->v[i] = b2 * adam->v[i] + (1.0 - b2) * g[i] * g[i];
    w[i] -= lr * (adam->m[i] / c1) / (std::sqrt(adam->v[i] / c2) + eps);
  }
}

// Single-event contribution to the bound: K-step loss estimate plus the
// reconstruction terms at t = 1.
double event_bound(ModelRuntime& rt, std::span<const double> h, const TimedMark& ev, Rng& rng) {
  const ModelState& m = *rt.model;
  const int M = m.num_marks;
  const int K = m.cfg.k_steps;
  const std::vector<double> c = m.effective_c(m.cfg.joint_noise);

  const int k = 1 + static_cast<int>(rng.next_u64() % static_cast<uint64_t>(K));
  const double time = static_cast<double>(k - 1) / K;
  const ContinuousParams fc =
      flow_sample_cont(ev.tau_norm, time, m.cont_schedule(), rng, m.cfg.flow_variance);
  const CategoricalParams fd = flow_sample_disc(ev.mark, time, m.disc_schedule(), M, rng);
  const PredictionOutput pred = rt.predict(fc.mu, fd.probs, time, h);
  const double alpha_c = alpha_step_cont(k, K, m.cfg.sigma1);
  const double alpha_d = alpha_step_disc(k, K, m.cfg.beta1);
  CategoricalParams p_out;
  p_out.probs = pred.p_out;
  const double kl = joint_kl_estimate(pred.tau_hat, p_out, ev.tau_norm, ev.mark, alpha_c,
                                      alpha_d, c, rng, m.cfg.mc_samples) *
                    K;

  const ContinuousParams fc1 =
      flow_sample_cont(ev.tau_norm, 1.0, m.cont_schedule(), rng, m.cfg.flow_variance);
  const CategoricalParams fd1 = flow_sample_disc(ev.mark, 1.0, m.disc_schedule(), M, rng);
  const PredictionOutput pred1 = rt.predict(fc1.mu, fd1.probs, 1.0, h);
  const double var1 = m.cfg.sigma1 * m.cfg.sigma1;
  const double resid = ev.tau_norm - pred1.tau_hat;
  const double recon_time = 0.5 * (kLn2Pi + std::log(var1)) + resid * resid / (2.0 * var1);
  const double recon_mark = -std::log(std::max(pred1.p_out[ev.mark], 1e-300));
  return kl + recon_time + recon_mark;
}

}  // namespace

TrainStats train_model(ModelState& model, const std::vector<std::vector<TimedMark>>& sequences,
                       const EpochCallback& cb) {
  const TrainConfig& cfg = model.cfg;
  if (sequences.empty()) throw EmptyData("train: no sequences");
  TrainStats stats;
  ModelRuntime rt(model);
  Rng rng(cfg.seed, /*stream=*/0x7261);

  const size_t pe = model.encoder.w.size();
  const size_t pp = model.psi.w.size();
  const size_t pc = model.cross_cov.raw.size();
  std::vector<double> g_enc(pe), g_psi(pp), g_craw(pc);
  AdamState a_enc, a_psi, a_craw;
  if (cfg.optimizer == Optimizer::kAdam) {
    a_enc.m.assign(pe, 0.0);
    a_enc.v.assign(pe, 0.0);
    a_psi.m.assign(pp, 0.0);
    a_psi.v.assign(pp, 0.0);
    a_craw.m.assign(pc, 0.0);
    a_craw.v.assign(pc, 0.0);
  }

  std::vector<size_t> order(sequences.size());
  std::iota(order.begin(), order.end(), size_t{0});

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    for (size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.next_u64() % i]);

    double loss_sum = 0.0;
    size_t event_count = 0;
    size_t b = 0;
    while (b < order.size()) {
      const size_t b_end = std::min(b + static_cast<size_t>(cfg.batch_size), order.size());
      std::fill(g_enc.begin(), g_enc.end(), 0.0);
      std::fill(g_psi.begin(), g_psi.end(), 0.0);
      std::fill(g_craw.begin(), g_craw.end(), 0.0);
      const double inv_batch = 1.0 / static_cast<double>(b_end - b);
      for (size_t s = b; s < b_end; ++s) {
        const auto& seq = sequences[order[s]];
        const double loss = sequence_loss(rt, seq, rng, /*run_backward=*/true);
        if (!std::isfinite(loss))
          throw TrainingDiverged("epoch " + std::to_string(epoch) + ": non-finite loss");
        loss_sum += loss * static_cast<double>(seq.size());
        event_count += seq.size();
        stats.loss_terms += seq.size();
        for (size_t i = 0; i < pe; ++i)
          g_enc[i] += rt.tape.grad_at(rt.enc_base + static_cast<int32_t>(i)) * inv_batch;
        for (size_t i = 0; i < pp; ++i)
          g_psi[i] += rt.tape.grad_at(rt.psi_base + static_cast<int32_t>(i)) * inv_batch;
        if (cfg.joint_noise)
          for (size_t i = 0; i < pc; ++i)
            g_craw[i] += rt.tape.grad_at(rt.craw_base + static_cast<int32_t>(i)) * inv_batch;
      }
      apply_step(model.encoder.w, g_enc, cfg.lr, cfg.optimizer, &a_enc);
      apply_step(model.psi.w, g_psi, cfg.lr, cfg.optimizer, &a_psi);
      if (cfg.joint_noise) apply_step(model.cross_cov.raw, g_craw, cfg.lr, cfg.optimizer, &a_craw);
      rt.refresh();
      b = b_end;
    }

    EpochLog log;
    log.epoch = epoch;
    log.mean_loss = loss_sum / static_cast<double>(event_count);
    stats.epoch_losses.push_back(log.mean_loss);
    if (cfg.vlb_every > 0 && epoch % cfg.vlb_every == 0) {
      Rng vrng = rng.fork(0xb0);
      double acc = 0.0;
      size_t n = 0;
      ModelRuntime vrt(model);
      for (size_t si = 0; si < sequences.size(); ++si) {
        Rng srng = vrng.fork(si);
        const auto& seq = sequences[si];
        const auto hs = vrt.encode_values(seq);
        for (size_t i = 0; i < seq.size(); ++i) acc += event_bound(vrt, hs[i], seq[i], srng);
        n += seq.size();
      }
      log.vlb = acc / static_cast<double>(n);
      log.has_vlb = true;
    }
    log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cb) cb(log, model);
  }
  stats.final_rng_state = rng.state();
  return stats;
}

ModelState train(const Dataset& train_data, const TrainConfig& cfg, const EpochCallback& cb,
                 TrainStats* stats_out) {
  if (train_data.sequences.empty()) throw EmptyData("train: empty training split");
  std::vector<IntervalizedSequence> iv(train_data.sequences.size());
  for (size_t i = 0; i < train_data.sequences.size(); ++i)
    iv[i] = intervalize(train_data.sequences[i]);
  const NormStats norm = fit_norm(iv);
  ModelState model = ModelState::init(train_data.num_marks, norm, cfg);
  std::vector<std::vector<TimedMark>> seqs(iv.size());
  for (size_t i = 0; i < iv.size(); ++i) seqs[i] = to_timed_marks(iv[i], norm);
  TrainStats st = train_model(model, seqs, cb);
  if (stats_out) *stats_out = st;
  return model;
}

double vlb(const Dataset& data, const ModelState& model, Rng& rng, int threads) {
  if (data.sequences.empty()) throw EmptyData("vlb: no sequences");
  const int64_t n_seq = static_cast<int64_t>(data.sequences.size());
  std::vector<double> seq_sum(n_seq, 0.0);
  std::vector<size_t> seq_events(n_seq, 0);
#ifdef _OPENMP
#pragma omp parallel num_threads(std::max(threads, 1)) if (threads > 1)
#endif
  {
    ModelRuntime rt(model);
#ifdef _OPENMP
#pragma omp for schedule(dynamic)
#endif
    for (int64_t si = 0; si < n_seq; ++si) {
      Rng srng = rng.fork(content_hash(data.sequences[si]));
      const IntervalizedSequence iv = intervalize(data.sequences[si]);
      const std::vector<TimedMark> seq = to_timed_marks(iv, model.norm);
      const auto hs = rt.encode_values(seq);
      double acc = 0.0;
      for (size_t i = 0; i < seq.size(); ++i) acc += event_bound(rt, hs[i], seq[i], srng);
      seq_sum[si] = acc;
      seq_events[si] = seq.size();
    }
  }
  double total = 0.0;
  size_t count = 0;
  for (int64_t si = 0; si < n_seq; ++si) {
    total += seq_sum[si];
    count += seq_events[si];
  }
  return total / static_cast<double>(count);
}

}  // namespace bfpp
