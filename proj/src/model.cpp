#include "bfpp/model.hpp"

namespace bfpp {

ModelState ModelState::init(int num_marks, const NormStats& norm, const TrainConfig& cfg) {
  ModelState m{.num_marks = num_marks,
               .encoder = {},
               .psi = {},
               .cross_cov = CrossCovariance(num_marks),
               .norm = norm,
               .cfg = cfg};
  Rng rng(cfg.seed, /*stream=*/0x1715);
  m.encoder = EncoderParams::init(num_marks, cfg.dim, cfg.layers, rng);
  m.psi = PsiParams::init(num_marks, cfg.dim, rng);
  return m;  // cross_cov.raw starts at zero: independence
}

ModelRuntime::ModelRuntime(const ModelState& m) : model(&m) {
  enc_base = tape.leaves(m.encoder.w).first;
  psi_base = tape.leaves(m.psi.w).first;
  craw_base = tape.leaves(m.cross_cov.raw).first;
  after_params = tape.mark();
}

void ModelRuntime::refresh() {
  tape.rewind(after_params);
  for (size_t i = 0; i < model->encoder.w.size(); ++i)
    tape.set_value(enc_base + static_cast<int32_t>(i), model->encoder.w[i]);
  for (size_t i = 0; i < model->psi.w.size(); ++i)
    tape.set_value(psi_base + static_cast<int32_t>(i), model->psi.w[i]);
  for (size_t i = 0; i < model->cross_cov.raw.size(); ++i)
    tape.set_value(craw_base + static_cast<int32_t>(i), model->cross_cov.raw[i]);
}

PredictionOutput ModelRuntime::predict(double mu, std::span<const double> theta, double time,
                                       std::span<const double> h) {
  const ad::Tape::Mark entry = tape.mark();
  ad::Vec hv = tape.constants(h);
  PsiOutTape res = output_prediction_tape(tape, psi_view(), model->psi, mu, theta, time, hv);
  PredictionOutput out;
  out.tau_hat = res.tau_hat.value();
  out.logits.resize(model->num_marks);
  out.p_out.resize(model->num_marks);
  for (int i = 0; i < model->num_marks; ++i) {
    out.logits[i] = res.logits[i].value();
    out.p_out[i] = std::exp(res.log_p_out[i].value());
  }
  tape.rewind(entry);
  return out;
}

std::vector<std::vector<double>> ModelRuntime::encode_values(std::span<const TimedMark> events) {
  const ad::Tape::Mark entry = tape.mark();
  std::vector<ad::Vec> hs = encode_history_tape(tape, enc_view(), model->encoder, events);
  std::vector<std::vector<double>> out(hs.size());
  for (size_t i = 0; i < hs.size(); ++i) {
    out[i].resize(hs[i].n);
    for (int j = 0; j < hs[i].n; ++j) out[i][j] = hs[i][j].value();
  }
  tape.rewind(entry);
  return out;
}

}  // namespace bfpp
