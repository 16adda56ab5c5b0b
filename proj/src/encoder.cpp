#include "bfpp/encoder.hpp"

#include <cmath>

#include "bfpp/errors.hpp"

namespace bfpp {

EncoderParams EncoderParams::layout(int num_marks, int dim, int layers) {
  if (dim < 2 || dim % 2 != 0) throw ValidationError("encoder dim must be even and >= 2");
  if (layers < 1) throw ValidationError("encoder needs at least one layer");
  EncoderParams p;
  p.num_marks = num_marks;
  p.dim = dim;
  p.layers = layers;
  const int d = dim, h = 4 * dim, half = dim / 2;
  int off = 0;
  auto take = [&off](int n) {
    const int o = off;
    off += n;
    return o;
  };
  p.off_embed = take(num_marks * half);
  p.off_h0 = take(d);
  p.layer_off.resize(layers);
  for (auto& lo : p.layer_off) {
    lo.wq = take(d * d);
    lo.wk = take(d * d);
    lo.wv = take(d * d);
    lo.wo = take(d * d);
    lo.ln1_g = take(d);
    lo.ln1_b = take(d);
    lo.w1 = take(h * d);
    lo.b1 = take(h);
    lo.w2 = take(d * h);
    lo.b2 = take(d);
    lo.ln2_g = take(d);
    lo.ln2_b = take(d);
  }
  p.w.assign(off, 0.0);
  return p;
}

EncoderParams EncoderParams::init(int num_marks, int dim, int layers, Rng& rng) {
  EncoderParams p = layout(num_marks, dim, layers);
  const int d = dim, h = 4 * dim, half = dim / 2;
  nn::xavier_init(std::span(p.w).subspan(p.off_embed, num_marks * half), num_marks, half, rng);
  for (const auto& lo : p.layer_off) {
    nn::xavier_init(std::span(p.w).subspan(lo.wq, d * d), d, d, rng);
    nn::xavier_init(std::span(p.w).subspan(lo.wk, d * d), d, d, rng);
    nn::xavier_init(std::span(p.w).subspan(lo.wv, d * d), d, d, rng);
    nn::xavier_init(std::span(p.w).subspan(lo.wo, d * d), d, d, rng);
    nn::xavier_init(std::span(p.w).subspan(lo.w1, h * d), h, d, rng);
    nn::xavier_init(std::span(p.w).subspan(lo.w2, d * h), d, h, rng);
    for (int i = 0; i < d; ++i) {
      p.w[lo.ln1_g + i] = 1.0;
      p.w[lo.ln2_g + i] = 1.0;
    }
  }
  return p;
}

std::vector<double> embed_event(double tau_norm, int mark, const EncoderParams& p) {
  if (mark < 0 || mark >= p.num_marks) throw ValidationError("embed_event: mark out of range");
  const int half = p.dim / 2;
  std::vector<double> e = nn::sinusoid_features(tau_norm, half);
  e.insert(e.end(), p.w.begin() + p.off_embed + mark * half,
           p.w.begin() + p.off_embed + (mark + 1) * half);
  return e;
}

std::vector<ad::Vec> encode_history_tape(ad::Tape& t, const nn::TapeParams& view,
                                         const EncoderParams& p,
                                         std::span<const TimedMark> events) {
  const int n = static_cast<int>(events.size());
  const int d = p.dim, hdim = 4 * p.dim, half = p.dim / 2;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));

  std::vector<ad::Vec> x(n);
  for (int j = 0; j < n; ++j) {
    if (events[j].mark < 0 || events[j].mark >= p.num_marks)
      throw ValidationError("encode_history: mark out of range");
    const std::vector<double> tf = nn::sinusoid_features(events[j].tau_norm, half);
    ad::Vec time_part = t.constants(tf);
    ad::Vec mark_row = view.slice(p.off_embed + events[j].mark * half, half);
    std::vector<ad::Var> parts;
    parts.reserve(d);
    for (int i = 0; i < half; ++i) parts.push_back(time_part[i]);
    for (int i = 0; i < half; ++i) parts.push_back(mark_row[i]);
    x[j] = t.pack(parts);
  }

  for (int l = 0; l < p.layers; ++l) {
    const auto& lo = p.layer_off[l];
    std::vector<ad::Vec> q(n), k(n), v(n);
    for (int j = 0; j < n; ++j) {
      ad::Vec a = nn::layer_norm(t, x[j], view.slice(lo.ln1_g, d), view.slice(lo.ln1_b, d));
      q[j] = nn::matvec(t, view.slice(lo.wq, d * d), d, d, a);
      k[j] = nn::matvec(t, view.slice(lo.wk, d * d), d, d, a);
      v[j] = nn::matvec(t, view.slice(lo.wv, d * d), d, d, a);
    }
    for (int i = 0; i < n; ++i) {
      // causal: position i attends to 0..i only
      std::vector<ad::Var> scores(i + 1);
      for (int j = 0; j <= i; ++j) scores[j] = t.dot(q[i], k[j]) * inv_sqrt_d;
      std::vector<ad::Var> att = nn::softmax_vars(t, scores);
      std::vector<ad::Var> ctx_vars(d);
      std::vector<ad::Var> col(i + 1);
      for (int dd = 0; dd < d; ++dd) {
        for (int j = 0; j <= i; ++j) col[j] = v[j][dd];
        ctx_vars[dd] = t.dot_gather(att, col);
      }
      ad::Vec ctx = t.pack(ctx_vars);
      ad::Vec o = nn::matvec(t, view.slice(lo.wo, d * d), d, d, ctx);
      x[i] = nn::add_vec(t, x[i], o);
    }
    for (int i = 0; i < n; ++i) {
      ad::Vec f = nn::layer_norm(t, x[i], view.slice(lo.ln2_g, d), view.slice(lo.ln2_b, d));
      ad::Vec u = nn::matvec(t, view.slice(lo.w1, hdim * d), hdim, d, f, view.slice(lo.b1, hdim));
      ad::Vec a = nn::tanh_vec(t, u);
      ad::Vec r = nn::matvec(t, view.slice(lo.w2, d * hdim), d, hdim, a, view.slice(lo.b2, d));
      x[i] = nn::add_vec(t, x[i], r);
    }
  }

  std::vector<ad::Vec> out(n + 1);
  out[0] = view.slice(p.off_h0, d);
  for (int i = 0; i < n; ++i) out[i + 1] = x[i];
  return out;
}

std::vector<std::vector<double>> encode_history(const EncoderParams& p,
                                                std::span<const TimedMark> events) {
  ad::Tape t;
  nn::TapeParams view{&t, 0};
  t.leaves(p.w);
  std::vector<ad::Vec> hs = encode_history_tape(t, view, p, events);
  std::vector<std::vector<double>> out(hs.size());
  for (size_t i = 0; i < hs.size(); ++i) {
    out[i].resize(hs[i].n);
    for (int j = 0; j < hs[i].n; ++j) out[i][j] = hs[i][j].value();
  }
  return out;
}

}  // namespace bfpp
