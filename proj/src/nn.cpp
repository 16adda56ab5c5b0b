#include "bfpp/nn.hpp"

#include <algorithm>

namespace bfpp::nn {

ad::Vec matvec(ad::Tape& t, ad::Vec w, int rows, int cols, ad::Vec x) {
  ad::Vec out{&t, 0, rows};
  for (int i = 0; i < rows; ++i) {
    ad::Var d = t.dot(ad::Vec{&t, w.first + i * cols, cols}, x);
    if (i == 0) out.first = d.idx;
  }
  return out;
}

ad::Vec matvec(ad::Tape& t, ad::Vec w, int rows, int cols, ad::Vec x, ad::Vec bias) {
  ad::Vec pre = matvec(t, w, rows, cols, x);
  return add_vec(t, pre, bias);
}

ad::Vec add_vec(ad::Tape& t, ad::Vec a, ad::Vec b) {
  ad::Vec out{&t, 0, a.n};
  for (int i = 0; i < a.n; ++i) {
    ad::Var s = t.add(a[i], b[i]);
    if (i == 0) out.first = s.idx;
  }
  return out;
}

ad::Vec tanh_vec(ad::Tape& t, ad::Vec x) {
  ad::Vec out{&t, 0, x.n};
  for (int i = 0; i < x.n; ++i) {
    ad::Var y = t.tanh_(x[i]);
    if (i == 0) out.first = y.idx;
  }
  return out;
}

ad::Vec layer_norm(ad::Tape& t, ad::Vec x, ad::Vec gain, ad::Vec bias) {
  const int n = x.n;
  ad::Var mean = t.sum(x) * (1.0 / n);
  ad::Vec centered{&t, 0, n};
  for (int i = 0; i < n; ++i) {
    ad::Var d = t.sub(x[i], mean);
    if (i == 0) centered.first = d.idx;
  }
  ad::Var var = t.dot(centered, centered) * (1.0 / n);
  ad::Var inv = 1.0 / ad::sqrt(var + 1e-5);
  ad::Vec scaled{&t, 0, n};
  for (int i = 0; i < n; ++i) {
    ad::Var s = t.mul(centered[i], inv);
    if (i == 0) scaled.first = s.idx;
  }
  ad::Vec gained{&t, 0, n};
  for (int i = 0; i < n; ++i) {
    ad::Var g = t.mul(scaled[i], gain[i]);
    if (i == 0) gained.first = g.idx;
  }
  return add_vec(t, gained, bias);
}

std::vector<ad::Var> softmax_vars(ad::Tape& t, std::span<const ad::Var> x) {
  double mx = x[0].value();
  for (const ad::Var& v : x) mx = std::max(mx, v.value());
  std::vector<ad::Var> e(x.size());
  for (size_t i = 0; i < x.size(); ++i) e[i] = ad::exp(x[i] - mx);
  ad::Var s = e[0];
  for (size_t i = 1; i < e.size(); ++i) s = s + e[i];
  std::vector<ad::Var> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = e[i] / s;
  return out;
}

ad::Vec log_softmax_tape(ad::Tape& t, ad::Vec logits) {
  double mx = logits[0].value();
  for (int i = 0; i < logits.n; ++i) mx = std::max(mx, logits[i].value());
  std::vector<ad::Var> e(logits.n);
  for (int i = 0; i < logits.n; ++i) e[i] = ad::exp(logits[i] - mx);
  ad::Var s = e[0];
  for (size_t i = 1; i < e.size(); ++i) s = s + e[i];
  ad::Var lse = ad::log(s) + mx;
  ad::Vec out{&t, 0, logits.n};
  for (int i = 0; i < logits.n; ++i) {
    ad::Var d = t.sub(logits[i], lse);
    if (i == 0) out.first = d.idx;
  }
  return out;
}

std::vector<double> sinusoid_features(double x, int dim) {
  const int bands = dim / 2;
  std::vector<double> out(static_cast<size_t>(bands) * 2);
  for (int b = 0; b < bands; ++b) {
    const double freq = bands > 1 ? std::pow(10.0, 4.0 * b / (bands - 1)) : 1.0;
    out[2 * b] = std::sin(freq * x);
    out[2 * b + 1] = std::cos(freq * x);
  }
  return out;
}

void xavier_init(std::span<double> w, int rows, int cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / (rows + cols));
  for (double& x : w) x = (2.0 * rng.uniform() - 1.0) * bound;
}

}  // namespace bfpp::nn
