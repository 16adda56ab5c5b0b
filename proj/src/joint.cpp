#include "bfpp/joint.hpp"

#include <cmath>

namespace bfpp {

std::vector<double> constrain_c(std::span<const double> raw) {
  double sq = 0.0;
  for (double r : raw) sq += r * r;
  const double scale = std::sqrt(static_cast<double>(raw.size())) / std::sqrt(1.0 + sq);
  std::vector<double> c(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) c[i] = raw[i] * scale;
  return c;
}

namespace {

void check_constraint(std::span<const double> c, int num_marks) {
  double sq = 0.0;
  for (double x : c) sq += x * x;
  if (sq >= static_cast<double>(num_marks))
    throw ConstraintViolated("joint covariance: c'c = " + std::to_string(sq) +
                             " >= M = " + std::to_string(num_marks));
}

}  // namespace

JointCovariance build_joint_cov(double alpha_cont, double alpha_disc, int num_marks,
                                std::span<const double> c) {
  if (!(alpha_cont > 0.0) || !(alpha_disc > 0.0))
    throw NonPositiveAccuracy("build_joint_cov: accuracies must be > 0");
  if (static_cast<int>(c.size()) != num_marks)
    throw DimensionMismatch("build_joint_cov: c must have length M");
  check_constraint(c, num_marks);
  JointCovariance cov(num_marks);
  cov.alpha_cont = alpha_cont;
  cov.alpha_disc = alpha_disc;
  cov.num_marks = num_marks;
  const double eff = std::sqrt(alpha_disc / alpha_cont);
  cov.sigma.set(0, 0, 1.0 / alpha_cont);
  for (int i = 0; i < num_marks; ++i) {
    cov.sigma.set(i + 1, 0, c[i] * eff);
    cov.sigma.set(i + 1, i + 1, alpha_disc * num_marks);
  }
  cov.factor = cholesky(cov.sigma);
  return cov;
}

std::vector<double> joint_sender_mean(double tau, int mark, const JointCovariance& cov) {
  std::vector<double> mean(cov.dim(), 0.0);
  mean[0] = tau;
  for (int i = 0; i < cov.num_marks; ++i)
    mean[i + 1] = cov.alpha_disc * (cov.num_marks * (i == mark ? 1.0 : 0.0) - 1.0);
  return mean;
}

JointSample joint_sender_sample(double tau, int mark, const JointCovariance& cov, Rng& rng) {
  if (mark < 0 || mark >= cov.num_marks)
    throw ValidationError("joint_sender_sample: mark out of range");
  const std::vector<double> mean = joint_sender_mean(tau, mark, cov);
  const std::vector<double> draw = sample_mvn(rng, mean, cov.factor);
  JointSample out;
  out.y_tau = draw[0];
  out.y_mark.assign(draw.begin() + 1, draw.end());
  return out;
}

double joint_receiver_logpdf(std::span<const double> y, double tau_hat,
                             const CategoricalParams& p_out, const JointCovariance& cov) {
  const int d = cov.dim();
  if (static_cast<int>(y.size()) != d)
    throw DimensionMismatch("joint_receiver_logpdf: y has wrong length");
  if (static_cast<int>(p_out.probs.size()) != cov.num_marks)
    throw DimensionMismatch("joint_receiver_logpdf: p_out has wrong length");
  std::vector<double> comp(cov.num_marks);
  std::vector<double> mean = joint_sender_mean(tau_hat, 0, cov);
  for (int m = 0; m < cov.num_marks; ++m) {
    for (int i = 0; i < cov.num_marks; ++i)
      mean[i + 1] = cov.alpha_disc * (cov.num_marks * (i == m ? 1.0 : 0.0) - 1.0);
    comp[m] = std::log(p_out.probs[m]) + log_mvn_pdf(y, mean, cov.factor);
  }
  return logsumexp(comp);
}

// ---- tape side ----

ad::Vec constrain_c_tape(ad::Tape& t, ad::Vec raw) {
  ad::Var sq = t.dot(raw, raw);
  ad::Var scale = std::sqrt(static_cast<double>(raw.n)) / ad::sqrt(sq + 1.0);
  std::vector<ad::Var> out;
  out.reserve(raw.n);
  for (int i = 0; i < raw.n; ++i) out.push_back(raw[i] * scale);
  return t.pack(out);
}

JointCovTape build_joint_cov_tape(ad::Tape& t, double alpha_cont, double alpha_disc,
                                  int num_marks, ad::Vec c) {
  if (!(alpha_cont > 0.0) || !(alpha_disc > 0.0))
    throw NonPositiveAccuracy("build_joint_cov_tape: accuracies must be > 0");
  double sq = 0.0;
  for (int i = 0; i < c.n; ++i) sq += c[i].value() * c[i].value();
  if (sq >= static_cast<double>(num_marks))
    throw ConstraintViolated("joint covariance (tape): c'c >= M");
  JointCovTape cov;
  cov.alpha_cont = alpha_cont;
  cov.alpha_disc = alpha_disc;
  cov.num_marks = num_marks;
  const int d = num_marks + 1;
  const double eff = std::sqrt(alpha_disc / alpha_cont);
  std::vector<ad::Var> packed(static_cast<size_t>(d) * (d + 1) / 2);
  packed[packed_index(0, 0)] = t.constant(1.0 / alpha_cont);
  for (int i = 1; i < d; ++i) {
    packed[packed_index(i, 0)] = c[i - 1] * eff;
    for (int j = 1; j < i; ++j) packed[packed_index(i, j)] = t.constant(0.0);
    packed[packed_index(i, i)] = t.constant(alpha_disc * num_marks);
  }
  cholesky_packed_inplace<ad::Var>(packed, d);
  cov.chol = std::move(packed);
  return cov;
}

std::vector<ad::Var> joint_reparam_sample_tape(ad::Tape& t, std::span<const double> mean,
                                               const JointCovTape& cov,
                                               std::span<const double> z) {
  const int d = cov.num_marks + 1;
  std::vector<ad::Var> y(d);
  for (int i = 0; i < d; ++i) {
    ad::Var acc = t.constant(mean[i]);
    for (int j = 0; j <= i; ++j) acc = acc + cov.chol[packed_index(i, j)] * z[j];
    y[i] = acc;
  }
  return y;
}

ad::Var joint_sender_logpdf_tape(ad::Tape& t, const JointCovTape& cov,
                                 std::span<const double> z) {
  const int d = cov.num_marks + 1;
  double zz = 0.0;
  for (double v : z) zz += v * v;
  ad::Var acc = t.constant(-0.5 * d * kLn2Pi - 0.5 * zz);
  for (int i = 0; i < d; ++i) acc = acc - ad::log(cov.chol[packed_index(i, i)]);
  return acc;
}

ad::Var joint_receiver_logpdf_tape(ad::Tape& t, std::span<const ad::Var> y, ad::Var tau_hat,
                                   std::span<const ad::Var> log_p_out, const JointCovTape& cov) {
  const int d = cov.num_marks + 1;
  ad::Var log_det = t.constant(0.0);
  for (int i = 0; i < d; ++i) log_det = log_det + ad::log(cov.chol[packed_index(i, i)]);
  std::vector<ad::Var> comp(cov.num_marks);
  std::vector<ad::Var> u(d);
  for (int m = 0; m < cov.num_marks; ++m) {
    u[0] = y[0] - tau_hat;
    for (int i = 0; i < cov.num_marks; ++i)
      u[i + 1] = y[i + 1] - cov.alpha_disc * (cov.num_marks * (i == m ? 1.0 : 0.0) - 1.0);
    forward_subst_packed<ad::Var>(cov.chol, u, d);
    ad::Var quad = t.constant(0.0);
    for (int i = 0; i < d; ++i) quad = quad + u[i] * u[i];
    comp[m] = log_p_out[m] + (-0.5 * d * kLn2Pi) - log_det - 0.5 * quad;
  }
  // log-sum-exp with the max value as a detached shift
  double mx = comp[0].value();
  for (const ad::Var& v : comp) mx = std::max(mx, v.value());
  ad::Var s = t.constant(0.0);
  for (const ad::Var& v : comp) s = s + ad::exp(v - mx);
  return ad::log(s) + mx;
}

}  // namespace bfpp
