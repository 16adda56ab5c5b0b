#pragma once

#include <span>
#include <vector>

#include "bfpp/bfn_discrete.hpp"
#include "bfpp/linalg.hpp"
#include "bfpp/rng.hpp"
#include "bfpp/tape.hpp"

namespace bfpp {

// Smooth reparameterization c = sqrt(M) raw / sqrt(1 + ||raw||^2):
// ||c||^2 < M strictly for every finite raw, monotone in ||raw||.
std::vector<double> constrain_c(std::span<const double> raw);

// Trainable cross-covariance between the interval noise and the mark noise.
struct CrossCovariance {
  std::vector<double> raw;  // unconstrained, length M

  CrossCovariance() = default;
  explicit CrossCovariance(int num_marks) : raw(num_marks, 0.0) {}
  std::vector<double> constrained() const { return constrain_c(raw); }
};

// Joint sender covariance [[1/a_c, c_eff'], [c_eff, a_d M I]] with
// c_eff = c sqrt(a_d / a_c). c parameterizes correlation (corr_j = c_j / sqrt(M)),
// so positive definiteness is equivalent to c'c < M at every accuracy pair,
// and with a_c == a_d == a the matrix is exactly [[1/a, c'], [c, a M I]].
struct JointCovariance {
  double alpha_cont = 1.0;
  double alpha_disc = 1.0;
  int num_marks = 1;
  SymmetricMatrix sigma;
  LowerTriangularFactor factor;

  JointCovariance(int m) : sigma(m + 1), factor(m + 1) {}
  int dim() const { return num_marks + 1; }
};

JointCovariance build_joint_cov(double alpha_cont, double alpha_disc, int num_marks,
                                std::span<const double> c);
inline JointCovariance build_joint_cov(double alpha, int num_marks, std::span<const double> c) {
  return build_joint_cov(alpha, alpha, num_marks, c);
}

// Mean of the joint sender for data (tau, m): (tau; a_d (M e_m - 1)).
std::vector<double> joint_sender_mean(double tau, int mark, const JointCovariance& cov);

struct JointSample {
  double y_tau = 0.0;
  std::vector<double> y_mark;
};

// One MVN draw through the Cholesky factor; marginals match the per-variable
// senders regardless of c.
JointSample joint_sender_sample(double tau, int mark, const JointCovariance& cov, Rng& rng);

// Log of the M-component Gaussian mixture sum_m p_out(m) N(y | (tau_hat; a_d(M e_m - 1)), Sigma),
// sharing the single Cholesky factor across components.
double joint_receiver_logpdf(std::span<const double> y, double tau_hat,
                             const CategoricalParams& p_out, const JointCovariance& cov);

// ---- tape-side counterparts used by the training loss ----

ad::Vec constrain_c_tape(ad::Tape& t, ad::Vec raw);

struct JointCovTape {
  double alpha_cont = 1.0;
  double alpha_disc = 1.0;
  int num_marks = 1;
  std::vector<ad::Var> chol;  // packed lower Cholesky factor, (M+1)(M+2)/2
};

JointCovTape build_joint_cov_tape(ad::Tape& t, double alpha_cont, double alpha_disc,
                                  int num_marks, ad::Vec c);

// y = mean + L z for fixed noise z: gradients flow into c through L.
std::vector<ad::Var> joint_reparam_sample_tape(ad::Tape& t, std::span<const double> mean,
                                               const JointCovTape& cov,
                                               std::span<const double> z);

// ln p of the sender at its own reparameterized draw: -(d/2) ln 2pi - sum ln L_ii - |z|^2/2.
ad::Var joint_sender_logpdf_tape(ad::Tape& t, const JointCovTape& cov, std::span<const double> z);

// Mixture log-density with tau_hat and log p_out on the tape.
ad::Var joint_receiver_logpdf_tape(ad::Tape& t, std::span<const ad::Var> y, ad::Var tau_hat,
                                   std::span<const ad::Var> log_p_out, const JointCovTape& cov);

}  // namespace bfpp
