#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "bfpp/rng.hpp"
#include "bfpp/tape.hpp"

namespace bfpp::nn {

// View of a flat parameter vector living as tape leaves starting at `base`.
struct TapeParams {
  ad::Tape* tape = nullptr;
  int32_t base = 0;
  ad::Vec slice(int off, int n) const { return ad::Vec{tape, base + off, n}; }
  ad::Var at(int off) const { return ad::Var{tape, base + off}; }
};

// y = W x (+ b), W row-major (rows x cols) as a contiguous leaf run.
ad::Vec matvec(ad::Tape& t, ad::Vec w, int rows, int cols, ad::Vec x);
ad::Vec matvec(ad::Tape& t, ad::Vec w, int rows, int cols, ad::Vec x, ad::Vec bias);

ad::Vec add_vec(ad::Tape& t, ad::Vec a, ad::Vec b);
ad::Vec tanh_vec(ad::Tape& t, ad::Vec x);

// gain * (x - mean) / sqrt(var + 1e-5) + bias
ad::Vec layer_norm(ad::Tape& t, ad::Vec x, ad::Vec gain, ad::Vec bias);

std::vector<ad::Var> softmax_vars(ad::Tape& t, std::span<const ad::Var> x);
ad::Vec log_softmax_tape(ad::Tape& t, ad::Vec logits);

// Interleaved sin/cos features at dim/2 frequencies spaced geometrically
// from 1 to 1e4. At x = 0 the features alternate 0, 1, 0, 1, ...
std::vector<double> sinusoid_features(double x, int dim);

// Uniform Xavier fan-based init for a rows x cols block.
void xavier_init(std::span<double> w, int rows, int cols, Rng& rng);

}  // namespace bfpp::nn
