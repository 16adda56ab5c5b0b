#pragma once

#include <span>
#include <vector>

#include "bfpp/nn.hpp"
#include "bfpp/rng.hpp"
#include "bfpp/tape.hpp"

namespace bfpp {

// (normalized interval, mark) pair consumed by the history encoder.
struct TimedMark {
  double tau_norm = 0.0;
  int mark = 0;
};

// Causal self-attention history encoder. An event is lifted to
// [sinusoid(tau_norm); E_mark] (each half of dim D), then L pre-norm
// attention blocks run under a causal mask; position i's output encodes
// events 0..i. The empty history maps to the learned vector h0.
struct EncoderParams {
  int num_marks = 0;
  int dim = 0;  // D, even; time and mark halves are D/2 each
  int layers = 1;
  std::vector<double> w;

  struct LayerOffsets {
    int wq, wk, wv, wo;      // D x D
    int ln1_g, ln1_b;        // D
    int w1, b1;              // 4D x D, 4D
    int w2, b2;              // D x 4D, D
    int ln2_g, ln2_b;        // D
  };
  int off_embed = 0;  // M x D/2 mark embedding
  int off_h0 = 0;     // D
  std::vector<LayerOffsets> layer_off;

  static EncoderParams layout(int num_marks, int dim, int layers);  // offsets, zero weights
  static EncoderParams init(int num_marks, int dim, int layers, Rng& rng);
  size_t size() const { return w.size(); }
};

// Event lifting on plain values (the tape path inlines the same layout).
std::vector<double> embed_event(double tau_norm, int mark, const EncoderParams& p);

// Returns n+1 embeddings: out[i] is a function of events[0..i-1] only;
// out[0] is h0. `view.base` must point at the leaf run holding p.w.
std::vector<ad::Vec> encode_history_tape(ad::Tape& t, const nn::TapeParams& view,
                                         const EncoderParams& p,
                                         std::span<const TimedMark> events);

// Value-level convenience: runs the tape forward and copies the embeddings out.
std::vector<std::vector<double>> encode_history(const EncoderParams& p,
                                                std::span<const TimedMark> events);

}  // namespace bfpp
