#pragma once

#include <string>
#include <vector>

#include "bfpp/errors.hpp"
#include "bfpp/rng.hpp"

namespace bfpp {

struct MarkedEvent {
  double time = 0.0;  // nonnegative, dataset time units
  int mark = 0;       // 0-based, < num_marks
};

struct EventSequence {
  std::vector<MarkedEvent> events;  // strictly increasing times, length >= 2
};

struct IntervalizedSequence {
  std::vector<double> intervals;  // tau_i = x_i - x_{i-1}, with x_0 := 0
  std::vector<int> marks;
};

// Log-interval standardization, fit on the training split only.
struct NormStats {
  double mean_log_tau = 0.0;
  double std_log_tau = 1.0;  // floored at 1e-8
};

struct Dataset {
  std::vector<EventSequence> sequences;
  int num_marks = 0;
  std::string split_tag;
};

void validate_sequence(const EventSequence& s, int num_marks);

// Newline-delimited records, each {"seq": [[time, mark], ...]}.
Dataset load_dataset(const std::string& path, int num_marks);
void save_dataset(const Dataset& d, const std::string& path);

IntervalizedSequence intervalize(const EventSequence& s);

NormStats fit_norm(const std::vector<IntervalizedSequence>& train);
double normalize(double tau, const NormStats& stats);
double denormalize(double z, const NormStats& stats);

struct SplitResult {
  Dataset train, val, test;
};
SplitResult split(const Dataset& d, double train_frac, double val_frac, double test_frac,
                  Rng& rng);

// FNV-1a over the event bytes; used to derive per-sequence RNG streams that do
// not depend on position within the dataset.
uint64_t content_hash(const EventSequence& s);

}  // namespace bfpp
