#pragma once

#include <vector>

#include "bfpp/event_data.hpp"
#include "bfpp/rng.hpp"

namespace bfpp {

// Multivariate Hawkes process with exponential kernels and a single shared
// decay, plus an optional mark-conditional coupling: after an event of mark m,
// candidate inter-arrival draws are multiplied by coupling_scales[m]. With all
// scales at 1 this is a plain Hawkes process.
struct HawkesSpec {
  int num_marks = 1;
  std::vector<double> base_rates;          // per mark, > 0
  std::vector<std::vector<double>> excitation;  // M x M, >= 0
  double decay = 1.0;                      // > 0
  double horizon = 10.0;                   // > 0
  std::vector<double> coupling_scales;     // per mark, > 0; 1.0 = no coupling

  void validate() const;  // shapes, positivity, stationarity
};

// lambda_m(t) = base_rates[m] + sum_{j: x_j < t} excitation[m][m_j] exp(-decay(t - x_j)).
double intensity_at(const HawkesSpec& spec, const EventSequence& history, double t, int mark);

// Ogata thinning over [0, horizon]; the upper bound is refreshed at every
// candidate since the intensity is non-increasing between events. Redraws
// from the same stream until the sequence has at least 2 events.
EventSequence simulate(const HawkesSpec& spec, Rng& rng);

// Per-sequence forked streams; identical output for any thread count.
Dataset simulate_many(const HawkesSpec& spec, int num_sequences, const Rng& rng, int threads = 1);

}  // namespace bfpp
