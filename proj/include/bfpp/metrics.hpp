#pragma once

#include <span>
#include <vector>

#include "bfpp/model.hpp"
#include "bfpp/sampling.hpp"

namespace bfpp {

struct EvalReport {
  double mape = 0.0;  // percent
  double crps = 0.0;  // raw time scale
  double acc = 0.0;
  double vlb = 0.0;  // nats per event
  bool has_vlb = false;
  size_t events = 0;
};

// 100 * mean(|pred - truth| / truth).
double mape(std::span<const double> pred, std::span<const double> truth);

// Sampling CRPS: (1/L) sum |s_l - truth| - (1/2L^2) sum_lg |s_l - s_g|,
// O(L log L) via sorted prefix sums.
double crps(std::span<const double> samples, double truth);
// Direct O(L^2) evaluation of the same formula (reference route).
double crps_direct(std::span<const double> samples, double truth);

double accuracy(std::span<const int> pred, std::span<const int> truth);

struct PerEventEval {
  double tau_true_raw = 0.0;
  int mark_true = 0;
  double tau_point = 0.0;
  int mark_point = 0;
  std::vector<double> tau_draws_raw;
};

// Pure aggregation of per-event predictions into the three metrics.
EvalReport aggregate_metrics(std::span<const PerEventEval> events);

// Full evaluation: encode each test prefix, draw cfg.num_samples times per
// event, aggregate. Per-event RNG streams are derived from sequence content,
// so the report is independent of sequence order and thread count.
EvalReport evaluate(const Dataset& test, const ModelState& model, const SampleConfig& cfg,
                    int threads = 1, bool with_vlb = true);

// The per-event predictions behind evaluate, for callers that need raw draws.
std::vector<PerEventEval> evaluate_events(const Dataset& test, const ModelState& model,
                                          const SampleConfig& cfg, int threads = 1);

}  // namespace bfpp
