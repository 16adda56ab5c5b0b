#include "bfpp/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "bfpp/training.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bfpp {

double mape(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) throw DimensionMismatch("mape: length mismatch");
  if (pred.empty()) throw EmptyData("mape: no values");
  double acc = 0.0;
  for (size_t i = 0; i < pred.size(); ++i) {
    if (!(truth[i] > 0.0)) throw NonPositiveInterval("mape: truth must be > 0");
    acc += std::abs(pred[i] - truth[i]) / truth[i];
  }
  return 100.0 * acc / static_cast<double>(pred.size());
}

double crps(std::span<const double> samples, double truth) {
  const size_t n = samples.size();
  if (n == 0) throw EmptyData("crps: no samples");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  double abs_err = 0.0;
  double pair_sum = 0.0;  // sum_{l,g} |s_l - s_g| = 2 sum_j (2j + 1 - n) s_j on sorted input
  for (size_t j = 0; j < n; ++j) {
    abs_err += std::abs(s[j] - truth);
    pair_sum += (2.0 * static_cast<double>(j) + 1.0 - static_cast<double>(n)) * s[j];
  }
  pair_sum *= 2.0;
  const double dn = static_cast<double>(n);
  return abs_err / dn - pair_sum / (2.0 * dn * dn);
}

double crps_direct(std::span<const double> samples, double truth) {
  const size_t n = samples.size();
  if (n == 0) throw EmptyData("crps_direct: no samples");
  double abs_err = 0.0;
  for (double s : samples) abs_err += std::abs(s - truth);
  double pair_sum = 0.0;
  for (double a : samples)
    for (double b : samples) pair_sum += std::abs(a - b);
  const double dn = static_cast<double>(n);
  return abs_err / dn - pair_sum / (2.0 * dn * dn);
}

double accuracy(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) throw DimensionMismatch("accuracy: length mismatch");
  if (pred.empty()) throw EmptyData("accuracy: no values");
  size_t hits = 0;
  for (size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

EvalReport aggregate_metrics(std::span<const PerEventEval> events) {
  if (events.empty()) throw EmptyData("aggregate_metrics: no events");
  std::vector<double> pred_t, true_t;
  std::vector<int> pred_m, true_m;
  double crps_acc = 0.0;
  for (const PerEventEval& e : events) {
    pred_t.push_back(e.tau_point);
    true_t.push_back(e.tau_true_raw);
    pred_m.push_back(e.mark_point);
    true_m.push_back(e.mark_true);
    crps_acc += crps(e.tau_draws_raw, e.tau_true_raw);
  }
  EvalReport r;
  r.mape = mape(pred_t, true_t);
  r.crps = crps_acc / static_cast<double>(events.size());
  r.acc = accuracy(pred_m, true_m);
  r.events = events.size();
  return r;
}

std::vector<PerEventEval> evaluate_events(const Dataset& test, const ModelState& model,
                                          const SampleConfig& cfg, int threads) {
  if (test.sequences.empty()) throw EmptyData("evaluate: empty test split");
  const int64_t n_seq = static_cast<int64_t>(test.sequences.size());
  std::vector<std::vector<PerEventEval>> per_seq(n_seq);
  const Rng base(cfg.seed, /*stream=*/0xe7a1);
#ifdef _OPENMP
#pragma omp parallel num_threads(std::max(threads, 1)) if (threads > 1)
#endif
  {
    ModelRuntime rt(model);
#ifdef _OPENMP
#pragma omp for schedule(dynamic)
#endif
    for (int64_t si = 0; si < n_seq; ++si) {
      const EventSequence& s = test.sequences[si];
      const IntervalizedSequence iv = intervalize(s);
      const std::vector<TimedMark> seq = to_timed_marks(iv, model.norm);
      const auto hs = rt.encode_values(seq);
      Rng srng = base.fork(content_hash(s));
      std::vector<PerEventEval>& out = per_seq[si];
      out.resize(seq.size());
      for (size_t i = 0; i < seq.size(); ++i) {
        Rng erng = srng.fork(i);
        const PointPrediction p = predict_point(rt, hs[i], cfg, erng);
        out[i].tau_true_raw = iv.intervals[i];
        out[i].mark_true = iv.marks[i];
        out[i].tau_point = p.tau_point;
        out[i].mark_point = p.mark_point;
        out[i].tau_draws_raw = p.tau_draws;
      }
    }
  }
  std::vector<PerEventEval> flat;
  for (auto& v : per_seq)
    for (auto& e : v) flat.push_back(std::move(e));
  return flat;
}

EvalReport evaluate(const Dataset& test, const ModelState& model, const SampleConfig& cfg,
                    int threads, bool with_vlb) {
  const std::vector<PerEventEval> events = evaluate_events(test, model, cfg, threads);
  EvalReport r = aggregate_metrics(events);
  if (with_vlb) {
    Rng vrng(cfg.seed, /*stream=*/0x7b1b);
    r.vlb = vlb(test, model, vrng, threads);
    r.has_vlb = true;
  }
  return r;
}

}  // namespace bfpp
