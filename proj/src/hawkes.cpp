#include "bfpp/hawkes.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bfpp {

namespace {

// Spectral radius of the branching matrix excitation/decay via power iteration.
double branching_radius(const HawkesSpec& spec) {
  const int m = spec.num_marks;
  std::vector<double> v(m, 1.0), w(m);
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int j = 0; j < m; ++j) s += spec.excitation[i][j] * v[j];
      w[i] = s / spec.decay;
    }
    double norm = 0.0;
    for (double x : w) norm = std::max(norm, std::abs(x));
    if (norm == 0.0) return 0.0;
    for (int i = 0; i < m; ++i) v[i] = w[i] / norm;
    lambda = norm;
  }
  return lambda;
}

}  // namespace

void HawkesSpec::validate() const {
  if (num_marks < 1) throw ValidationError("hawkes: num_marks must be >= 1");
  if (static_cast<int>(base_rates.size()) != num_marks ||
      static_cast<int>(coupling_scales.size()) != num_marks ||
      static_cast<int>(excitation.size()) != num_marks)
    throw DimensionMismatch("hawkes: per-mark field sizes disagree with num_marks");
  for (const auto& row : excitation)
    if (static_cast<int>(row.size()) != num_marks)
      throw DimensionMismatch("hawkes: excitation must be M x M");
  for (double b : base_rates)
    if (!(b > 0.0)) throw ValidationError("hawkes: base rates must be > 0");
  for (double s : coupling_scales)
    if (!(s > 0.0)) throw ValidationError("hawkes: coupling scales must be > 0");
  for (const auto& row : excitation)
    for (double e : row)
      if (e < 0.0) throw ValidationError("hawkes: excitation entries must be >= 0");
  if (!(decay > 0.0)) throw ValidationError("hawkes: decay must be > 0");
  if (!(horizon > 0.0)) throw ValidationError("hawkes: horizon must be > 0");
  const double rho = branching_radius(*this);
  if (rho >= 1.0)
    throw ValidationError("hawkes: spectral radius of excitation/decay is " +
                          std::to_string(rho) + " (>= 1, non-stationary)");
}

double intensity_at(const HawkesSpec& spec, const EventSequence& history, double t, int mark) {
  double s = spec.base_rates[mark];
  for (const MarkedEvent& e : history.events) {
    if (e.time >= t) break;
    s += spec.excitation[mark][e.mark] * std::exp(-spec.decay * (t - e.time));
  }
  return s;
}

EventSequence simulate(const HawkesSpec& spec, Rng& rng) {
  const int m = spec.num_marks;
  for (;;) {
    EventSequence seq;
    // Per-mark excitation state s_m = sum_j exc[m][m_j] exp(-decay (t - x_j)),
    // advanced in closed form between candidates.
    std::vector<double> excite(m, 0.0);
    std::vector<double> lam(m);
    double t = 0.0;
    double scale = 1.0;  // coupling multiplier from the most recent event's mark
    while (true) {
      double total = 0.0;
      for (int i = 0; i < m; ++i) total += spec.base_rates[i] + excite[i];
      const double delta = -std::log(rng.uniform()) / total * scale;
      const double cand = t + delta;
      if (cand > spec.horizon) break;
      const double fade = std::exp(-spec.decay * (cand - t));
      for (int i = 0; i < m; ++i) excite[i] *= fade;
      double cand_total = 0.0;
      for (int i = 0; i < m; ++i) {
        lam[i] = spec.base_rates[i] + excite[i];
        cand_total += lam[i];
      }
      if (rng.uniform() * total <= cand_total) {
        const int mark = sample_categorical(rng, lam);
        seq.events.push_back({cand, mark});
        for (int i = 0; i < m; ++i) excite[i] += spec.excitation[i][mark];
        scale = spec.coupling_scales[mark];
      }
      t = cand;
    }
    if (seq.events.size() >= 2) return seq;
  }
}

Dataset simulate_many(const HawkesSpec& spec, int num_sequences, const Rng& rng, int threads) {
  spec.validate();
  Dataset d;
  d.num_marks = spec.num_marks;
  d.sequences.resize(num_sequences);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(std::max(threads, 1)) if (threads > 1)
#endif
  for (int i = 0; i < num_sequences; ++i) {
    Rng local = rng.fork(static_cast<uint64_t>(i));
    d.sequences[i] = simulate(spec, local);
  }
  return d;
}

}  // namespace bfpp
