// Compares the serial reference path against the OpenMP path on the two
// data-parallel kernels (dataset simulation, test-split evaluation) and
// checks that both produce identical results.

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "bfpp/hawkes.hpp"
#include "bfpp/metrics.hpp"
#include "bfpp/training.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace bfpp;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  int sequences = 400;
  int eval_sequences = 24;
  if (argc > 1) sequences = std::atoi(argv[1]);
  if (argc > 2) eval_sequences = std::atoi(argv[2]);
#ifdef _OPENMP
  const int max_threads = omp_get_max_threads();
#else
  const int max_threads = 1;
  std::cout << "built without OpenMP; both paths run serially\n";
#endif

  HawkesSpec spec;
  spec.num_marks = 2;
  spec.base_rates = {0.4, 0.4};
  spec.excitation = {{0.5, 0.05}, {0.05, 0.5}};
  spec.decay = 1.0;
  spec.horizon = 12.0;
  spec.coupling_scales = {0.5, 2.0};

  const Rng rng(7);
  auto t0 = std::chrono::steady_clock::now();
  const Dataset serial = simulate_many(spec, sequences, rng, 1);
  const double sim_serial = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  const Dataset parallel = simulate_many(spec, sequences, rng, max_threads);
  const double sim_parallel = seconds_since(t0);

  bool same = serial.sequences.size() == parallel.sequences.size();
  for (size_t i = 0; same && i < serial.sequences.size(); ++i) {
    const auto& a = serial.sequences[i].events;
    const auto& b = parallel.sequences[i].events;
    same = a.size() == b.size();
    for (size_t j = 0; same && j < a.size(); ++j)
      same = a[j].time == b[j].time && a[j].mark == b[j].mark;
  }
  std::cout << "simulate x" << sequences << ": serial " << sim_serial << "s, " << max_threads
            << " threads " << sim_parallel << "s, speedup " << sim_serial / sim_parallel
            << ", identical " << (same ? "yes" : "NO") << "\n";
  if (!same) return 1;

  // Tiny untrained model is enough to exercise the sampler kernel.
  TrainConfig tc;
  tc.epochs = 1;
  tc.dim = 8;
  tc.k_steps = 25;
  Dataset train_small;
  train_small.num_marks = 2;
  for (int i = 0; i < 8; ++i) train_small.sequences.push_back(serial.sequences[i]);
  const ModelState model = train(train_small, tc);

  Dataset test;
  test.num_marks = 2;
  for (int i = 0; i < eval_sequences; ++i)
    test.sequences.push_back(serial.sequences[8 + i]);

  SampleConfig sc;
  sc.k_steps = 25;
  sc.num_samples = 20;
  t0 = std::chrono::steady_clock::now();
  const EvalReport a = evaluate(test, model, sc, 1);
  const double eval_serial = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  const EvalReport b = evaluate(test, model, sc, max_threads);
  const double eval_parallel = seconds_since(t0);
  const bool eval_same = a.mape == b.mape && a.crps == b.crps && a.acc == b.acc && a.vlb == b.vlb;
  std::cout << "evaluate x" << test.sequences.size() << " sequences: serial " << eval_serial
            << "s, " << max_threads << " threads " << eval_parallel << "s, speedup "
            << eval_serial / eval_parallel << ", identical " << (eval_same ? "yes" : "NO")
            << "\n";
  return eval_same ? 0 : 1;
}
