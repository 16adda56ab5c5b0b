#pragma once

#include <string>
#include <vector>

#include "bfpp/hawkes.hpp"
#include "bfpp/model.hpp"
#include "bfpp/sampling.hpp"

namespace bfpp {

// Flat key = value experiment configuration. Unknown keys are rejected with a
// nearest-key suggestion; ranges are validated per key.
struct Config {
  std::string dataset;
  int num_marks = 1;
  double train_frac = 0.8;
  double val_frac = 0.1;
  double test_frac = 0.1;
  int embed_dim = 16;
  int layers = 1;
  double sigma1 = 0.001;
  double beta1 = 1.0;
  int steps = 100;
  int epochs = 200;
  double lr = 1e-4;
  bool joint_noise = true;
  uint64_t seed = 0;
  std::vector<uint64_t> seeds;  // evaluation repeats; empty means {seed}
  int crps_samples = 100;
  std::string point = "median";
  std::string flow_variance = "standard";
  std::string out = "out";
  std::string optimizer = "sgd";
  int mc_samples = 1;
  int batch_size = 1;
  int threads = 1;
  int checkpoint_every = 0;
  int vlb_every = 0;
  int sample_draws = 10;
  std::vector<double> hawkes_base_rates{1.0};
  std::vector<double> hawkes_excitation{0.0};  // row-major M x M
  double hawkes_decay = 1.0;
  double hawkes_horizon = 10.0;
  std::vector<double> hawkes_coupling;  // empty = all 1.0
  int hawkes_sequences = 100;

  TrainConfig train_config() const;
  SampleConfig sample_config() const;
  HawkesSpec hawkes_spec() const;
  std::vector<uint64_t> eval_seeds() const { return seeds.empty() ? std::vector<uint64_t>{seed} : seeds; }

  // Advisory only: flags embed_dim / layers outside the usual sweep grids.
  std::vector<std::string> warnings() const;
};

Config parse_config(const std::string& path);
Config parse_config_text(const std::string& text, const std::string& origin);

// Canonical key = value rendering of every field, in schema order.
std::string config_echo(const Config& c);

std::string print_schema();

}  // namespace bfpp
