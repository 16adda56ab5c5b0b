#pragma once

#include <optional>
#include <string>

#include "bfpp/config.hpp"

namespace bfpp {

// Command-line overrides applied on top of the parsed config file.
struct Overrides {
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
  std::optional<bool> joint_noise;
  std::optional<int> steps;
  std::optional<int> threads;
};

Config apply_overrides(Config c, const Overrides& o);

int cmd_train(const Config& c);
int cmd_evaluate(const Config& c, const std::string& checkpoint_path);
int cmd_sample(const Config& c, const std::string& checkpoint_path, int max_records);
int cmd_simulate(const Config& c);
int cmd_inspect_c(const Config& c, const std::string& checkpoint_path, int bins);

// Hash of a file's bytes (FNV-1a), hex-encoded; "missing" if unreadable.
std::string file_content_hash(const std::string& path);

}  // namespace bfpp
