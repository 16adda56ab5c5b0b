#pragma once

#include <array>
#include <string>

#include "bfpp/model.hpp"

namespace bfpp {

// Single self-describing binary container: magic, version, then named
// little-endian tensors with shape headers. Round-trips bit-exactly.
void save_checkpoint(const std::string& path, const ModelState& model,
                     const std::array<uint64_t, 5>& rng_state, const std::string& config_text);

struct LoadedCheckpoint {
  ModelState model;
  std::array<uint64_t, 5> rng_state{};
  std::string config_text;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace bfpp
