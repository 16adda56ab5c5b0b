#include "bfpp/event_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

namespace bfpp {

void validate_sequence(const EventSequence& s, int num_marks) {
  if (s.events.size() < 2) throw ValidationError("sequence shorter than 2 events");
  double prev = -1.0;
  bool first = true;
  for (const MarkedEvent& e : s.events) {
    if (e.time < 0.0) throw ValidationError("negative event time");
    if (!first && !(e.time > prev)) throw ValidationError("event times not strictly increasing");
    if (first && !(e.time > 0.0)) throw ValidationError("first event time must be > 0");
    if (e.mark < 0 || e.mark >= num_marks)
      throw ValidationError("mark " + std::to_string(e.mark) + " outside [0," +
                            std::to_string(num_marks) + ")");
    prev = e.time;
    first = false;
  }
}

Dataset load_dataset(const std::string& path, int num_marks) {
  if (num_marks < 1) throw ValidationError("num_marks must be positive");
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset file: " + path);
  Dataset d;
  d.num_marks = num_marks;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("seq") || !j["seq"].is_array())
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected {\"seq\": [[time, mark], ...]}");
    EventSequence s;
    for (const auto& pair : j["seq"]) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
          !pair[1].is_number_integer())
        throw ParseError(path + ":" + std::to_string(lineno) + ": bad [time, mark] pair");
      s.events.push_back({pair[0].get<double>(), pair[1].get<int>()});
    }
    try {
      validate_sequence(s, num_marks);
    } catch (const ValidationError& e) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    d.sequences.push_back(std::move(s));
  }
  return d;
}

void save_dataset(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path);
  for (const EventSequence& s : d.sequences) {
    nlohmann::json arr = nlohmann::json::array();
    for (const MarkedEvent& e : s.events) arr.push_back({e.time, e.mark});
    out << nlohmann::json{{"seq", arr}}.dump() << "\n";
  }
}

IntervalizedSequence intervalize(const EventSequence& s) {
  IntervalizedSequence out;
  out.intervals.reserve(s.events.size());
  out.marks.reserve(s.events.size());
  double prev = 0.0;  // first interval is measured from the origin
  for (const MarkedEvent& e : s.events) {
    out.intervals.push_back(e.time - prev);
    out.marks.push_back(e.mark);
    prev = e.time;
  }
  return out;
}

NormStats fit_norm(const std::vector<IntervalizedSequence>& train) {
  double sum = 0.0;
  size_t n = 0;
  for (const auto& s : train)
    for (double tau : s.intervals) {
      if (!(tau > 0.0)) throw NonPositiveInterval("fit_norm: interval <= 0");
      sum += std::log(tau);
      ++n;
    }
  if (n == 0) throw EmptyData("fit_norm: no intervals");
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const auto& s : train)
    for (double tau : s.intervals) {
      const double d = std::log(tau) - mean;
      ss += d * d;
    }
  NormStats stats;
  stats.mean_log_tau = mean;
  stats.std_log_tau = std::max(std::sqrt(ss / static_cast<double>(n)), 1e-8);
  return stats;
}

double normalize(double tau, const NormStats& stats) {
  if (!(tau > 0.0)) throw NonPositiveInterval("normalize: tau must be > 0");
  return (std::log(tau) - stats.mean_log_tau) / stats.std_log_tau;
}

double denormalize(double z, const NormStats& stats) {
  return std::exp(stats.mean_log_tau + z * stats.std_log_tau);
}

uint64_t content_hash(const EventSequence& s) {
  uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](uint64_t bits) {
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xff;
      h *= 0x100000001b3ull;
    }
  };
  for (const MarkedEvent& e : s.events) {
    uint64_t tb;
    static_assert(sizeof(double) == sizeof(uint64_t));
    __builtin_memcpy(&tb, &e.time, sizeof(tb));
    mix(tb);
    mix(static_cast<uint64_t>(e.mark));
  }
  return h;
}

SplitResult split(const Dataset& d, double train_frac, double val_frac, double test_frac,
                  Rng& rng) {
  if (!(train_frac > 0.0) || !(val_frac > 0.0) || !(test_frac > 0.0) ||
      std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
    throw BadFractions("split fractions must be positive and sum to 1");
  const size_t n = d.sequences.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  for (size_t i = n; i > 1; --i) {
    const size_t j = rng.next_u64() % i;
    std::swap(order[i - 1], order[j]);
  }
  const size_t n_train = static_cast<size_t>(std::floor(train_frac * static_cast<double>(n)));
  const size_t n_val = static_cast<size_t>(std::floor(val_frac * static_cast<double>(n)));
  SplitResult out;
  out.train.num_marks = out.val.num_marks = out.test.num_marks = d.num_marks;
  out.train.split_tag = "train";
  out.val.split_tag = "val";
  out.test.split_tag = "test";
  for (size_t i = 0; i < n; ++i) {
    const EventSequence& s = d.sequences[order[i]];
    if (i < n_train)
      out.train.sequences.push_back(s);
    else if (i < n_train + n_val)
      out.val.sequences.push_back(s);
    else
      out.test.sequences.push_back(s);
  }
  return out;
}

}  // namespace bfpp
