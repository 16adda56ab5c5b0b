#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "bfpp/event_data.hpp"

using namespace bfpp;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    path = "bfpp_test_" + std::to_string(reinterpret_cast<uintptr_t>(this)) + ".jsonl";
    std::ofstream(path) << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("load_dataset accepts a minimal record") {
  TempFile f("{\"seq\": [[0.5, 0], [1.2, 2]]}\n");
  const Dataset d = load_dataset(f.path, 3);
  REQUIRE(d.sequences.size() == 1);
  REQUIRE(d.sequences[0].events.size() == 2);
  CHECK(d.sequences[0].events[0].time == 0.5);
  CHECK(d.sequences[0].events[1].mark == 2);
}

TEST_CASE("load_dataset rejects non-strict ordering") {
  TempFile f("{\"seq\": [[1.0, 0], [1.0, 1]]}\n");
  CHECK_THROWS_AS(load_dataset(f.path, 2), ValidationError);
}

TEST_CASE("load_dataset rejects out-of-range marks") {
  TempFile f("{\"seq\": [[0.5, 0], [1.2, 3]]}\n");
  CHECK_THROWS_AS(load_dataset(f.path, 3), ValidationError);
}

TEST_CASE("load_dataset rejects malformed lines") {
  TempFile f("{\"seq\": [[0.5, 0], [1.2]]}\n");
  CHECK_THROWS_AS(load_dataset(f.path, 3), ParseError);
  TempFile g("not json\n");
  CHECK_THROWS_AS(load_dataset(g.path, 3), ParseError);
}

TEST_CASE("load_dataset sequence count matches line count") {
  TempFile f(
      "{\"seq\": [[0.5, 0], [1.2, 0]]}\n"
      "{\"seq\": [[1.0, 1], [2.0, 0]]}\n"
      "{\"seq\": [[0.1, 0], [0.2, 1], [0.3, 0]]}\n");
  const Dataset d = load_dataset(f.path, 2);
  CHECK(d.sequences.size() == 3);
}

TEST_CASE("save/load round trip") {
  Dataset d;
  d.num_marks = 2;
  d.sequences.push_back({{{0.25, 1}, {1.75, 0}}});
  d.sequences.push_back({{{0.5, 0}, {0.75, 1}, {3.0, 1}}});
  TempFile f("");
  save_dataset(d, f.path);
  const Dataset back = load_dataset(f.path, 2);
  REQUIRE(back.sequences.size() == d.sequences.size());
  for (size_t i = 0; i < d.sequences.size(); ++i) {
    REQUIRE(back.sequences[i].events.size() == d.sequences[i].events.size());
    for (size_t j = 0; j < d.sequences[i].events.size(); ++j) {
      CHECK(back.sequences[i].events[j].time == d.sequences[i].events[j].time);
      CHECK(back.sequences[i].events[j].mark == d.sequences[i].events[j].mark);
    }
  }
}

TEST_CASE("intervalize hand case and first-interval convention") {
  EventSequence s{{{1.0, 0}, {3.0, 1}, {6.0, 0}}};
  const IntervalizedSequence iv = intervalize(s);
  CHECK(iv.intervals == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(iv.marks == std::vector<int>{0, 1, 0});
}

TEST_CASE("intervalize round-trips through cumulative sums") {
  Rng rng(13);
  for (int rep = 0; rep < 100; ++rep) {
    EventSequence s;
    double t = 0.0;
    const int n = 2 + static_cast<int>(rng.next_u64() % 20);
    for (int i = 0; i < n; ++i) {
      t += -std::log(rng.uniform());
      s.events.push_back({t, 0});
    }
    const IntervalizedSequence iv = intervalize(s);
    double acc = 0.0;
    for (size_t i = 0; i < iv.intervals.size(); ++i) {
      acc += iv.intervals[i];
      REQUIRE(std::abs(acc - s.events[i].time) < 1e-12);
    }
  }
}

TEST_CASE("fit_norm floors the spread on constant intervals") {
  IntervalizedSequence s;
  s.intervals = {std::exp(1.0), std::exp(1.0), std::exp(1.0)};
  s.marks = {0, 0, 0};
  const NormStats stats = fit_norm({s});
  CHECK(stats.mean_log_tau == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(stats.std_log_tau == 1e-8);
}

TEST_CASE("fit_norm two-point hand computation") {
  IntervalizedSequence s;
  s.intervals = {1.0, std::exp(2.0)};
  s.marks = {0, 0};
  const NormStats stats = fit_norm({s});
  CHECK(stats.mean_log_tau == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(stats.std_log_tau == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("fit_norm errors") {
  CHECK_THROWS_AS(fit_norm({}), EmptyData);
  IntervalizedSequence bad;
  bad.intervals = {1.0, 0.0};
  bad.marks = {0, 0};
  CHECK_THROWS_AS(fit_norm({bad}), NonPositiveInterval);
}

TEST_CASE("normalize centered point and inverse round trip") {
  const NormStats stats{0.0, 1.0};
  CHECK(normalize(1.0, stats) == 0.0);
  CHECK_THROWS_AS(normalize(0.0, stats), NonPositiveInterval);

  const NormStats fitted{0.7, 2.3};
  Rng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const double tau = std::exp((rng.uniform() * 2.0 - 1.0) * std::log(1e6));
    const double back = denormalize(normalize(tau, fitted), fitted);
    REQUIRE(std::abs(back - tau) / tau < 1e-10);
  }
  CHECK(denormalize(-50.0, fitted) > 0.0);
}

TEST_CASE("train-split stats are reused unchanged on other splits") {
  IntervalizedSequence train;
  train.intervals = {0.5, 2.0, 4.0};
  train.marks = {0, 0, 0};
  const NormStats stats = fit_norm({train});
  // protocol: the same object normalizes test-split intervals
  const double z = normalize(7.7, stats);
  CHECK(denormalize(z, stats) == doctest::Approx(7.7).epsilon(1e-12));
}

TEST_CASE("split sizes, determinism and partition") {
  Dataset d;
  d.num_marks = 1;
  for (int i = 0; i < 10; ++i) {
    const double t = 1.0 + i;
    d.sequences.push_back({{{t, 0}, {t + 0.5, 0}}});
  }
  Rng rng(23);
  const SplitResult r = split(d, 0.8, 0.1, 0.1, rng);
  CHECK(r.train.sequences.size() == 8);
  CHECK(r.val.sequences.size() == 1);
  CHECK(r.test.sequences.size() == 1);

  Rng rng2(23);
  const SplitResult r2 = split(d, 0.8, 0.1, 0.1, rng2);
  for (size_t i = 0; i < r.train.sequences.size(); ++i)
    CHECK(r.train.sequences[i].events[0].time == r2.train.sequences[i].events[0].time);

  std::multiset<double> seen;
  for (const auto* part : {&r.train, &r.val, &r.test})
    for (const EventSequence& s : part->sequences) seen.insert(s.events[0].time);
  std::multiset<double> expected;
  for (const EventSequence& s : d.sequences) expected.insert(s.events[0].time);
  CHECK(seen == expected);
}

TEST_CASE("split rejects bad fractions") {
  Dataset d;
  d.num_marks = 1;
  d.sequences.push_back({{{1.0, 0}, {2.0, 0}}});
  Rng rng(1);
  CHECK_THROWS_AS(split(d, 0.5, 0.2, 0.2, rng), BadFractions);
  CHECK_THROWS_AS(split(d, 1.0, 0.0, 0.0, rng), BadFractions);
}
