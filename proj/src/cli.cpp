#include "bfpp/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "bfpp/checkpoint.hpp"
#include "bfpp/metrics.hpp"
#include "bfpp/training.hpp"

namespace fs = std::filesystem;

namespace bfpp {

namespace {

uint64_t fnv1a(std::span<const char> bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

// Every run records its configuration hash, seed, and the content hashes of
// the files it read and wrote.
void write_manifest(const Config& c, const std::string& command,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  nlohmann::json j;
  j["command"] = command;
  const std::string echo = config_echo(c);
  j["config_hash"] = hex64(fnv1a(std::span(echo.data(), echo.size())));
  j["seed"] = c.seed;
  nlohmann::json in_j = nlohmann::json::object();
  for (const std::string& p : inputs) in_j[p] = file_content_hash(p);
  j["inputs"] = in_j;
  nlohmann::json out_j = nlohmann::json::object();
  for (const std::string& p : outputs) out_j[p] = file_content_hash(p);
  j["outputs"] = out_j;
  std::ofstream os(fs::path(c.out) / "run-manifest.json");
  os << j.dump(2) << "\n";
}

void print_warnings(const Config& c) {
  for (const std::string& w : c.warnings()) std::cerr << "warning: " << w << "\n";
}

SplitResult split_like_training(const Dataset& d, const std::string& ckpt_text) {
  // Splits must reproduce the training partition: seed and fractions come from
  // the configuration echoed into the checkpoint, not the evaluation seed.
  Config train_cfg = parse_config_text(ckpt_text, "<checkpoint config>");
  Rng rng(train_cfg.seed, /*stream=*/0x59117);
  return split(d, train_cfg.train_frac, train_cfg.val_frac, train_cfg.test_frac, rng);
}

std::string default_checkpoint(const Config& c) {
  return (fs::path(c.out) / "model.ckpt").string();
}

}  // namespace

Config apply_overrides(Config c, const Overrides& o) {
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.out = *o.out;
  if (o.joint_noise) c.joint_noise = *o.joint_noise;
  if (o.steps) c.steps = *o.steps;
  if (o.threads) c.threads = *o.threads;
  return c;
}

std::string file_content_hash(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return "missing";
  std::ostringstream buf;
  buf << is.rdbuf();
  const std::string s = buf.str();
  return hex64(fnv1a(std::span(s.data(), s.size())));
}

int cmd_train(const Config& c) {
  print_warnings(c);
  fs::create_directories(c.out);
  const Dataset data = load_dataset(c.dataset, c.num_marks);
  Rng split_rng(c.seed, /*stream=*/0x59117);
  const SplitResult parts = split(data, c.train_frac, c.val_frac, c.test_frac, split_rng);
  std::cerr << "train: " << parts.train.sequences.size() << " sequences, val "
            << parts.val.sequences.size() << ", test " << parts.test.sequences.size() << "\n";

  const std::string ckpt_path = default_checkpoint(c);
  const std::string echo = config_echo(c);
  std::ofstream loss_log(fs::path(c.out) / "loss_log.csv");
  loss_log << "epoch,mean_loss,vlb,wall_seconds\n";
  TrainStats stats;
  const EpochCallback cb = [&](const EpochLog& log, const ModelState& m) {
    loss_log << log.epoch << "," << std::setprecision(17) << log.mean_loss << ",";
    if (log.has_vlb) loss_log << log.vlb;
    loss_log << "," << log.seconds << "\n";
    loss_log.flush();
    if (c.checkpoint_every > 0 && log.epoch % c.checkpoint_every == 0 && log.epoch != c.epochs) {
      const std::string p =
          (fs::path(c.out) / ("model-epoch" + std::to_string(log.epoch) + ".ckpt")).string();
      save_checkpoint(p, m, Rng(c.seed).state(), echo);
    }
    if (log.epoch == 1 || log.epoch % 10 == 0 || log.epoch == c.epochs)
      std::cerr << "epoch " << log.epoch << " loss " << log.mean_loss << "\n";
  };
  const ModelState model = train(parts.train, c.train_config(), cb, &stats);
  save_checkpoint(ckpt_path, model, stats.final_rng_state, echo);
  write_manifest(c, "train", {c.dataset},
                 {ckpt_path, (fs::path(c.out) / "loss_log.csv").string()});
  std::cerr << "wrote " << ckpt_path << "\n";
  return 0;
}

int cmd_evaluate(const Config& c, const std::string& checkpoint_path) {
  print_warnings(c);
  fs::create_directories(c.out);
  const std::string ckpt = checkpoint_path.empty() ? default_checkpoint(c) : checkpoint_path;
  const LoadedCheckpoint loaded = load_checkpoint(ckpt);
  const Dataset data = load_dataset(c.dataset, loaded.model.num_marks);
  const SplitResult parts = split_like_training(data, loaded.config_text);

  const std::vector<uint64_t> eval_seeds = c.eval_seeds();
  std::vector<EvalReport> reports;
  for (uint64_t s : eval_seeds) {
    SampleConfig sc = c.sample_config();
    sc.seed = s;
    reports.push_back(evaluate(parts.test, loaded.model, sc, c.threads, /*with_vlb=*/true));
  }

  auto mean_sd = [&reports](auto field) {
    double mean = 0.0;
    for (const EvalReport& r : reports) mean += field(r);
    mean /= static_cast<double>(reports.size());
    double ss = 0.0;
    for (const EvalReport& r : reports) ss += (field(r) - mean) * (field(r) - mean);
    const double sd = reports.size() > 1 ? std::sqrt(ss / (reports.size() - 1)) : 0.0;
    return std::pair<double, double>{mean, sd};
  };
  const auto [mape_m, mape_sd] = mean_sd([](const EvalReport& r) { return r.mape; });
  const auto [crps_m, crps_sd] = mean_sd([](const EvalReport& r) { return r.crps; });
  const auto [acc_m, acc_sd] = mean_sd([](const EvalReport& r) { return r.acc; });
  const auto [vlb_m, vlb_sd] = mean_sd([](const EvalReport& r) { return r.vlb; });

  nlohmann::json j;
  j["mape"] = {{"mean", mape_m}, {"sd", mape_sd}};
  j["crps"] = {{"mean", crps_m}, {"sd", crps_sd}};
  j["acc"] = {{"mean", acc_m}, {"sd", acc_sd}};
  j["vlb"] = {{"mean", vlb_m}, {"sd", vlb_sd}};
  j["events"] = reports.front().events;
  j["seeds"] = eval_seeds;
  nlohmann::json per_seed = nlohmann::json::array();
  for (size_t i = 0; i < reports.size(); ++i)
    per_seed.push_back({{"seed", eval_seeds[i]},
                        {"mape", reports[i].mape},
                        {"crps", reports[i].crps},
                        {"acc", reports[i].acc},
                        {"vlb", reports[i].vlb}});
  j["per_seed"] = per_seed;
  const std::string report_path = (fs::path(c.out) / "eval_report.json").string();
  std::ofstream(report_path) << j.dump() << "\n";
  std::cout << j.dump() << "\n";

  std::ostringstream table;
  table << std::left << std::setw(8) << "metric" << std::right << std::setw(14) << "mean"
        << std::setw(14) << "sd" << "\n";
  auto row = [&table](const char* name, double mean, double sd) {
    table << std::left << std::setw(8) << name << std::right << std::setw(14)
          << std::setprecision(6) << std::fixed << mean << std::setw(14) << sd << "\n";
  };
  row("mape", mape_m, mape_sd);
  row("crps", crps_m, crps_sd);
  row("acc", acc_m, acc_sd);
  row("vlb", vlb_m, vlb_sd);
  const std::string table_path = (fs::path(c.out) / "eval_report.txt").string();
  std::ofstream(table_path) << table.str();
  std::cout << table.str();

  write_manifest(c, "evaluate", {c.dataset, ckpt}, {report_path, table_path});
  return 0;
}

int cmd_sample(const Config& c, const std::string& checkpoint_path, int max_records) {
  fs::create_directories(c.out);
  const std::string ckpt = checkpoint_path.empty() ? default_checkpoint(c) : checkpoint_path;
  const LoadedCheckpoint loaded = load_checkpoint(ckpt);
  const Dataset data = load_dataset(c.dataset, loaded.model.num_marks);
  const SplitResult parts = split_like_training(data, loaded.config_text);

  SampleConfig sc = c.sample_config();
  sc.num_samples = c.sample_draws;
  const std::string out_path = (fs::path(c.out) / "samples.jsonl").string();
  std::ofstream os(out_path);
  ModelRuntime rt(loaded.model);
  const Rng base(sc.seed, /*stream=*/0xe7a1);
  int written = 0;
  for (size_t si = 0; si < parts.test.sequences.size() && (max_records < 0 || written < max_records);
       ++si) {
    const EventSequence& s = parts.test.sequences[si];
    const IntervalizedSequence iv = intervalize(s);
    const std::vector<TimedMark> seq = to_timed_marks(iv, loaded.model.norm);
    const auto hs = rt.encode_values(seq);
    Rng srng = base.fork(content_hash(s));
    for (size_t i = 0; i < seq.size() && (max_records < 0 || written < max_records); ++i) {
      Rng erng = srng.fork(i);
      const PointPrediction p = predict_point(rt, hs[i], sc, erng);
      nlohmann::json rec;
      rec["sequence"] = si;
      rec["event"] = i;
      rec["tau_true"] = iv.intervals[i];
      rec["mark_true"] = iv.marks[i];
      rec["tau_point"] = p.tau_point;
      rec["mark_point"] = p.mark_point;
      rec["draws"] = p.tau_draws;
      rec["p_out_mean"] = p.p_out_mean;
      os << rec.dump() << "\n";
      ++written;
    }
  }
  os.close();
  write_manifest(c, "sample", {c.dataset, ckpt}, {out_path});
  std::cerr << "wrote " << written << " records to " << out_path << "\n";
  return 0;
}

int cmd_simulate(const Config& c) {
  fs::create_directories(c.out);
  const HawkesSpec spec = c.hawkes_spec();
  const Rng rng(c.seed, /*stream=*/0x51e7);
  const Dataset d = simulate_many(spec, c.hawkes_sequences, rng, c.threads);
  save_dataset(d, c.dataset);
  const Dataset check = load_dataset(c.dataset, c.num_marks);  // reject bad output early
  write_manifest(c, "simulate", {}, {c.dataset});
  std::cerr << "wrote " << check.sequences.size() << " sequences to " << c.dataset << "\n";
  return 0;
}

int cmd_inspect_c(const Config& c, const std::string& checkpoint_path, int bins) {
  fs::create_directories(c.out);
  const std::string ckpt = checkpoint_path.empty() ? default_checkpoint(c) : checkpoint_path;
  const LoadedCheckpoint loaded = load_checkpoint(ckpt);
  const ModelState& m = loaded.model;
  const std::vector<double> cvec = m.effective_c(m.cfg.joint_noise);
  const int M = m.num_marks;

  const std::string table_path = (fs::path(c.out) / "c_values.tsv").string();
  std::ofstream table(table_path);
  table << "mark\tc\n";
  for (int i = 0; i < M; ++i) table << i << "\t" << std::setprecision(17) << cvec[i] << "\n";
  table.close();

  if (bins < 1 || bins % 2 == 0) throw ParseError("inspect-c: bins must be odd and >= 1");
  const double lim = std::sqrt(static_cast<double>(M));
  std::vector<int> counts(bins, 0);
  for (double v : cvec) {
    int b = static_cast<int>(std::floor((v + lim) / (2.0 * lim) * bins));
    b = std::min(std::max(b, 0), bins - 1);
    ++counts[b];
  }
  const std::string hist_path = (fs::path(c.out) / "c_histogram.tsv").string();
  std::ofstream hist(hist_path);
  hist << "bin_lo\tbin_hi\tcount\n";
  std::cout << "mark cross-covariance histogram (" << bins << " bins over [-" << lim << ", "
            << lim << "])\n";
  for (int b = 0; b < bins; ++b) {
    const double lo = -lim + 2.0 * lim * b / bins;
    const double hi = -lim + 2.0 * lim * (b + 1) / bins;
    hist << lo << "\t" << hi << "\t" << counts[b] << "\n";
    std::cout << std::setw(10) << std::setprecision(3) << std::fixed << lo << " .. "
              << std::setw(8) << hi << "  " << std::string(counts[b], '#') << " " << counts[b]
              << "\n";
  }
  hist.close();
  std::cout.unsetf(std::ios::fixed);

  write_manifest(c, "inspect-c", {ckpt}, {table_path, hist_path});
  return 0;
}

}  // namespace bfpp
