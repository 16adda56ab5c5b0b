#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bfpp/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bayesian flow point process: train, sample and evaluate marked event models"};
  app.require_subcommand(0, 1);

  bool show_schema = false;
  app.add_flag("--print-schema", show_schema, "print the config file schema and exit");

  std::string config_path;
  bfpp::Overrides ov;
  std::string joint_noise_str;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "config file path")->required();
    cmd->add_option_function<uint64_t>(
        "--seed", [&ov](uint64_t v) { ov.seed = v; }, "override the config seed");
    cmd->add_option_function<std::string>(
        "--out", [&ov](const std::string& v) { ov.out = v; }, "override the output directory");
    cmd->add_option_function<std::string>(
           "--joint-noise",
           [&ov](const std::string& v) {
             if (v != "on" && v != "off") throw CLI::ValidationError("--joint-noise must be on|off");
             ov.joint_noise = v == "on";
           },
           "override the joint-noise setting (on|off)")
        ->expected(1);
    cmd->add_option_function<int>(
        "--steps", [&ov](int v) { ov.steps = v; }, "override the number of sampler steps K");
    cmd->add_option_function<int>(
        "--threads", [&ov](int v) { ov.threads = v; }, "override the worker thread count");
  };

  CLI::App* train = app.add_subcommand("train", "fit a model and write a checkpoint");
  add_common(train);

  CLI::App* evaluate = app.add_subcommand("evaluate", "score a checkpoint on the test split");
  add_common(evaluate);
  std::string eval_ckpt;
  evaluate->add_option("--checkpoint", eval_ckpt, "checkpoint path (default <out>/model.ckpt)");

  CLI::App* sample = app.add_subcommand("sample", "emit per-event draws for held-out events");
  add_common(sample);
  std::string sample_ckpt;
  int sample_n = -1;
  sample->add_option("--checkpoint", sample_ckpt, "checkpoint path (default <out>/model.ckpt)");
  sample->add_option("-n,--records", sample_n, "maximum records to emit (-1 = all)");

  CLI::App* simulate = app.add_subcommand("simulate", "write a synthetic Hawkes dataset");
  add_common(simulate);

  CLI::App* inspect = app.add_subcommand("inspect-c", "dump the trained cross-covariance");
  add_common(inspect);
  std::string inspect_ckpt;
  int bins = 11;
  inspect->add_option("--checkpoint", inspect_ckpt, "checkpoint path (default <out>/model.ckpt)");
  inspect->add_option("--bins", bins, "histogram bin count (odd)");

  CLI11_PARSE(app, argc, argv);

  if (show_schema) {
    std::cout << bfpp::print_schema();
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return 1;
  }

  try {
    const bfpp::Config cfg = bfpp::apply_overrides(bfpp::parse_config(config_path), ov);
    if (train->parsed()) return bfpp::cmd_train(cfg);
    if (evaluate->parsed()) return bfpp::cmd_evaluate(cfg, eval_ckpt);
    if (sample->parsed()) return bfpp::cmd_sample(cfg, sample_ckpt, sample_n);
    if (simulate->parsed()) return bfpp::cmd_simulate(cfg);
    if (inspect->parsed()) return bfpp::cmd_inspect_c(cfg, inspect_ckpt, bins);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
