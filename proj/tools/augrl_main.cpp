// Command-line front end: data generation, training in all modes, the
// two-stage grid search, the M ablation sweep, one-off policy application
// and report generation.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "augrl/augment.hpp"
#include "augrl/config.hpp"
#include "augrl/controller.hpp"
#include "augrl/io.hpp"
#include "augrl/report.hpp"
#include "augrl/trainee.hpp"
#include "augrl/trainer.hpp"

namespace fs = std::filesystem;
using namespace augrl;

namespace {

// One subcommand's configuration surface: every key exists as a --key flag,
// may come from a `key = value` config file, and ends up fully resolved in
// the manifest. Precedence: built-in default < config file < flag.
class KeyedConfig {
 public:
  explicit KeyedConfig(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_,
                     "config file with key = value lines");
  }

  void add(const std::string& key, const std::string& def,
           const std::string& desc) {
    defaults_.emplace_back(key, def);
    values_[key] = def;
    options_[key] = app_->add_option("--" + key, values_[key], desc);
  }

  ConfigMap resolve() const {
    ConfigMap out;
    for (const auto& [k, d] : defaults_) out.set(k, d);
    if (!config_path_.empty()) {
      const ConfigMap file = load_config_file(config_path_);
      for (const auto& [k, v] : file.items()) {
        if (!out.has(k))
          throw std::invalid_argument(config_path_ + ": unknown config key '" +
                                      k + "'");
        out.set(k, v);
      }
    }
    for (const auto& [k, d] : defaults_)
      if (options_.at(k)->count() > 0) out.set(k, values_.at(k));
    return out;
  }

 private:
  CLI::App* app_;
  std::string config_path_;
  std::vector<std::pair<std::string, std::string>> defaults_;
  std::map<std::string, std::string> values_;
  std::map<std::string, CLI::Option*> options_;
};

void add_seed_keys(KeyedConfig& kc) {
  kc.add("seed_data", "7", "dataset generation seed");
  kc.add("seed_augment", "2", "mask/warp placement seed");
  kc.add("seed_controller", "3",
         "model init, policy draw and batch order seed");
}

void add_train_keys(KeyedConfig& kc) {
  kc.add("train_path", "data/train.spds", "training dataset (SPDS1)");
  kc.add("test_path", "data/test.spds", "test dataset (SPDS1)");
  kc.add("mode", "rl", "rl | random | fixed | none");
  kc.add("m", "4", "policy samples per epoch (M)");
  kc.add("epochs", "200", "training epochs");
  kc.add("batch_size", "32", "minibatch size");
  kc.add("eta_asr", "0.05", "trainee learning rate");
  kc.add("eta_plc", "0.00035", "controller learning rate");
  kc.add("entropy_weight", "0.00001", "controller entropy bonus weight");
  kc.add("reward_sign", "as_paper", "as_paper | adversarial");
  kc.add("normalize_rewards", "true", "mean/variance normalize epoch losses");
  kc.add("policy", "", "fixed policy text (mode = fixed)");
  kc.add("op_set", "extended",
         "extended (all 7 operations) | standard (first 3)");
  kc.add("reset_state_each_epoch", "false",
         "zero the controller state before each epoch's sampling");
  kc.add("shared_minibatch", "true",
         "all M branches augment the same minibatch");
  kc.add("hidden_size", "128", "controller hidden width");
  kc.add("embed_size", "32", "controller embedding width");
  kc.add("trainee_hidden", "32", "trainee hidden width");
  add_seed_keys(kc);
}

TrainConfig train_config_from(const ConfigMap& c) {
  TrainConfig cfg;
  cfg.mode = parse_mode(c.get("mode"));
  cfg.policy_samples = c.get_int("m");
  cfg.epochs = c.get_int("epochs");
  cfg.batch_size = c.get_int("batch_size");
  cfg.eta_asr = c.get_double("eta_asr");
  cfg.eta_plc = c.get_double("eta_plc");
  cfg.entropy_weight = c.get_double("entropy_weight");
  cfg.reward_sign = parse_reward_sign(c.get("reward_sign"));
  cfg.normalize_rewards = c.get_bool("normalize_rewards");
  cfg.seed_data = c.get_u64("seed_data");
  cfg.seed_augment = c.get_u64("seed_augment");
  cfg.seed_controller = c.get_u64("seed_controller");
  cfg.reset_state_each_epoch = c.get_bool("reset_state_each_epoch");
  cfg.shared_minibatch = c.get_bool("shared_minibatch");
  const std::string op_set = c.get("op_set");
  if (op_set == "extended")
    cfg.space = default_search_space();
  else if (op_set == "standard")
    cfg.space = standard_ops_search_space();
  else
    throw std::invalid_argument("op_set must be extended|standard, got '" +
                                op_set + "'");
  cfg.controller_hidden = c.get_int("hidden_size");
  cfg.controller_embed = c.get_int("embed_size");
  cfg.trainee_hidden = c.get_int("trainee_hidden");
  if (!c.get("policy").empty())
    cfg.fixed_policy = parse_policy(c.get("policy"), cfg.space);
  validate(cfg);
  return cfg;
}

Dataset load_dataset_checked(const std::string& path) {
  if (!fs::exists(path))
    throw std::invalid_argument("dataset file not found: " + path);
  return read_dataset_file(path);
}

// Manifest + resolved.conf under dir; finished_at filled in by finalize.
RunManifest start_run(const fs::path& dir, const std::string& command,
                      const ConfigMap& resolved,
                      const std::vector<std::string>& artifacts) {
  fs::create_directories(dir);
  RunManifest man;
  man.command = command;
  man.config = resolved;
  man.artifacts = artifacts;
  man.started_at = utc_timestamp();
  write_manifest(dir / "manifest.json", man);
  atomic_write_text(dir / "resolved.conf", resolved.to_text());
  return man;
}

void finish_run(const fs::path& dir, RunManifest& man) {
  man.finished_at = utc_timestamp();
  write_manifest(dir / "manifest.json", man);
}

int cmd_gen_data(const ConfigMap& c) {
  SyntheticTask task;
  task.n_classes = c.get_int("n_classes");
  task.n_time = c.get_int("n_time");
  task.n_freq = c.get_int("n_freq");
  task.band_width = c.get_int("band_width");
  task.band_amplitude = c.get_double("band_amplitude");
  task.noise_sigma = c.get_double("noise_sigma");
  task.train_size = c.get_int("train_size");
  task.test_size = c.get_int("test_size");
  task.seed = c.get_u64("seed_data");

  const fs::path dir = c.get("out_dir");
  auto man = start_run(dir, "gen-data", c, {"train.spds", "test.spds"});
  const auto [train, test] = gen_synthetic(task);
  write_dataset_file(dir / "train.spds", train);
  write_dataset_file(dir / "test.spds", test);
  finish_run(dir, man);
  std::cout << "wrote " << (dir / "train.spds").string() << " ("
            << train.size() << " examples), " << (dir / "test.spds").string()
            << " (" << test.size() << " examples)\n";
  return 0;
}

int cmd_train(const ConfigMap& c) {
  const TrainConfig cfg = train_config_from(c);
  const Dataset train = load_dataset_checked(c.get("train_path"));
  const Dataset test = load_dataset_checked(c.get("test_path"));

  const fs::path dir = c.get("out_dir");
  std::vector<std::string> artifacts = {"metrics.jsonl", "trainee.ckpt"};
  if (cfg.mode == TrainMode::Rl) artifacts.push_back("controller.ckpt");
  auto man = start_run(dir, "train", c, artifacts);

  // Metrics stream to disk as each epoch finishes; wall-clock goes to the
  // timing log so the metrics file stays deterministic.
  std::ofstream metrics(dir / "metrics.jsonl", std::ios::trunc);
  std::ofstream timing(dir / "timing.log", std::ios::trunc);
  if (!metrics || !timing)
    throw std::runtime_error("cannot open output files under " + dir.string());

  const TrainOutcome out =
      run_training(cfg, train, test, [&](const EpochRecord& rec) {
        metrics << metrics_line(rec) << "\n";
        metrics.flush();
        timing << "epoch " << rec.epoch << " wall_clock_sec "
               << rec.wall_clock_sec << "\n";
        timing.flush();
      });

  save_trainee(dir / "trainee.ckpt", out.trainee);
  if (out.controller) save_controller(dir / "controller.ckpt", *out.controller);
  finish_run(dir, man);
  std::cout << "final test accuracy = " << out.final_test_accuracy
            << "  (best " << out.best_test_accuracy << ")\n";
  return 0;
}

int cmd_grid_search(const ConfigMap& c) {
  TrainConfig base;
  base.batch_size = c.get_int("batch_size");
  base.eta_asr = c.get_double("eta_asr");
  base.seed_data = c.get_u64("seed_data");
  base.seed_augment = c.get_u64("seed_augment");
  base.seed_controller = c.get_u64("seed_controller");
  base.trainee_hidden = c.get_int("trainee_hidden");

  const Dataset train = load_dataset_checked(c.get("train_path"));
  const Dataset test = load_dataset_checked(c.get("test_path"));
  const auto counts = parse_int_list(c.get("stage1_counts"));
  const auto sizes = parse_int_list(c.get("stage1_sizes"));
  const auto warps = parse_int_list(c.get("stage2_warps"));

  const fs::path dir = c.get("out_dir");
  auto man = start_run(dir, "grid-search", c,
                       {"grid_results.csv", "grid_results.txt"});
  const GridSearchResult res = grid_search_two_stage(
      train, test, base, counts, sizes, warps, c.get_int("cell_epochs"),
      [](const GridCell& cell) {
        std::cerr << "cell stage=" << cell.stage << " m=" << cell.mask_count
                  << " s=" << cell.mask_size << " W=" << cell.warp
                  << " acc=" << cell.test_accuracy << "\n";
      });
  atomic_write_text(dir / "grid_results.csv", grid_csv(res));
  const std::string text = grid_text(res);
  atomic_write_text(dir / "grid_results.txt", text);
  finish_run(dir, man);
  std::cout << text;
  return 0;
}

int cmd_ablate_m(const ConfigMap& c) {
  const TrainConfig tmpl = train_config_from(c);
  const Dataset train = load_dataset_checked(c.get("train_path"));
  const Dataset test = load_dataset_checked(c.get("test_path"));
  const auto m_values = parse_int_list(c.get("m_values"));
  const int n_seeds = c.get_int("n_seeds");

  const fs::path dir = c.get("out_dir");
  auto man = start_run(dir, "ablate-m", c, {"ablation.csv", "ablation.txt"});
  const auto rows = ablation_m_sweep(
      tmpl, train, test, m_values, n_seeds, [](const AblationRow& row) {
        std::cerr << "M=" << row.m << " " << mode_name(row.mode)
                  << " mean=" << row.mean << " std=" << row.stddev << "\n";
      });
  atomic_write_text(dir / "ablation.csv", ablation_csv(rows));
  const std::string text = ablation_text(rows);
  atomic_write_text(dir / "ablation.txt", text);
  finish_run(dir, man);
  std::cout << text;
  return 0;
}

int cmd_augment(const ConfigMap& c) {
  const std::string in_path = c.get("input");
  if (in_path.empty()) throw std::invalid_argument("--input is required");
  if (c.get("policy").empty())
    throw std::invalid_argument("--policy is required");
  if (!fs::exists(in_path))
    throw std::invalid_argument("input file not found: " + in_path);
  const Spectrogram in = read_spectrogram_file(in_path);

  // Accept any operation count; kinds and grids still validate.
  SearchSpace space = default_search_space();
  const std::string policy_text = c.get("policy");
  space.policy_length =
      1 + static_cast<int>(std::count(policy_text.begin(), policy_text.end(),
                                      ';'));
  const Policy policy = parse_policy(policy_text, space);

  const Spectrogram out = apply_policy(
      in, policy, SplitRng(c.get_u64("seed_augment")), &space);
  write_spectrogram_file(c.get("output"), out);

  std::cout << "shape " << in.n_time << "x" << in.n_freq << " -> "
            << out.n_time << "x" << out.n_freq << " (+"
            << (out.n_time - in.n_time) << " frames)\n";
  std::cout << "fill statistics of input: mean "
            << fill_value(in, FillMode::Mean) << ", max "
            << fill_value(in, FillMode::Max) << ", min "
            << fill_value(in, FillMode::Min) << "\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& files,
               const std::string& out_prefix) {
  std::vector<RunSummary> runs;
  for (const auto& f : files) runs.push_back(summarize_run(f));
  const auto groups = group_runs(runs);
  atomic_write_text(out_prefix + "_runs.csv", runs_csv(runs));
  atomic_write_text(out_prefix + "_groups.csv", groups_csv(groups));
  std::cout << report_text(runs, groups);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RL-learned spectrogram augmentation policies, desk scale"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-data", "generate the synthetic task");
  KeyedConfig gen_keys(gen);
  gen_keys.add("out_dir", "data", "output directory");
  gen_keys.add("n_classes", "4", "number of classes");
  gen_keys.add("n_time", "40", "frames per spectrogram");
  gen_keys.add("n_freq", "20", "frequency bins");
  gen_keys.add("band_width", "3", "informative band width (bins)");
  gen_keys.add("band_amplitude", "1.0", "band energy");
  gen_keys.add("noise_sigma", "0.5", "additive Gaussian noise sigma");
  gen_keys.add("train_size", "512", "training examples");
  gen_keys.add("test_size", "256", "test examples");
  add_seed_keys(gen_keys);

  auto* train = app.add_subcommand("train", "train in the configured mode");
  KeyedConfig train_keys(train);
  train_keys.add("out_dir", "run", "run directory");
  add_train_keys(train_keys);

  auto* grid = app.add_subcommand("grid-search",
                                  "sequential two-stage grid search");
  KeyedConfig grid_keys(grid);
  grid_keys.add("out_dir", "grid", "output directory");
  grid_keys.add("train_path", "data/train.spds", "training dataset");
  grid_keys.add("test_path", "data/test.spds", "test dataset");
  grid_keys.add("cell_epochs", "30", "epochs per grid cell");
  grid_keys.add("stage1_counts", "1,2,3,4,5", "stage-1 mask count grid");
  grid_keys.add("stage1_sizes", "1,2,3,4,5,6,7,8,9,10",
                "stage-1 mask size grid");
  grid_keys.add("stage2_warps", "10,15,20,25,30,35,40,45,50,55",
                "stage-2 warp grid");
  grid_keys.add("batch_size", "32", "minibatch size");
  grid_keys.add("eta_asr", "0.05", "trainee learning rate");
  grid_keys.add("trainee_hidden", "32", "trainee hidden width");
  add_seed_keys(grid_keys);

  auto* ablate = app.add_subcommand(
      "ablate-m", "random vs rl sweep over policy sample counts");
  KeyedConfig ablate_keys(ablate);
  ablate_keys.add("out_dir", "ablation", "output directory");
  add_train_keys(ablate_keys);
  ablate_keys.add("m_values", "2,4,8", "M values to sweep");
  ablate_keys.add("n_seeds", "5", "repetitions per (M, mode)");

  auto* aug = app.add_subcommand("augment",
                                 "apply a policy to one spectrogram file");
  KeyedConfig aug_keys(aug);
  aug_keys.add("input", "", "input SPEC1 file");
  aug_keys.add("policy", "", "policy text");
  aug_keys.add("output", "out.spec", "output SPEC1 file");
  add_seed_keys(aug_keys);

  auto* rep = app.add_subcommand("report", "summarize metrics files");
  std::vector<std::string> rep_files;
  std::string rep_prefix = "report";
  rep->add_option("metrics", rep_files, "metrics JSONL files")->required();
  rep->add_option("--out_prefix", rep_prefix, "output CSV name prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(gen_keys.resolve());
    if (train->parsed()) return cmd_train(train_keys.resolve());
    if (grid->parsed()) return cmd_grid_search(grid_keys.resolve());
    if (ablate->parsed()) return cmd_ablate_m(ablate_keys.resolve());
    if (aug->parsed()) return cmd_augment(aug_keys.resolve());
    if (rep->parsed()) return cmd_report(rep_files, rep_prefix);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
