#include "augrl/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "augrl/augment.hpp"

namespace augrl {

using ordered_json = nlohmann::ordered_json;

const char* mode_name(TrainMode m) {
  switch (m) {
    case TrainMode::Rl: return "rl";
    case TrainMode::Random: return "random";
    case TrainMode::Fixed: return "fixed";
    case TrainMode::None: return "none";
  }
  throw std::logic_error("mode_name: bad mode");
}

TrainMode parse_mode(const std::string& s) {
  if (s == "rl") return TrainMode::Rl;
  if (s == "random") return TrainMode::Random;
  if (s == "fixed") return TrainMode::Fixed;
  if (s == "none") return TrainMode::None;
  throw std::invalid_argument("unknown mode '" + s +
                              "' (expected rl|random|fixed|none)");
}

const char* reward_sign_name(RewardSign s) {
  return s == RewardSign::AsPaper ? "as_paper" : "adversarial";
}

RewardSign parse_reward_sign(const std::string& s) {
  if (s == "as_paper") return RewardSign::AsPaper;
  if (s == "adversarial") return RewardSign::Adversarial;
  throw std::invalid_argument("unknown reward_sign '" + s +
                              "' (expected as_paper|adversarial)");
}

void validate(const TrainConfig& cfg) {
  validate(cfg.space);
  if (cfg.policy_samples < 1)
    throw std::invalid_argument("policy_samples (M) must be >= 1");
  if (cfg.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (cfg.batch_size < 1)
    throw std::invalid_argument("batch_size must be >= 1");
  if (!(cfg.eta_asr > 0.0) || !(cfg.eta_plc > 0.0))
    throw std::invalid_argument("learning rates must be > 0");
  if (cfg.entropy_weight < 0.0)
    throw std::invalid_argument("entropy_weight must be >= 0");
  if (cfg.mode == TrainMode::Fixed) {
    if (!cfg.fixed_policy)
      throw std::invalid_argument("mode fixed requires a fixed_policy");
    validate(*cfg.fixed_policy, cfg.space);
  }
}

std::string metrics_line(const EpochRecord& rec) {
  ordered_json j;
  j["epoch"] = rec.epoch;
  j["policies"] = rec.policies;
  j["raw_losses"] = rec.raw_losses;
  j["rewards"] = rec.rewards;
  j["controller_entropy"] = rec.controller_entropy;
  j["train_loss"] = rec.train_loss;
  j["test_accuracy"] = rec.test_accuracy;
  return j.dump();
}

EpochRecord parse_metrics_line(const std::string& line) {
  const auto j = ordered_json::parse(line);
  EpochRecord rec;
  rec.epoch = j.at("epoch").get<int>();
  rec.policies = j.at("policies").get<std::vector<std::string>>();
  rec.raw_losses = j.at("raw_losses").get<std::vector<double>>();
  rec.rewards = j.at("rewards").get<std::vector<double>>();
  rec.controller_entropy = j.at("controller_entropy").get<double>();
  rec.train_loss = j.at("train_loss").get<double>();
  rec.test_accuracy = j.at("test_accuracy").get<double>();
  return rec;
}

std::vector<double> normalize_losses(const std::vector<double>& losses,
                                     double eps) {
  if (losses.empty())
    throw std::invalid_argument("normalize_losses: empty input");
  for (double v : losses)
    if (!std::isfinite(v))
      throw std::invalid_argument("normalize_losses: non-finite loss");

  const double n = static_cast<double>(losses.size());
  const double mean =
      std::accumulate(losses.begin(), losses.end(), 0.0) / n;
  double var = 0.0;
  for (double v : losses) var += (v - mean) * (v - mean);
  var /= n;  // population variance
  const double std_dev = std::sqrt(var);

  std::vector<double> out(losses.size(), 0.0);
  if (std_dev == 0.0) return out;
  for (std::size_t i = 0; i < losses.size(); ++i)
    out[i] = (losses[i] - mean) / (std_dev + eps);
  return out;
}

Policy uniform_random_policy(const SearchSpace& space, SplitRng& rng) {
  Policy p;
  std::vector<OperationKind> avail = space.kinds;
  for (int i = 0; i < space.policy_length; ++i) {
    const int ki = rng.uniform_int(0, static_cast<int>(avail.size()) - 1);
    const OperationKind kind = avail[ki];
    if (space.strict_distinct) avail.erase(avail.begin() + ki);
    if (is_warp_kind(kind)) {
      const int w = space.warps[rng.uniform_int(
          0, static_cast<int>(space.warps.size()) - 1)];
      p.ops.push_back(warp_op(w));
    } else {
      const int m = space.counts[rng.uniform_int(
          0, static_cast<int>(space.counts.size()) - 1)];
      const int s = space.sizes[rng.uniform_int(
          0, static_cast<int>(space.sizes.size()) - 1)];
      p.ops.push_back(mask_op(kind, m, s));
    }
  }
  return p;
}

namespace {

Batch gather_batch(const Dataset& data, const std::vector<int>& order,
                   std::size_t begin, std::size_t end) {
  Batch b;
  b.specs.reserve(end - begin);
  b.labels.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    b.specs.push_back(data.specs[order[i]]);
    b.labels.push_back(data.labels[order[i]]);
  }
  return b;
}

Batch augment_batch(const Batch& clean, const Policy& policy,
                    SplitRng branch_rng, const SearchSpace& space) {
  Batch out;
  out.labels = clean.labels;
  out.specs.reserve(clean.specs.size());
  for (std::size_t i = 0; i < clean.specs.size(); ++i)
    out.specs.push_back(
        apply_policy(clean.specs[i], policy, branch_rng.split(i), &space));
  return out;
}

// Core of one epoch for all modes. Branch gradients are reduced in policy
// index order against the pre-step snapshot (no step until all branches ran).
EpochRecord epoch_core(TraineeModel& trainee, const Dataset& train,
                       const TrainConfig& cfg, int epoch,
                       const std::vector<Policy>& policies,
                       SplitRng augment_root, SplitRng shuffle_rng) {
  const int n_branch = static_cast<int>(policies.size());
  const std::size_t n = train.size();
  if (n == 0) throw std::invalid_argument("empty training set");

  // Branch m trains on order[m]; with shared minibatches all branches (and
  // the clean mode) use order[0].
  const int n_orders = (!cfg.shared_minibatch && n_branch > 1) ? n_branch : 1;
  std::vector<std::vector<int>> orders(n_orders);
  for (int k = 0; k < n_orders; ++k) {
    orders[k].resize(n);
    std::iota(orders[k].begin(), orders[k].end(), 0);
    SplitRng r = shuffle_rng.split(k);
    r.shuffle(orders[k]);
  }

  const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t n_batches = (n + bs - 1) / bs;
  std::vector<double> loss_sums(std::max(n_branch, 1), 0.0);

  for (std::size_t j = 0; j < n_batches; ++j) {
    const std::size_t begin = j * bs;
    const std::size_t end = std::min(begin + bs, n);
    if (n_branch == 0) {
      const Batch batch = gather_batch(train, orders[0], begin, end);
      auto [loss, grad] = trainee.loss_and_grad(batch);
      if (!std::isfinite(loss))
        throw std::runtime_error("non-finite loss on clean data");
      loss_sums[0] += loss;
      trainee.apply_step(grad, cfg.eta_asr);
      continue;
    }
    Eigen::VectorXd grad_avg;
    for (int m = 0; m < n_branch; ++m) {
      const Batch clean =
          gather_batch(train, orders[n_orders == 1 ? 0 : m], begin, end);
      const Batch aug = augment_batch(
          clean, policies[m], augment_root.split(j).split(m), cfg.space);
      auto [loss, grad] = trainee.loss_and_grad(aug);
      if (!std::isfinite(loss))
        throw std::runtime_error("non-finite loss under policy " +
                                 format_policy(policies[m]));
      loss_sums[m] += loss;
      if (m == 0)
        grad_avg = grad;
      else
        grad_avg += grad;
    }
    grad_avg /= static_cast<double>(n_branch);
    trainee.apply_step(grad_avg, cfg.eta_asr);
  }

  EpochRecord rec;
  rec.epoch = epoch;
  for (const auto& p : policies) rec.policies.push_back(format_policy(p));
  for (double s : loss_sums)
    rec.raw_losses.push_back(s / static_cast<double>(n_batches));
  if (n_branch == 0) {
    rec.train_loss = loss_sums[0] / static_cast<double>(n_batches);
    rec.raw_losses.clear();
  } else {
    rec.train_loss =
        std::accumulate(rec.raw_losses.begin(), rec.raw_losses.end(), 0.0) /
        static_cast<double>(n_branch);
  }
  return rec;
}

std::vector<double> epoch_rewards(const std::vector<double>& raw,
                                  const TrainConfig& cfg) {
  std::vector<double> rewards =
      cfg.normalize_rewards ? normalize_losses(raw) : raw;
  if (cfg.reward_sign == RewardSign::Adversarial)
    for (double& r : rewards) r = -r;
  return rewards;
}

}  // namespace

EpochRecord run_epoch_rl(Controller& c, LstmState& chain_state,
                         TraineeModel& trainee, const Dataset& train,
                         const TrainConfig& cfg, int epoch,
                         SplitRng& sampler_rng, SplitRng augment_root,
                         SplitRng shuffle_rng) {
  if (cfg.reset_state_each_epoch) chain_state = c.zero_state();
  const LstmState epoch_start = chain_state;

  std::vector<SampledPolicy> samples;
  std::vector<Policy> policies;
  for (int m = 0; m < cfg.policy_samples; ++m) {
    samples.push_back(sample_policy(c, chain_state, sampler_rng));
    policies.push_back(samples.back().policy);
  }

  EpochRecord rec = epoch_core(trainee, train, cfg, epoch, policies,
                               std::move(augment_root), std::move(shuffle_rng));
  rec.rewards = epoch_rewards(rec.raw_losses, cfg);

  double esum = 0.0;
  std::size_t esteps = 0;
  for (const auto& s : samples) {
    for (double e : s.step_entropies) esum += e;
    esteps += s.step_entropies.size();
  }
  rec.controller_entropy = esum / static_cast<double>(esteps);

  reinforce_update(c, epoch_start, samples, rec.rewards);
  return rec;
}

Controller make_controller(const TrainConfig& cfg) {
  SplitRng init = SplitRng(cfg.seed_controller).split(1);
  ControllerConfig ccfg;
  ccfg.hidden = cfg.controller_hidden;
  ccfg.embed = cfg.controller_embed;
  ccfg.eta = cfg.eta_plc;
  ccfg.entropy_weight = cfg.entropy_weight;
  return Controller::random_init(TokenVocab(cfg.space), ccfg, init);
}

TrainOutcome run_training(
    const TrainConfig& cfg, const Dataset& train, const Dataset& test,
    const std::function<void(const EpochRecord&)>& on_epoch) {
  validate(cfg);
  if (train.n_freq != test.n_freq || train.n_classes != test.n_classes)
    throw std::invalid_argument("train/test dataset shape mismatch");

  SplitRng ctl_root(cfg.seed_controller);
  SplitRng trainee_init = ctl_root.split(0);
  SplitRng sampler = ctl_root.split(2);
  SplitRng shuffle_root = ctl_root.split(3);
  SplitRng augment_root(cfg.seed_augment);

  ToyClassifier trainee(train.n_freq, train.n_classes, cfg.trainee_hidden);
  trainee.init_params(trainee_init);

  std::optional<Controller> controller;
  LstmState chain_state;
  if (cfg.mode == TrainMode::Rl) {
    controller = make_controller(cfg);
    chain_state = controller->zero_state();
  }

  TrainOutcome out{.records = {},
                   .trainee = trainee,
                   .controller = std::nullopt,
                   .final_test_accuracy = 0.0,
                   .best_test_accuracy = 0.0};

  for (int e = 0; e < cfg.epochs; ++e) {
    const auto t0 = std::chrono::steady_clock::now();
    EpochRecord rec;
    switch (cfg.mode) {
      case TrainMode::Rl:
        rec = run_epoch_rl(*controller, chain_state, trainee, train, cfg, e,
                           sampler, augment_root.split(e),
                           shuffle_root.split(e));
        break;
      case TrainMode::Random: {
        std::vector<Policy> policies;
        for (int m = 0; m < cfg.policy_samples; ++m)
          policies.push_back(uniform_random_policy(cfg.space, sampler));
        rec = epoch_core(trainee, train, cfg, e, policies,
                         augment_root.split(e), shuffle_root.split(e));
        rec.rewards = epoch_rewards(rec.raw_losses, cfg);
        break;
      }
      case TrainMode::Fixed: {
        rec = epoch_core(trainee, train, cfg, e, {*cfg.fixed_policy},
                         augment_root.split(e), shuffle_root.split(e));
        rec.rewards = std::vector<double>(1, 0.0);
        break;
      }
      case TrainMode::None:
        rec = epoch_core(trainee, train, cfg, e, {}, augment_root.split(e),
                         shuffle_root.split(e));
        break;
    }
    rec.test_accuracy = trainee.evaluate(test);
    rec.wall_clock_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    out.best_test_accuracy = std::max(out.best_test_accuracy,
                                      rec.test_accuracy);
    out.final_test_accuracy = rec.test_accuracy;
    if (on_epoch) on_epoch(rec);
    out.records.push_back(std::move(rec));
  }
  out.trainee = trainee;
  out.controller = std::move(controller);
  return out;
}

GridSearchResult grid_search_two_stage(
    const Dataset& train, const Dataset& test, const TrainConfig& base,
    const std::vector<int>& stage1_counts, const std::vector<int>& stage1_sizes,
    const std::vector<int>& stage2_warps, int epochs_per_cell,
    const std::function<void(const GridCell&)>& on_cell) {
  if (stage1_counts.empty() || stage1_sizes.empty())
    throw std::invalid_argument("grid search: empty stage-1 grid");
  if (epochs_per_cell < 1)
    throw std::invalid_argument("grid search: epochs_per_cell must be >= 1");

  auto run_cell = [&](const Policy& policy, int length) {
    TrainConfig cfg = base;
    cfg.mode = TrainMode::Fixed;
    cfg.fixed_policy = policy;
    cfg.epochs = epochs_per_cell;
    cfg.space.policy_length = length;
    validate(cfg);
    return run_training(cfg, train, test).final_test_accuracy;
  };

  GridSearchResult res;
  for (int m : stage1_counts)
    for (int s : stage1_sizes) {
      Policy p{{mask_op(OperationKind::TimeMask, m, s),
                mask_op(OperationKind::FreqMask, m, s)}};
      GridCell cell;
      cell.stage = 1;
      cell.mask_count = m;
      cell.mask_size = s;
      cell.test_accuracy = run_cell(p, 2);
      res.cells.push_back(cell);
      if (on_cell) on_cell(res.cells.back());
    }

  res.stage1_winner = 0;
  for (std::size_t i = 1; i < res.cells.size(); ++i)
    if (res.cells[i].test_accuracy >
        res.cells[res.stage1_winner].test_accuracy)
      res.stage1_winner = static_cast<int>(i);
  res.cells[res.stage1_winner].winner = true;

  const int best_m = res.cells[res.stage1_winner].mask_count;
  const int best_s = res.cells[res.stage1_winner].mask_size;

  const std::size_t stage2_begin = res.cells.size();
  for (int w : stage2_warps) {
    Policy p{{mask_op(OperationKind::TimeMask, best_m, best_s),
              mask_op(OperationKind::FreqMask, best_m, best_s), warp_op(w)}};
    GridCell cell;
    cell.stage = 2;
    cell.mask_count = best_m;
    cell.mask_size = best_s;
    cell.warp = w;
    cell.test_accuracy = run_cell(p, 3);
    res.cells.push_back(cell);
    if (on_cell) on_cell(res.cells.back());
  }
  if (!stage2_warps.empty()) {
    res.stage2_winner = static_cast<int>(stage2_begin);
    for (std::size_t i = stage2_begin; i < res.cells.size(); ++i)
      if (res.cells[i].test_accuracy >
          res.cells[res.stage2_winner].test_accuracy)
        res.stage2_winner = static_cast<int>(i);
    res.cells[res.stage2_winner].winner = true;
  }
  return res;
}

std::vector<AblationRow> ablation_m_sweep(
    const TrainConfig& tmpl, const Dataset& train, const Dataset& test,
    const std::vector<int>& m_values, int n_reps,
    const std::function<void(const AblationRow&)>& on_row) {
  if (m_values.empty())
    throw std::invalid_argument("ablation: empty M list");
  for (int m : m_values)
    if (m < 1) throw std::invalid_argument("ablation: M must be >= 1");
  if (n_reps < 1) throw std::invalid_argument("ablation: n_reps must be >= 1");

  std::vector<AblationRow> rows;
  for (int m : m_values)
    for (TrainMode mode : {TrainMode::Random, TrainMode::Rl}) {
      AblationRow row;
      row.m = m;
      row.mode = mode;
      for (int r = 0; r < n_reps; ++r) {
        TrainConfig cfg = tmpl;
        cfg.mode = mode;
        cfg.policy_samples = m;
        cfg.seed_augment = tmpl.seed_augment + static_cast<std::uint64_t>(r);
        cfg.seed_controller =
            tmpl.seed_controller + static_cast<std::uint64_t>(r);
        row.final_accs.push_back(
            run_training(cfg, train, test).final_test_accuracy);
      }
      const double n = static_cast<double>(row.final_accs.size());
      row.mean = std::accumulate(row.final_accs.begin(), row.final_accs.end(),
                                 0.0) /
                 n;
      if (row.final_accs.size() > 1) {
        double ss = 0.0;
        for (double a : row.final_accs)
          ss += (a - row.mean) * (a - row.mean);
        row.stddev = std::sqrt(ss / (n - 1.0));
      }
      rows.push_back(row);
      if (on_row) on_row(rows.back());
    }
  return rows;
}

}  // namespace augrl
