#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "augrl/report.hpp"
#include "augrl/trainer.hpp"

using namespace augrl;
namespace fs = std::filesystem;

namespace {

SyntheticTask small_task() {
  SyntheticTask t;
  t.train_size = 64;
  t.test_size = 32;
  return t;
}

TrainConfig small_config(TrainMode mode, int epochs = 3) {
  TrainConfig cfg;
  cfg.mode = mode;
  cfg.epochs = epochs;
  cfg.policy_samples = 4;
  cfg.controller_hidden = 32;
  cfg.controller_embed = 8;
  return cfg;
}

}  // namespace

TEST_CASE("loss normalization") {
  CHECK(normalize_losses({2, 2, 2, 2}) ==
        std::vector<double>{0, 0, 0, 0});
  CHECK(normalize_losses({5}) == std::vector<double>{0});

  const auto n = normalize_losses({1, 2, 3, 4});
  REQUIRE(n.size() == 4);
  CHECK(n[0] == doctest::Approx(-1.3416).epsilon(1e-3));
  CHECK(n[1] == doctest::Approx(-0.4472).epsilon(1e-3));
  CHECK(n[2] == doctest::Approx(0.4472).epsilon(1e-3));
  CHECK(n[3] == doctest::Approx(1.3416).epsilon(1e-3));

  const double mean = std::accumulate(n.begin(), n.end(), 0.0) / 4.0;
  double var = 0.0;
  for (double v : n) var += (v - mean) * (v - mean);
  var /= 4.0;
  CHECK(std::abs(mean) <= 1e-9);
  CHECK(std::abs(var - 1.0) <= 1e-6);

  CHECK_THROWS(normalize_losses({}));
  CHECK_THROWS(normalize_losses({1.0, std::nan("")}));
}

TEST_CASE("metrics line round-trips") {
  EpochRecord rec;
  rec.epoch = 3;
  rec.policies = {"TimeWarp(W=20);TimeMsk(m=1,T=1);TimeMsk(m=1,T=1)"};
  rec.raw_losses = {1.25};
  rec.rewards = {0.0};
  rec.controller_entropy = 1.5;
  rec.train_loss = 1.25;
  rec.test_accuracy = 0.75;
  const EpochRecord back = parse_metrics_line(metrics_line(rec));
  CHECK(back.epoch == rec.epoch);
  CHECK(back.policies == rec.policies);
  CHECK(back.raw_losses == rec.raw_losses);
  CHECK(back.rewards == rec.rewards);
  CHECK(back.controller_entropy == rec.controller_entropy);
  CHECK(back.train_loss == rec.train_loss);
  CHECK(back.test_accuracy == rec.test_accuracy);
}

TEST_CASE("single policy sample forces zero reward and no update at zero lambda") {
  const auto [train, test] = gen_synthetic(small_task());
  TrainConfig cfg = small_config(TrainMode::Rl, 1);
  cfg.policy_samples = 1;
  cfg.entropy_weight = 0.0;
  validate(cfg);

  SplitRng init(5);
  ControllerConfig ccfg;
  ccfg.hidden = cfg.controller_hidden;
  ccfg.embed = cfg.controller_embed;
  ccfg.eta = cfg.eta_plc;
  ccfg.entropy_weight = 0.0;
  Controller c = Controller::random_init(TokenVocab{cfg.space}, ccfg, init);
  const Eigen::VectorXd before = c.params.flatten();

  ToyClassifier trainee(train.n_freq, train.n_classes);
  SplitRng trng(6);
  trainee.init_params(trng);

  LstmState chain = c.zero_state();
  SplitRng sampler(7);
  const EpochRecord rec =
      run_epoch_rl(c, chain, trainee, train, cfg, 0, sampler, SplitRng(8),
                   SplitRng(9));
  CHECK(rec.rewards == std::vector<double>{0.0});
  CHECK((c.params.flatten() - before).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(c.adam_step == 0);
}

TEST_CASE("epoch records have the per-mode structure") {
  const auto [train, test] = gen_synthetic(small_task());

  SUBCASE("rl") {
    const auto out = run_training(small_config(TrainMode::Rl), train, test);
    for (const auto& r : out.records) {
      CHECK(r.policies.size() == 4);
      CHECK(r.raw_losses.size() == 4);
      CHECK(r.rewards.size() == 4);
      const double sum =
          std::accumulate(r.rewards.begin(), r.rewards.end(), 0.0);
      CHECK(std::abs(sum) <= 1e-9);
      CHECK(r.controller_entropy > 0.0);
      for (const auto& p : r.policies)
        CHECK_NOTHROW(parse_policy(p));
    }
    CHECK(out.controller.has_value());
  }
  SUBCASE("random") {
    const auto out =
        run_training(small_config(TrainMode::Random), train, test);
    for (const auto& r : out.records) {
      CHECK(r.policies.size() == 4);
      CHECK(r.raw_losses.size() == 4);
    }
    CHECK_FALSE(out.controller.has_value());
  }
  SUBCASE("fixed with the handcrafted setting") {
    TrainConfig cfg = small_config(TrainMode::Fixed);
    cfg.fixed_policy =
        parse_policy("TimeMsk(m=1,T=10);FreqMsk(m=1,F=10);TimeWarp(W=20)");
    const auto out = run_training(cfg, train, test);
    for (const auto& r : out.records) {
      CHECK(r.policies.size() == 1);
      CHECK(r.raw_losses.size() == 1);
    }
  }
  SUBCASE("none") {
    const auto out = run_training(small_config(TrainMode::None), train, test);
    for (const auto& r : out.records) {
      CHECK(r.policies.empty());
      CHECK(r.raw_losses.empty());
      CHECK(r.train_loss > 0.0);
    }
  }
}

TEST_CASE("fixed mode requires a policy") {
  TrainConfig cfg = small_config(TrainMode::Fixed);
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("identical configs give bitwise-identical runs") {
  const auto [train, test] = gen_synthetic(small_task());
  for (TrainMode mode : {TrainMode::Rl, TrainMode::Random, TrainMode::None}) {
    const TrainConfig cfg = small_config(mode);
    std::string a, b;
    for (std::string* out : {&a, &b}) {
      const auto res = run_training(cfg, train, test);
      for (const auto& r : res.records) *out += metrics_line(r) + "\n";
    }
    CHECK(a == b);
  }
}

TEST_CASE("zero-weight rl sampling matches uniform random sampling") {
  // two-sample chi-square over first-step kinds, df = 6, p = 0.01
  const SearchSpace space = default_search_space();
  const Controller c(TokenVocab{space}, ControllerConfig{.hidden = 32,
                                                         .embed = 8});
  LstmState state = c.zero_state();
  SplitRng crng(100);
  std::vector<int> a(7, 0), b(7, 0);
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const SampledPolicy s = sample_policy(c, state, crng);
    a[static_cast<int>(s.policy.ops[0].kind)]++;
  }
  SplitRng urng(200);
  for (int i = 0; i < n; ++i) {
    const Policy p = uniform_random_policy(space, urng);
    b[static_cast<int>(p.ops[0].kind)]++;
  }
  double chi2 = 0.0;
  for (int k = 0; k < 7; ++k) {
    const double diff = a[k] - b[k];
    chi2 += diff * diff / (a[k] + b[k]);
  }
  CHECK(chi2 < 16.812);
}

TEST_CASE("clean training converges on the default task") {
  const auto [train, test] = gen_synthetic(SyntheticTask{});
  TrainConfig cfg = small_config(TrainMode::None, 50);
  const auto out = run_training(cfg, train, test);
  CHECK(out.final_test_accuracy >= 0.90);
  CHECK(out.best_test_accuracy >= out.final_test_accuracy);
}

TEST_CASE("two-stage grid search ranks cells deterministically") {
  const auto [train, test] = gen_synthetic(small_task());
  TrainConfig base;
  base.batch_size = 32;

  SUBCASE("single stage-1 cell wins by definition") {
    const auto res =
        grid_search_two_stage(train, test, base, {1}, {10}, {20}, 2);
    REQUIRE(res.cells.size() == 2);
    CHECK(res.stage1_winner == 0);
    CHECK(res.cells[0].winner);
    CHECK(res.cells[0].stage == 1);
    CHECK(res.cells[1].stage == 2);
    CHECK(res.cells[1].warp == 20);
    CHECK(res.stage2_winner == 1);
  }
  SUBCASE("identical seeds, identical ranking") {
    const auto r1 =
        grid_search_two_stage(train, test, base, {1, 3}, {2, 10}, {10, 55}, 2);
    const auto r2 =
        grid_search_two_stage(train, test, base, {1, 3}, {2, 10}, {10, 55}, 2);
    REQUIRE(r1.cells.size() == 6);  // 4 stage-1 + 2 stage-2
    CHECK(r1.stage1_winner == r2.stage1_winner);
    for (std::size_t i = 0; i < r1.cells.size(); ++i)
      CHECK(r1.cells[i].test_accuracy == r2.cells[i].test_accuracy);
  }
}

TEST_CASE("ablation sweep shapes and M = 1 degenerate case") {
  const auto [train, test] = gen_synthetic(small_task());
  TrainConfig tmpl = small_config(TrainMode::Rl, 2);
  const auto rows = ablation_m_sweep(tmpl, train, test, {1, 2}, 2);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].m == 1);
  CHECK(rows[0].mode == TrainMode::Random);
  CHECK(rows[1].m == 1);
  CHECK(rows[1].mode == TrainMode::Rl);
  CHECK(rows[2].m == 2);
  for (const auto& r : rows) {
    CHECK(r.final_accs.size() == 2);
    CHECK(r.stddev >= 0.0);
    CHECK(r.mean > 0.0);
  }
  const std::string csv = ablation_csv(rows);
  CHECK(csv.find("1,random,2,") != std::string::npos);
}

TEST_CASE("report reads, groups and flags malformed lines") {
  const auto dir = fs::temp_directory_path() / "augrl_report_test";
  fs::create_directories(dir / "run1");
  fs::create_directories(dir / "run2");

  const auto [train, test] = gen_synthetic(small_task());
  int wrote = 0;
  for (const auto& sub : {"run1", "run2"}) {
    TrainConfig cfg = small_config(TrainMode::Random, 2);
    cfg.seed_controller = 10 + wrote;
    std::ofstream m(dir / sub / "metrics.jsonl");
    const auto out = run_training(cfg, train, test);
    for (const auto& r : out.records) m << metrics_line(r) << "\n";
    ++wrote;
  }

  const auto s1 = summarize_run(dir / "run1" / "metrics.jsonl");
  CHECK(s1.epochs == 2);
  CHECK(s1.m == 4);
  CHECK(s1.mode == "unknown");  // no manifest next to the file

  const auto groups =
      group_runs({summarize_run(dir / "run1" / "metrics.jsonl"),
                  summarize_run(dir / "run2" / "metrics.jsonl")});
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].n_runs == 2);
  CHECK(groups[0].std_final >= 0.0);

  const auto single = group_runs({s1});
  CHECK(single[0].n_runs == 1);
  const std::string csv = groups_csv(single);
  // std column stays empty for a single run
  CHECK(csv.find(",\n") != std::string::npos);

  std::ofstream bad(dir / "bad.jsonl");
  bad << "{\"epoch\":0}\nnot json\n";
  bad.close();
  try {
    read_metrics_file(dir / "bad.jsonl");
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find(":1:") != std::string::npos);
  }
}

TEST_CASE("shared vs per-branch minibatches both run") {
  const auto [train, test] = gen_synthetic(small_task());
  TrainConfig cfg = small_config(TrainMode::Random, 2);
  cfg.shared_minibatch = false;
  const auto out = run_training(cfg, train, test);
  CHECK(out.records.size() == 2);
}
