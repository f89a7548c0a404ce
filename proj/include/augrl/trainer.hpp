#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "augrl/controller.hpp"
#include "augrl/policy.hpp"
#include "augrl/rng.hpp"
#include "augrl/trainee.hpp"

namespace augrl {

enum class TrainMode { Rl, Random, Fixed, None };
enum class RewardSign { AsPaper, Adversarial };

const char* mode_name(TrainMode m);
TrainMode parse_mode(const std::string& s);
const char* reward_sign_name(RewardSign s);
RewardSign parse_reward_sign(const std::string& s);

struct TrainConfig {
  TrainMode mode = TrainMode::Rl;
  int policy_samples = 4;  // M
  int epochs = 200;
  int batch_size = 32;
  double eta_asr = 0.05;
  double eta_plc = 0.00035;
  double entropy_weight = 1e-5;
  RewardSign reward_sign = RewardSign::AsPaper;
  bool normalize_rewards = true;
  std::optional<Policy> fixed_policy;  // required for mode Fixed
  // data: dataset generation; augment: mask/warp position draws;
  // controller: model initializations, policy draws and batch order.
  std::uint64_t seed_data = 7;
  std::uint64_t seed_augment = 2;
  std::uint64_t seed_controller = 3;
  bool reset_state_each_epoch = false;
  bool shared_minibatch = true;  // all M branches see the same minibatch
  SearchSpace space = default_search_space();
  int controller_hidden = 128;
  int controller_embed = 32;
  int trainee_hidden = 32;
};

void validate(const TrainConfig& cfg);

// One training epoch's bookkeeping. wall_clock_sec is measured time and is
// kept out of the metrics JSONL so identical runs stay byte-identical; it
// goes to the timing log instead.
struct EpochRecord {
  int epoch = 0;
  std::vector<std::string> policies;
  std::vector<double> raw_losses;
  std::vector<double> rewards;  // normalized, sign applied
  double controller_entropy = 0.0;
  double train_loss = 0.0;
  double test_accuracy = 0.0;
  double wall_clock_sec = 0.0;
};

std::string metrics_line(const EpochRecord& rec);
EpochRecord parse_metrics_line(const std::string& line);

// (L - mean) / (population std + eps); all-equal input maps to all zeros.
std::vector<double> normalize_losses(const std::vector<double>& losses,
                                     double eps = 1e-8);

// Kind uniform over the allowed set, then parameters uniform over their
// grids; matches the controller's support exactly.
Policy uniform_random_policy(const SearchSpace& space, SplitRng& rng);

// One alternating-update epoch: sample M policies, run every minibatch with
// M augmented branches against the same trainee snapshot, average branch
// gradients per step, then update the controller from the normalized
// per-policy epoch losses. `chain_state` carries the sampling context across
// epochs. test_accuracy is left for the caller to fill.
EpochRecord run_epoch_rl(Controller& c, LstmState& chain_state,
                         TraineeModel& trainee, const Dataset& train,
                         const TrainConfig& cfg, int epoch,
                         SplitRng& sampler_rng, SplitRng augment_root,
                         SplitRng shuffle_rng);

struct TrainOutcome {
  std::vector<EpochRecord> records;
  ToyClassifier trainee;
  std::optional<Controller> controller;
  double final_test_accuracy = 0.0;
  double best_test_accuracy = 0.0;
};

// The controller exactly as run_training initializes it for mode rl.
Controller make_controller(const TrainConfig& cfg);

// Full run in the configured mode. on_epoch fires after each epoch (metrics
// streaming); records carry measured wall-clock times.
TrainOutcome run_training(
    const TrainConfig& cfg, const Dataset& train, const Dataset& test,
    const std::function<void(const EpochRecord&)>& on_epoch = {});

struct GridCell {
  int stage = 1;
  int mask_count = 0;
  int mask_size = 0;
  int warp = 0;  // 0 = warp off
  double test_accuracy = 0.0;
  bool winner = false;
};

struct GridSearchResult {
  std::vector<GridCell> cells;  // stage 1 cells then stage 2 cells
  int stage1_winner = -1;       // indices into cells
  int stage2_winner = -1;
};

// Stage 1 sweeps (m, s) with equal time/freq mask counts and sizes and warp
// off; stage 2 fixes the stage-1 winner and sweeps the warp grid. Every cell
// trains a fresh trainee for epochs_per_cell with identical seeds.
GridSearchResult grid_search_two_stage(
    const Dataset& train, const Dataset& test, const TrainConfig& base,
    const std::vector<int>& stage1_counts, const std::vector<int>& stage1_sizes,
    const std::vector<int>& stage2_warps, int epochs_per_cell,
    const std::function<void(const GridCell&)>& on_cell = {});

struct AblationRow {
  int m = 0;
  TrainMode mode = TrainMode::Random;
  std::vector<double> final_accs;
  double mean = 0.0;
  double stddev = 0.0;  // sample std over repetitions, 0 when n = 1
};

// Random and RL runs for each M, n_reps repetitions with matched seeds
// (repetition r offsets the augment and controller seeds by r in both
// modes). Rows ordered (M asc, Random before Rl).
std::vector<AblationRow> ablation_m_sweep(
    const TrainConfig& tmpl, const Dataset& train, const Dataset& test,
    const std::vector<int>& m_values, int n_reps,
    const std::function<void(const AblationRow&)>& on_row = {});

}  // namespace augrl
