#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <utility>
#include <vector>

#include "augrl/io.hpp"
#include "augrl/rng.hpp"
#include "augrl/spectrogram.hpp"

namespace augrl {

// Synthetic spectrogram classification task: each class is an energy band of
// `band_width` bins centered at a class-specific frequency, plus Gaussian
// noise. Class identity lives entirely on the frequency axis, so frequency
// masks over the informative bands are destructive while time masks are
// comparatively benign.
struct SyntheticTask {
  int n_classes = 4;
  int n_time = 40;
  int n_freq = 20;
  int band_width = 3;
  double band_amplitude = 1.0;
  double noise_sigma = 0.5;
  int train_size = 512;
  int test_size = 256;
  std::uint64_t seed = 7;
};

// Center bin of a class's informative band.
int class_band_center(const SyntheticTask& task, int cls);

// Deterministic given task.seed; labels balanced to within one per class.
// Throws if n_freq < n_classes * band_width.
std::pair<Dataset, Dataset> gen_synthetic(const SyntheticTask& task);

// A minibatch of (possibly augmented) spectrograms.
struct Batch {
  std::vector<Spectrogram> specs;
  std::vector<int> labels;
};

// Pluggable model trained under sampled augmentation policies. Parameter
// vectors are flattened in a fixed order so branch gradients can be averaged
// generically.
class TraineeModel {
 public:
  virtual ~TraineeModel() = default;

  // Mean loss over the batch and its gradient; pure given parameters.
  virtual std::pair<double, Eigen::VectorXd> loss_and_grad(
      const Batch& batch) const = 0;

  // Plain descent step: theta <- theta - lr * grad.
  virtual void apply_step(const Eigen::VectorXd& grad, double lr) = 0;

  virtual double evaluate(const Dataset& data) const = 0;  // accuracy

  virtual Eigen::VectorXd snapshot() const = 0;
  virtual void restore(const Eigen::VectorXd& params) = 0;
};

// Mean-pool-over-time front end, one rectified hidden layer, softmax
// cross-entropy. Gradients are derived and computed by hand. Mean pooling
// makes the model indifferent to n_time, so warped (longer) inputs are fine.
class ToyClassifier final : public TraineeModel {
 public:
  ToyClassifier(int n_freq, int n_classes, int hidden = 32);

  // Uniform [-0.08, 0.08]; the default-constructed model is all zeros
  // (uniform logits, loss = ln n_classes).
  void init_params(SplitRng& rng);

  std::pair<double, Eigen::VectorXd> loss_and_grad(
      const Batch& batch) const override;
  void apply_step(const Eigen::VectorXd& grad, double lr) override;
  double evaluate(const Dataset& data) const override;
  Eigen::VectorXd snapshot() const override;
  void restore(const Eigen::VectorXd& params) override;

  double loss(const Batch& batch) const;
  int predict(const Spectrogram& s) const;

  int n_freq() const { return n_freq_; }
  int n_classes() const { return n_classes_; }
  int hidden() const { return hidden_; }
  std::size_t n_params() const;

 private:
  Eigen::VectorXd pooled(const Spectrogram& s) const;

  int n_freq_, hidden_, n_classes_;
  Eigen::MatrixXd w1_;  // hidden x n_freq
  Eigen::VectorXd b1_;
  Eigen::MatrixXd w2_;  // n_classes x hidden
  Eigen::VectorXd b2_;
};

// "ATC1" checkpoint: magic, u32 dims (n_freq, hidden, n_classes), parameter
// tensors as little-endian f32 with dimension headers.
void save_trainee(const std::filesystem::path& path, const ToyClassifier& m);
ToyClassifier load_trainee(const std::filesystem::path& path);

}  // namespace augrl
