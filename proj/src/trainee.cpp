#include "augrl/trainee.hpp"

#include <cmath>
#include <stdexcept>

namespace augrl {

int class_band_center(const SyntheticTask& task, int cls) {
  const int stride = task.n_freq / task.n_classes;
  return cls * stride + stride / 2;
}

std::pair<Dataset, Dataset> gen_synthetic(const SyntheticTask& task) {
  if (task.n_classes < 2) throw std::invalid_argument("need >= 2 classes");
  if (task.n_time < 1 || task.n_freq < 1 || task.band_width < 1 ||
      task.train_size < 1 || task.test_size < 1)
    throw std::invalid_argument("bad synthetic task shape");
  if (task.n_freq < task.n_classes * task.band_width)
    throw std::invalid_argument(
        "n_freq too small: need n_freq >= n_classes * band_width");
  if (!(task.noise_sigma >= 0.0))
    throw std::invalid_argument("noise_sigma must be >= 0");

  SplitRng root(task.seed);
  auto make = [&](int count, SplitRng rng) {
    Dataset d;
    d.n_time = task.n_time;
    d.n_freq = task.n_freq;
    d.n_classes = task.n_classes;
    const int half = task.band_width / 2;
    for (int i = 0; i < count; ++i) {
      const int cls = i % task.n_classes;  // balanced to within one
      Spectrogram s(task.n_time, task.n_freq);
      const int center = class_band_center(task, cls);
      for (int t = 0; t < task.n_time; ++t)
        for (int f = 0; f < task.n_freq; ++f) {
          double v = std::abs(f - center) <= half ? task.band_amplitude : 0.0;
          if (task.noise_sigma > 0.0)
            v += rng.gaussian(0.0, task.noise_sigma);
          s.at(t, f) = static_cast<float>(v);
        }
      d.specs.push_back(std::move(s));
      d.labels.push_back(cls);
    }
    return d;
  };
  return {make(task.train_size, root.split(0)),
          make(task.test_size, root.split(1))};
}

ToyClassifier::ToyClassifier(int n_freq, int n_classes, int hidden)
    : n_freq_(n_freq), hidden_(hidden), n_classes_(n_classes),
      w1_(Eigen::MatrixXd::Zero(hidden, n_freq)),
      b1_(Eigen::VectorXd::Zero(hidden)),
      w2_(Eigen::MatrixXd::Zero(n_classes, hidden)),
      b2_(Eigen::VectorXd::Zero(n_classes)) {
  if (n_freq < 1 || n_classes < 2 || hidden < 1)
    throw std::invalid_argument("bad classifier shape");
}

void ToyClassifier::init_params(SplitRng& rng) {
  auto fill = [&rng](Eigen::MatrixXd& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        m(r, c) = rng.uniform() * 0.16 - 0.08;
  };
  fill(w1_);
  fill(w2_);
  b1_.setZero();
  b2_.setZero();
}

Eigen::VectorXd ToyClassifier::pooled(const Spectrogram& s) const {
  if (s.n_freq != n_freq_)
    throw std::invalid_argument("spectrogram n_freq mismatches model");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n_freq_);
  for (int t = 0; t < s.n_time; ++t)
    for (int f = 0; f < n_freq_; ++f) x[f] += s.at(t, f);
  return x / static_cast<double>(s.n_time);
}

namespace {

// Stable softmax probabilities from logits.
Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
  Eigen::VectorXd p = (z.array() - z.maxCoeff()).exp();
  return p / p.sum();
}

}  // namespace

std::pair<double, Eigen::VectorXd> ToyClassifier::loss_and_grad(
    const Batch& batch) const {
  const std::size_t n = batch.specs.size();
  if (n == 0) throw std::invalid_argument("empty batch");
  if (batch.labels.size() != n)
    throw std::invalid_argument("batch specs/labels size mismatch");

  Eigen::MatrixXd dw1 = Eigen::MatrixXd::Zero(hidden_, n_freq_);
  Eigen::VectorXd db1 = Eigen::VectorXd::Zero(hidden_);
  Eigen::MatrixXd dw2 = Eigen::MatrixXd::Zero(n_classes_, hidden_);
  Eigen::VectorXd db2 = Eigen::VectorXd::Zero(n_classes_);
  double loss_sum = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);

  for (std::size_t i = 0; i < n; ++i) {
    const int label = batch.labels[i];
    if (label < 0 || label >= n_classes_)
      throw std::invalid_argument("label out of range");
    const Eigen::VectorXd x = pooled(batch.specs[i]);
    const Eigen::VectorXd a1 = w1_ * x + b1_;
    const Eigen::VectorXd h = a1.cwiseMax(0.0);
    const Eigen::VectorXd z = w2_ * h + b2_;
    const Eigen::VectorXd p = softmax(z);
    loss_sum += -std::log(std::max(p[label], 1e-300));

    Eigen::VectorXd dz = p * inv_n;
    dz[label] -= inv_n;
    dw2 += dz * h.transpose();
    db2 += dz;
    Eigen::VectorXd dh = w2_.transpose() * dz;
    for (int j = 0; j < hidden_; ++j)
      if (a1[j] <= 0.0) dh[j] = 0.0;
    dw1 += dh * x.transpose();
    db1 += dh;
  }

  Eigen::VectorXd grad(n_params());
  Eigen::Index off = 0;
  auto pack = [&](const auto& m) {
    grad.segment(off, m.size()) =
        Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
    off += m.size();
  };
  pack(dw1);
  pack(db1);
  pack(dw2);
  pack(db2);
  return {loss_sum * inv_n, grad};
}

double ToyClassifier::loss(const Batch& batch) const {
  return loss_and_grad(batch).first;
}

void ToyClassifier::apply_step(const Eigen::VectorXd& grad, double lr) {
  if (grad.size() != static_cast<Eigen::Index>(n_params()))
    throw std::invalid_argument("gradient size mismatch");
  if (!grad.allFinite())
    throw std::invalid_argument("non-finite gradient");
  Eigen::VectorXd p = snapshot();
  p -= lr * grad;
  restore(p);
}

int ToyClassifier::predict(const Spectrogram& s) const {
  const Eigen::VectorXd h = (w1_ * pooled(s) + b1_).cwiseMax(0.0);
  const Eigen::VectorXd z = w2_ * h + b2_;
  Eigen::Index best = 0;
  z.maxCoeff(&best);
  return static_cast<int>(best);
}

double ToyClassifier::evaluate(const Dataset& data) const {
  if (data.specs.empty()) throw std::invalid_argument("empty dataset");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.specs.size(); ++i)
    if (predict(data.specs[i]) == data.labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(data.specs.size());
}

std::size_t ToyClassifier::n_params() const {
  return static_cast<std::size_t>(w1_.size() + b1_.size() + w2_.size() +
                                  b2_.size());
}

Eigen::VectorXd ToyClassifier::snapshot() const {
  Eigen::VectorXd p(n_params());
  Eigen::Index off = 0;
  auto pack = [&](const auto& m) {
    p.segment(off, m.size()) =
        Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
    off += m.size();
  };
  pack(w1_);
  pack(b1_);
  pack(w2_);
  pack(b2_);
  return p;
}

void ToyClassifier::restore(const Eigen::VectorXd& params) {
  if (params.size() != static_cast<Eigen::Index>(n_params()))
    throw std::invalid_argument("parameter size mismatch");
  Eigen::Index off = 0;
  auto unpack = [&](auto& m) {
    Eigen::Map<Eigen::VectorXd>(m.data(), m.size()) =
        params.segment(off, m.size());
    off += m.size();
  };
  unpack(w1_);
  unpack(b1_);
  unpack(w2_);
  unpack(b2_);
}

namespace {
constexpr char kTraineeMagic[] = "ATC1";

void write_tensor(ByteWriter& w, const Eigen::VectorXd& v) {
  w.u32(1);
  w.u32(static_cast<std::uint32_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    w.f32(static_cast<float>(v[i]));
}

Eigen::VectorXd read_vector(ByteReader& r) {
  if (r.u32() != 1) throw std::runtime_error("checkpoint: expected rank 1");
  const auto n = r.u32();
  Eigen::VectorXd v(n);
  for (std::uint32_t i = 0; i < n; ++i) v[i] = r.f32();
  return v;
}

}  // namespace

void save_trainee(const std::filesystem::path& path, const ToyClassifier& m) {
  ByteWriter w;
  w.str(kTraineeMagic);
  w.u32(static_cast<std::uint32_t>(m.n_freq()));
  w.u32(static_cast<std::uint32_t>(m.hidden()));
  w.u32(static_cast<std::uint32_t>(m.n_classes()));
  const Eigen::VectorXd p = m.snapshot();
  write_tensor(w, p);
  atomic_write_file(path, w.data());
}

ToyClassifier load_trainee(const std::filesystem::path& path) {
  ByteReader r(read_file(path));
  if (r.str(4) != kTraineeMagic)
    throw std::runtime_error(path.string() + ": not an ATC1 file");
  const int n_freq = static_cast<int>(r.u32());
  const int hidden = static_cast<int>(r.u32());
  const int n_classes = static_cast<int>(r.u32());
  ToyClassifier m(n_freq, n_classes, hidden);
  const Eigen::VectorXd p = read_vector(r);
  m.restore(p);
  if (!r.at_end())
    throw std::runtime_error(path.string() + ": trailing bytes");
  return m;
}

}  // namespace augrl
