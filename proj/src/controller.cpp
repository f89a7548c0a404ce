#include "augrl/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "augrl/io.hpp"

namespace augrl {

TokenVocab::TokenVocab(SearchSpace space) : space_(std::move(space)) {
  validate(space_);
  tokens_.push_back({TokenClass::Start, OperationKind::TimeMask, 0});
  for (auto k : space_.kinds)
    tokens_.push_back({TokenClass::Kind, k, 0});
  for (int v : space_.counts)
    tokens_.push_back({TokenClass::Count, OperationKind::TimeMask, v});
  for (int v : space_.sizes)
    tokens_.push_back({TokenClass::Size, OperationKind::TimeMask, v});
  bool has_warp = false;
  for (auto k : space_.kinds) has_warp = has_warp || is_warp_kind(k);
  if (has_warp)
    for (int v : space_.warps)
      tokens_.push_back({TokenClass::Warp, OperationKind::TimeWarp, v});
}

int TokenVocab::lookup(TokenClass cls, int value, const char* what) const {
  for (std::size_t i = 0; i < tokens_.size(); ++i)
    if (tokens_[i].cls == cls && tokens_[i].value == value)
      return static_cast<int>(i);
  throw std::invalid_argument(std::string(what) + " value " +
                              std::to_string(value) + " has no token");
}

int TokenVocab::kind_token(OperationKind k) const {
  for (std::size_t i = 0; i < tokens_.size(); ++i)
    if (tokens_[i].cls == TokenClass::Kind && tokens_[i].kind == k)
      return static_cast<int>(i);
  throw std::invalid_argument(std::string("kind ") + kind_name(k) +
                              " has no token");
}

int TokenVocab::count_token(int v) const {
  return lookup(TokenClass::Count, v, "count");
}
int TokenVocab::size_token(int v) const {
  return lookup(TokenClass::Size, v, "size");
}
int TokenVocab::warp_token(int v) const {
  return lookup(TokenClass::Warp, v, "warp");
}

std::vector<int> TokenVocab::encode(const Policy& p) const {
  std::vector<int> out;
  for (const auto& op : p.ops) {
    out.push_back(kind_token(op.kind));
    if (is_warp_kind(op.kind)) {
      out.push_back(warp_token(op.warp));
    } else {
      out.push_back(count_token(op.count));
      out.push_back(size_token(op.size));
    }
  }
  return out;
}

Policy TokenVocab::decode(const std::vector<int>& tokens) const {
  GrammarCursor cur(*this);
  for (int t : tokens) cur.advance(t);
  if (!cur.done())
    throw std::invalid_argument("token sequence ends mid-policy");
  return Policy{cur.ops()};
}

GrammarCursor::GrammarCursor(const TokenVocab& vocab) : vocab_(&vocab) {}

bool GrammarCursor::done() const {
  return ops_done_ >= vocab_->space().policy_length;
}

std::vector<char> GrammarCursor::valid_mask() const {
  std::vector<char> mask(vocab_->size(), 0);
  if (done()) return mask;
  for (int t = 0; t < vocab_->size(); ++t) {
    const auto& info = vocab_->info(t);
    switch (expect_) {
      case Expect::Kind:
        if (info.cls == TokenClass::Kind) {
          if (vocab_->space().strict_distinct &&
              std::find(used_kinds_.begin(), used_kinds_.end(), info.kind) !=
                  used_kinds_.end())
            break;
          mask[t] = 1;
        }
        break;
      case Expect::Count:
        if (info.cls == TokenClass::Count) mask[t] = 1;
        break;
      case Expect::Size:
        if (info.cls == TokenClass::Size) mask[t] = 1;
        break;
      case Expect::Warp:
        if (info.cls == TokenClass::Warp) mask[t] = 1;
        break;
    }
  }
  return mask;
}

void GrammarCursor::advance(int token) {
  if (token < 0 || token >= vocab_->size())
    throw std::invalid_argument("token id out of range");
  if (!valid_mask()[token])
    throw std::invalid_argument("token " + std::to_string(token) +
                                " violates the policy grammar here");
  const auto& info = vocab_->info(token);
  switch (expect_) {
    case Expect::Kind:
      cur_kind_ = info.kind;
      used_kinds_.push_back(info.kind);
      expect_ = is_warp_kind(info.kind) ? Expect::Warp : Expect::Count;
      break;
    case Expect::Count:
      cur_count_ = info.value;
      expect_ = Expect::Size;
      break;
    case Expect::Size:
      ops_.push_back(mask_op(cur_kind_, cur_count_, info.value));
      ++ops_done_;
      expect_ = Expect::Kind;
      break;
    case Expect::Warp:
      ops_.push_back(warp_op(info.value));
      ++ops_done_;
      expect_ = Expect::Kind;
      break;
  }
}

std::vector<char> valid_token_mask(const TokenVocab& vocab,
                                   const std::vector<int>& prefix) {
  GrammarCursor cur(vocab);
  for (int t : prefix) cur.advance(t);
  return cur.valid_mask();
}

std::size_t ControllerParams::n_params() const {
  std::size_t n = 0;
  for_each([&n](const auto& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

Eigen::VectorXd ControllerParams::flatten() const {
  Eigen::VectorXd v(n_params());
  Eigen::Index off = 0;
  for_each([&](const auto& m) {
    v.segment(off, m.size()) =
        Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
    off += m.size();
  });
  return v;
}

void ControllerParams::unflatten(const Eigen::VectorXd& v) {
  if (v.size() != static_cast<Eigen::Index>(n_params()))
    throw std::invalid_argument("controller parameter size mismatch");
  Eigen::Index off = 0;
  for_each([&](auto& m) {
    Eigen::Map<Eigen::VectorXd>(m.data(), m.size()) =
        v.segment(off, m.size());
    off += m.size();
  });
}

namespace {

ControllerParams zero_params(int vocab, int hidden, int embed) {
  ControllerParams p;
  p.embed = Eigen::MatrixXd::Zero(embed, vocab);
  p.w_x = Eigen::MatrixXd::Zero(4 * hidden, embed);
  p.w_h = Eigen::MatrixXd::Zero(4 * hidden, hidden);
  p.b = Eigen::VectorXd::Zero(4 * hidden);
  p.w_out = Eigen::MatrixXd::Zero(vocab, hidden);
  p.b_out = Eigen::VectorXd::Zero(vocab);
  return p;
}

}  // namespace

Controller::Controller(TokenVocab vocab, ControllerConfig cfg)
    : vocab_(std::move(vocab)), cfg_(cfg) {
  if (cfg_.hidden < 1 || cfg_.embed < 1)
    throw std::invalid_argument("controller dims must be >= 1");
  params = zero_params(vocab_.size(), cfg_.hidden, cfg_.embed);
  adam_m = params;
  adam_v = params;
}

Controller Controller::random_init(TokenVocab vocab, ControllerConfig cfg,
                                   SplitRng& rng) {
  Controller c(std::move(vocab), cfg);
  auto fill = [&rng](Eigen::MatrixXd& m) {
    for (Eigen::Index col = 0; col < m.cols(); ++col)
      for (Eigen::Index row = 0; row < m.rows(); ++row)
        m(row, col) = rng.uniform() * 0.16 - 0.08;
  };
  fill(c.params.embed);
  fill(c.params.w_x);
  fill(c.params.w_h);
  fill(c.params.w_out);
  // forget-gate bias 1, everything else 0
  c.params.b.segment(cfg.hidden, cfg.hidden).setOnes();
  return c;
}

LstmState Controller::zero_state() const {
  return {Eigen::VectorXd::Zero(cfg_.hidden),
          Eigen::VectorXd::Zero(cfg_.hidden)};
}

namespace {

struct StepCache {
  int prev_tok = 0;
  int chosen = 0;
  double weight = 0.0;  // reward_m / M on this step's log-prob
  std::vector<char> mask;
  Eigen::VectorXd gates;   // 4H: [i f o g] post-activation
  Eigen::VectorXd c_prev, c, tanh_c, h_prev, h;
  Eigen::VectorXd probs;   // masked softmax, zeros at invalid tokens
  double entropy = 0.0;
};

// One recurrent step; writes post-activation gates and the new (h, c).
void cell_forward(const ControllerParams& p, int hidden, int prev_tok,
                  const Eigen::VectorXd& h_prev, const Eigen::VectorXd& c_prev,
                  StepCache& s) {
  const Eigen::VectorXd x = p.embed.col(prev_tok);
  Eigen::VectorXd a = p.w_x * x + p.w_h * h_prev + p.b;
  s.gates.resize(4 * hidden);
  for (int j = 0; j < 3 * hidden; ++j)
    s.gates[j] = 1.0 / (1.0 + std::exp(-a[j]));
  for (int j = 3 * hidden; j < 4 * hidden; ++j) s.gates[j] = std::tanh(a[j]);
  const auto i = s.gates.segment(0, hidden);
  const auto f = s.gates.segment(hidden, hidden);
  const auto o = s.gates.segment(2 * hidden, hidden);
  const auto g = s.gates.segment(3 * hidden, hidden);
  s.prev_tok = prev_tok;
  s.h_prev = h_prev;
  s.c_prev = c_prev;
  s.c = f.cwiseProduct(c_prev) + i.cwiseProduct(g);
  s.tanh_c = s.c.array().tanh();
  s.h = o.cwiseProduct(s.tanh_c);
}

// Masked softmax over valid tokens; invalid entries are exactly zero.
void masked_softmax(const Eigen::VectorXd& logits,
                    const std::vector<char>& mask, Eigen::VectorXd& probs,
                    double& entropy) {
  double zmax = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < logits.size(); ++k)
    if (mask[k] && logits[k] > zmax) zmax = logits[k];
  if (!std::isfinite(zmax))
    throw std::logic_error("masked_softmax: no valid token");
  probs = Eigen::VectorXd::Zero(logits.size());
  double sum = 0.0;
  for (Eigen::Index k = 0; k < logits.size(); ++k)
    if (mask[k]) {
      probs[k] = std::exp(logits[k] - zmax);
      sum += probs[k];
    }
  probs /= sum;
  entropy = 0.0;
  for (Eigen::Index k = 0; k < logits.size(); ++k)
    if (mask[k]) entropy -= probs[k] * std::log(probs[k]);
}

int draw_categorical(const Eigen::VectorXd& probs,
                     const std::vector<char>& mask, SplitRng& rng) {
  const double u = rng.uniform();
  double cdf = 0.0;
  int last_valid = -1;
  for (Eigen::Index k = 0; k < probs.size(); ++k) {
    if (!mask[k]) continue;
    last_valid = static_cast<int>(k);
    cdf += probs[k];
    if (u < cdf) return static_cast<int>(k);
  }
  return last_valid;  // guards against cdf rounding just below 1
}

}  // namespace

SampledPolicy sample_policy(const Controller& c, LstmState& state,
                            SplitRng& rng) {
  const int hidden = c.config().hidden;
  GrammarCursor cur(c.vocab());
  SampledPolicy out;
  int prev = c.vocab().start_token();
  while (!cur.done()) {
    StepCache s;
    cell_forward(c.params, hidden, prev, state.h, state.c, s);
    state.h = s.h;
    state.c = s.c;
    const Eigen::VectorXd logits = c.params.w_out * s.h + c.params.b_out;
    const auto mask = cur.valid_mask();
    Eigen::VectorXd probs;
    double entropy = 0.0;
    masked_softmax(logits, mask, probs, entropy);
    const int tok = draw_categorical(probs, mask, rng);
    out.tokens.push_back(tok);
    out.log_prob += std::log(probs[tok]);
    out.step_entropies.push_back(entropy);
    cur.advance(tok);
    prev = tok;
  }
  out.policy = Policy{cur.ops()};
  return out;
}

double log_prob(const Controller& c, const LstmState& start, const Policy& p) {
  const int hidden = c.config().hidden;
  const std::vector<int> tokens = c.vocab().encode(p);
  GrammarCursor cur(c.vocab());
  LstmState state = start;
  double lp = 0.0;
  int prev = c.vocab().start_token();
  for (int tok : tokens) {
    StepCache s;
    cell_forward(c.params, hidden, prev, state.h, state.c, s);
    state.h = s.h;
    state.c = s.c;
    const Eigen::VectorXd logits = c.params.w_out * s.h + c.params.b_out;
    const auto mask = cur.valid_mask();
    if (!mask[tok])
      throw std::invalid_argument("policy token violates grammar");
    Eigen::VectorXd probs;
    double entropy = 0.0;
    masked_softmax(logits, mask, probs, entropy);
    lp += std::log(probs[tok]);
    cur.advance(tok);
    prev = tok;
  }
  return lp;
}

Eigen::VectorXd step_distribution(const Controller& c, const LstmState& start,
                                  const std::vector<int>& prefix) {
  const int hidden = c.config().hidden;
  GrammarCursor cur(c.vocab());
  LstmState state = start;
  int prev = c.vocab().start_token();
  for (int tok : prefix) {
    StepCache s;
    cell_forward(c.params, hidden, prev, state.h, state.c, s);
    state.h = s.h;
    state.c = s.c;
    cur.advance(tok);
    prev = tok;
  }
  if (cur.done())
    throw std::invalid_argument("prefix already completes the policy");
  StepCache s;
  cell_forward(c.params, hidden, prev, state.h, state.c, s);
  const Eigen::VectorXd logits = c.params.w_out * s.h + c.params.b_out;
  Eigen::VectorXd probs;
  double entropy = 0.0;
  masked_softmax(logits, cur.valid_mask(), probs, entropy);
  return probs;
}

namespace {

// Teacher-forced replay of the sampled chain; fills one StepCache per token.
std::vector<StepCache> forward_chain(const Controller& c,
                                     const LstmState& start,
                                     const std::vector<SampledPolicy>& samples,
                                     const std::vector<double>& rewards) {
  if (samples.empty())
    throw std::invalid_argument("reinforce: empty sample list");
  if (samples.size() != rewards.size())
    throw std::invalid_argument("reinforce: samples/rewards size mismatch");
  for (double r : rewards)
    if (!std::isfinite(r))
      throw std::invalid_argument("reinforce: non-finite reward");

  const int hidden = c.config().hidden;
  const double inv_m = 1.0 / static_cast<double>(samples.size());
  std::vector<StepCache> steps;
  LstmState state = start;
  for (std::size_t m = 0; m < samples.size(); ++m) {
    GrammarCursor cur(c.vocab());
    int prev = c.vocab().start_token();
    for (int tok : samples[m].tokens) {
      StepCache s;
      cell_forward(c.params, hidden, prev, state.h, state.c, s);
      state.h = s.h;
      state.c = s.c;
      const Eigen::VectorXd logits = c.params.w_out * s.h + c.params.b_out;
      s.mask = cur.valid_mask();
      if (!s.mask[tok])
        throw std::invalid_argument("sampled token violates grammar");
      masked_softmax(logits, s.mask, s.probs, s.entropy);
      s.chosen = tok;
      s.weight = rewards[m] * inv_m;
      steps.push_back(std::move(s));
      cur.advance(tok);
      prev = tok;
    }
    if (!cur.done())
      throw std::invalid_argument("sampled token sequence ends mid-policy");
  }
  return steps;
}

}  // namespace

double reinforce_objective(const Controller& c, const LstmState& start,
                           const std::vector<SampledPolicy>& samples,
                           const std::vector<double>& rewards) {
  const auto steps = forward_chain(c, start, samples, rewards);
  double g = 0.0, mean_entropy = 0.0;
  for (const auto& s : steps) {
    g += s.weight * std::log(s.probs[s.chosen]);
    mean_entropy += s.entropy;
  }
  mean_entropy /= static_cast<double>(steps.size());
  return g - c.config().entropy_weight * mean_entropy;
}

Eigen::VectorXd reinforce_gradient(const Controller& c,
                                   const LstmState& start,
                                   const std::vector<SampledPolicy>& samples,
                                   const std::vector<double>& rewards) {
  const int hidden = c.config().hidden;
  const double lambda = c.config().entropy_weight;
  const auto steps = forward_chain(c, start, samples, rewards);
  const double inv_t = 1.0 / static_cast<double>(steps.size());

  ControllerParams grad = zero_params(c.vocab().size(), hidden,
                                      c.config().embed);
  Eigen::VectorXd dh_carry = Eigen::VectorXd::Zero(hidden);
  Eigen::VectorXd dc_carry = Eigen::VectorXd::Zero(hidden);

  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    const StepCache& s = *it;
    // d objective / d logits at this step; invalid tokens contribute zero.
    Eigen::VectorXd dz = Eigen::VectorXd::Zero(c.vocab().size());
    for (Eigen::Index k = 0; k < dz.size(); ++k) {
      if (!s.mask[k]) continue;
      const double p = s.probs[k];
      dz[k] = s.weight * ((k == s.chosen ? 1.0 : 0.0) - p);
      if (lambda != 0.0 && p > 0.0)
        dz[k] -= lambda * inv_t * (-p * (std::log(p) + s.entropy));
    }
    grad.w_out += dz * s.h.transpose();
    grad.b_out += dz;
    Eigen::VectorXd dh = c.params.w_out.transpose() * dz + dh_carry;

    const auto i = s.gates.segment(0, hidden);
    const auto f = s.gates.segment(hidden, hidden);
    const auto o = s.gates.segment(2 * hidden, hidden);
    const auto g = s.gates.segment(3 * hidden, hidden);

    const Eigen::VectorXd dc =
        (dh.cwiseProduct(o).array() * (1.0 - s.tanh_c.array().square()))
            .matrix() +
        dc_carry;
    Eigen::VectorXd da(4 * hidden);
    da.segment(0, hidden) =
        dc.cwiseProduct(g).cwiseProduct(i).cwiseProduct(
            (1.0 - i.array()).matrix());
    da.segment(hidden, hidden) =
        dc.cwiseProduct(s.c_prev).cwiseProduct(f).cwiseProduct(
            (1.0 - f.array()).matrix());
    da.segment(2 * hidden, hidden) =
        dh.cwiseProduct(s.tanh_c).cwiseProduct(o).cwiseProduct(
            (1.0 - o.array()).matrix());
    da.segment(3 * hidden, hidden) =
        dc.cwiseProduct(i).cwiseProduct((1.0 - g.array().square()).matrix());

    const Eigen::VectorXd x = c.params.embed.col(s.prev_tok);
    grad.w_x += da * x.transpose();
    grad.w_h += da * s.h_prev.transpose();
    grad.b += da;
    grad.embed.col(s.prev_tok) += c.params.w_x.transpose() * da;
    dh_carry = c.params.w_h.transpose() * da;
    dc_carry = dc.cwiseProduct(f);
  }
  return grad.flatten();
}

void reinforce_update(Controller& c, const LstmState& start,
                      const std::vector<SampledPolicy>& samples,
                      const std::vector<double>& rewards) {
  const Eigen::VectorXd g = reinforce_gradient(c, start, samples, rewards);
  if ((g.array() == 0.0).all()) return;  // skip: moments stay untouched
  if (!g.allFinite())
    throw std::runtime_error("reinforce: non-finite gradient");

  c.adam_step += 1;
  const auto& cfg = c.config();
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(c.adam_step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(c.adam_step));

  Eigen::VectorXd m = c.adam_m.flatten();
  Eigen::VectorXd v = c.adam_v.flatten();
  Eigen::VectorXd theta = c.params.flatten();
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
  theta -= cfg.eta *
           ((m / bc1).array() / ((v / bc2).array().sqrt() + cfg.adam_eps))
               .matrix();
  if (!theta.allFinite())
    throw std::runtime_error("reinforce: non-finite parameters after update");
  c.adam_m.unflatten(m);
  c.adam_v.unflatten(v);
  c.params.unflatten(theta);
}

double controller_entropy(const Controller& c, int n_samples, SplitRng& rng) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  double sum = 0.0;
  std::size_t steps = 0;
  for (int i = 0; i < n_samples; ++i) {
    LstmState state = c.zero_state();
    const SampledPolicy s = sample_policy(c, state, rng);
    for (double e : s.step_entropies) sum += e;
    steps += s.step_entropies.size();
  }
  return sum / static_cast<double>(steps);
}

namespace {

constexpr char kControllerMagic[] = "APC1";

void write_tensor(ByteWriter& w, const Eigen::MatrixXd& m) {
  w.u32(2);
  w.u32(static_cast<std::uint32_t>(m.rows()));
  w.u32(static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index col = 0; col < m.cols(); ++col)
    for (Eigen::Index row = 0; row < m.rows(); ++row)
      w.f32(static_cast<float>(m(row, col)));
}

void write_tensor(ByteWriter& w, const Eigen::VectorXd& v) {
  w.u32(1);
  w.u32(static_cast<std::uint32_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    w.f32(static_cast<float>(v[i]));
}

void read_tensor(ByteReader& r, Eigen::MatrixXd& m) {
  if (r.u32() != 2) throw std::runtime_error("checkpoint: expected rank 2");
  const auto rows = r.u32();
  const auto cols = r.u32();
  if (rows != static_cast<std::uint32_t>(m.rows()) ||
      cols != static_cast<std::uint32_t>(m.cols()))
    throw std::runtime_error("checkpoint: tensor shape mismatch");
  for (std::uint32_t col = 0; col < cols; ++col)
    for (std::uint32_t row = 0; row < rows; ++row) m(row, col) = r.f32();
}

void read_tensor(ByteReader& r, Eigen::VectorXd& v) {
  if (r.u32() != 1) throw std::runtime_error("checkpoint: expected rank 1");
  const auto n = r.u32();
  if (n != static_cast<std::uint32_t>(v.size()))
    throw std::runtime_error("checkpoint: tensor shape mismatch");
  for (std::uint32_t i = 0; i < n; ++i) v[i] = r.f32();
}

void write_grid(ByteWriter& w, const std::vector<int>& g) {
  w.u32(static_cast<std::uint32_t>(g.size()));
  for (int v : g) w.u32(static_cast<std::uint32_t>(v));
}

std::vector<int> read_grid(ByteReader& r) {
  const auto n = r.u32();
  if (n > 4096) throw std::runtime_error("checkpoint: grid too large");
  std::vector<int> g(n);
  for (auto& v : g) v = static_cast<int>(r.u32());
  return g;
}

}  // namespace

void save_controller(const std::filesystem::path& path, const Controller& c) {
  ByteWriter w;
  w.str(kControllerMagic);
  w.u32(1);  // format version

  const auto& sp = c.vocab().space();
  w.u32(static_cast<std::uint32_t>(sp.kinds.size()));
  for (auto k : sp.kinds) w.u32(static_cast<std::uint32_t>(k));
  write_grid(w, sp.counts);
  write_grid(w, sp.sizes);
  write_grid(w, sp.warps);
  w.u32(static_cast<std::uint32_t>(sp.policy_length));
  w.u32(sp.strict_distinct ? 1 : 0);

  w.u32(static_cast<std::uint32_t>(c.config().embed));
  w.u32(static_cast<std::uint32_t>(c.config().hidden));
  w.f32(static_cast<float>(c.config().eta));
  w.f32(static_cast<float>(c.config().entropy_weight));

  c.params.for_each([&w](const auto& t) { write_tensor(w, t); });
  c.adam_m.for_each([&w](const auto& t) { write_tensor(w, t); });
  c.adam_v.for_each([&w](const auto& t) { write_tensor(w, t); });
  w.u64(c.adam_step);
  atomic_write_file(path, w.data());
}

Controller load_controller(const std::filesystem::path& path) {
  ByteReader r(read_file(path));
  if (r.str(4) != kControllerMagic)
    throw std::runtime_error(path.string() + ": not an APC1 file");
  if (r.u32() != 1)
    throw std::runtime_error(path.string() + ": unsupported version");

  SearchSpace sp;
  const auto n_kinds = r.u32();
  if (n_kinds > static_cast<std::uint32_t>(kNumOperationKinds))
    throw std::runtime_error(path.string() + ": bad kind count");
  for (std::uint32_t i = 0; i < n_kinds; ++i) {
    const auto k = r.u32();
    if (k >= static_cast<std::uint32_t>(kNumOperationKinds))
      throw std::runtime_error(path.string() + ": bad kind id");
    sp.kinds.push_back(static_cast<OperationKind>(k));
  }
  sp.counts = read_grid(r);
  sp.sizes = read_grid(r);
  sp.warps = read_grid(r);
  sp.policy_length = static_cast<int>(r.u32());
  sp.strict_distinct = r.u32() != 0;

  ControllerConfig cfg;
  cfg.embed = static_cast<int>(r.u32());
  cfg.hidden = static_cast<int>(r.u32());
  cfg.eta = r.f32();
  cfg.entropy_weight = r.f32();

  Controller c(TokenVocab(sp), cfg);
  c.params.for_each([&r](auto& t) { read_tensor(r, t); });
  c.adam_m.for_each([&r](auto& t) { read_tensor(r, t); });
  c.adam_v.for_each([&r](auto& t) { read_tensor(r, t); });
  c.adam_step = r.u64();
  if (!r.at_end())
    throw std::runtime_error(path.string() + ": trailing bytes");
  return c;
}

}  // namespace augrl
