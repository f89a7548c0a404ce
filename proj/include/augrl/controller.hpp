#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "augrl/policy.hpp"
#include "augrl/rng.hpp"

namespace augrl {

enum class TokenClass { Start, Kind, Count, Size, Warp };

struct TokenInfo {
  TokenClass cls = TokenClass::Start;
  OperationKind kind = OperationKind::TimeMask;  // Kind tokens only
  int value = 0;                                 // Count/Size/Warp tokens
};

// Unified token list derived from a SearchSpace: one start token, one token
// per allowed kind, one per count/size grid value, and one per warp value
// when TimeWarp is allowed. The mapping is bijective and deterministic.
class TokenVocab {
 public:
  explicit TokenVocab(SearchSpace space);

  int size() const { return static_cast<int>(tokens_.size()); }
  int start_token() const { return 0; }
  const TokenInfo& info(int tok) const { return tokens_.at(tok); }
  const SearchSpace& space() const { return space_; }

  int kind_token(OperationKind k) const;
  int count_token(int value) const;
  int size_token(int value) const;
  int warp_token(int value) const;

  // Token sequence of a policy (start token not included).
  std::vector<int> encode(const Policy& p) const;
  Policy decode(const std::vector<int>& tokens) const;

 private:
  int lookup(TokenClass cls, int value, const char* what) const;

  SearchSpace space_;
  std::vector<TokenInfo> tokens_;
};

// Tracks the partial-policy grammar: an operation starts with a kind token;
// mask kinds take a count then a size; TimeWarp takes a warp value; the
// sequence ends after policy_length operations.
class GrammarCursor {
 public:
  explicit GrammarCursor(const TokenVocab& vocab);

  bool done() const;
  std::vector<char> valid_mask() const;  // size vocab(); 1 = allowed
  void advance(int token);               // throws on grammar violation
  const std::vector<OperationSpec>& ops() const { return ops_; }

 private:
  enum class Expect { Kind, Count, Size, Warp };
  const TokenVocab* vocab_;
  Expect expect_ = Expect::Kind;
  OperationKind cur_kind_ = OperationKind::TimeMask;
  int cur_count_ = 0;
  int ops_done_ = 0;
  std::vector<OperationSpec> ops_;
  std::vector<OperationKind> used_kinds_;
};

// Mask over the vocabulary valid after a grammar-consistent token prefix.
std::vector<char> valid_token_mask(const TokenVocab& vocab,
                                   const std::vector<int>& prefix);

struct ControllerConfig {
  int hidden = 128;
  int embed = 32;
  double eta = 0.00035;
  double entropy_weight = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
};

// Embedding + single gated recurrent layer + output projection. Gate rows
// are stacked [input, forget, output, candidate], each `hidden` wide.
struct ControllerParams {
  Eigen::MatrixXd embed;  // embed x vocab
  Eigen::MatrixXd w_x;    // 4*hidden x embed
  Eigen::MatrixXd w_h;    // 4*hidden x hidden
  Eigen::VectorXd b;      // 4*hidden
  Eigen::MatrixXd w_out;  // vocab x hidden
  Eigen::VectorXd b_out;  // vocab

  template <class F>
  void for_each(F&& f) {
    f(embed); f(w_x); f(w_h); f(b); f(w_out); f(b_out);
  }
  template <class F>
  void for_each(F&& f) const {
    f(embed); f(w_x); f(w_h); f(b); f(w_out); f(b_out);
  }

  std::size_t n_params() const;
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& v);
};

// Recurrent cell state threaded through sampling; the trainer carries it
// across epochs (or resets it, by configuration).
struct LstmState {
  Eigen::VectorXd h, c;
};

// Policy network plus its adaptive-moment optimizer state. Sampling and
// scoring take the controller by const reference and may run concurrently;
// reinforce_update writes and must be serialized against them.
class Controller {
 public:
  Controller(TokenVocab vocab, ControllerConfig cfg);  // all-zero parameters

  // Weights uniform [-0.08, 0.08], biases zero except forget-gate bias 1.
  static Controller random_init(TokenVocab vocab, ControllerConfig cfg,
                                SplitRng& rng);

  const TokenVocab& vocab() const { return vocab_; }
  const ControllerConfig& config() const { return cfg_; }
  LstmState zero_state() const;

  ControllerParams params;
  ControllerParams adam_m, adam_v;
  std::uint64_t adam_step = 0;

 private:
  TokenVocab vocab_;
  ControllerConfig cfg_;
};

struct SampledPolicy {
  Policy policy;
  std::vector<int> tokens;  // chosen tokens, start token not included
  double log_prob = 0.0;    // natural log
  std::vector<double> step_entropies;  // nats, one per token
};

// Autoregressive draw; advances `state` past the sampled sequence. Each
// sequence begins with the start-token input, so the state carries context
// from everything sampled before.
SampledPolicy sample_policy(const Controller& c, LstmState& state,
                            SplitRng& rng);

// Teacher-forced log-probability of p scored from `start`; bit-identical to
// the log_prob recorded when p was sampled from that same state.
double log_prob(const Controller& c, const LstmState& start, const Policy& p);

// Next-token distribution after teacher-forcing `prefix` from `start`.
// Invalid tokens carry probability exactly zero.
Eigen::VectorXd step_distribution(const Controller& c, const LstmState& start,
                                  const std::vector<int>& prefix);

// Value and gradient of the update objective
//   G = (1/M) sum_m reward_m * log p(policy_m)  -  lambda * Hbar,
// where Hbar is the mean per-step entropy over the whole sample batch and
// the M sequences are replayed as one chain from `start` (state carries
// across policies exactly as during sampling). Gradients flow through the
// chain by backpropagation through time; `start` itself is a constant.
double reinforce_objective(const Controller& c, const LstmState& start,
                           const std::vector<SampledPolicy>& samples,
                           const std::vector<double>& rewards);
Eigen::VectorXd reinforce_gradient(const Controller& c,
                                   const LstmState& start,
                                   const std::vector<SampledPolicy>& samples,
                                   const std::vector<double>& rewards);

// One adaptive-moment descent step on G. An identically zero gradient is a
// no-op: moments and step counter stay untouched.
void reinforce_update(Controller& c, const LstmState& start,
                      const std::vector<SampledPolicy>& samples,
                      const std::vector<double>& rewards);

// Monte-Carlo mean per-step entropy (nats); each trajectory starts from the
// zero state.
double controller_entropy(const Controller& c, int n_samples, SplitRng& rng);

// "APC1" checkpoint: magic, vocabulary spec, parameter and moment tensors as
// little-endian f32 with dimension headers; bit-exact round trip.
void save_controller(const std::filesystem::path& path, const Controller& c);
Controller load_controller(const std::filesystem::path& path);

}  // namespace augrl
