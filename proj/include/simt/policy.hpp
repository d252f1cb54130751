#ifndef SIMT_POLICY_HPP
#define SIMT_POLICY_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "simt/common.hpp"

namespace simt {

// Token <-> index map with a deterministic (sorted, deduplicated) order.
struct Vocab {
  std::vector<std::string> tokens;
  std::unordered_map<std::string, int> index;

  static Vocab from_tokens(std::vector<std::string> toks);
  int lookup(const std::string& tok) const {
    auto it = index.find(tok);
    return it == index.end() ? -1 : it->second;
  }
  std::size_t size() const { return tokens.size(); }
};

// Everything the policy may condition on at one autoregressive position:
// the source chunks read so far, the translation history from previous
// steps, and the tokens already emitted within the current step.
struct DecisionContext {
  TokenSeq source_read;
  TokenSeq history;
  TokenSeq within_step;
  std::size_t step_index = 1;  // t, 1-based
  std::size_t total_steps = 1;  // T
};

using FeatureVector = std::vector<double>;

// Weight table of the featurized softmax policy, row-major
// [feature][action]. The last action column is END-STEP.
struct PolicyParameters {
  std::size_t n_features = 0;
  std::size_t n_actions = 0;
  std::vector<double> w;

  static PolicyParameters zeros(std::size_t features, std::size_t actions) {
    return {features, actions, std::vector<double>(features * actions, 0.0)};
  }
  double& at(std::size_t f, std::size_t a) { return w[f * n_actions + a]; }
  double at(std::size_t f, std::size_t a) const { return w[f * n_actions + a]; }
  double norm() const;
};

// One step's output: zero or more target tokens plus the implicit END-STEP
// decision. `token_logprobs` holds one entry per sampled action, including
// the END-STEP action when it was taken; when the per-step token cap cut
// generation instead, `ended_by_stop` is false and no END-STEP entry exists.
struct Emission {
  TokenSeq tokens;
  std::vector<double> token_logprobs;
  bool ended_by_stop = true;

  double logprob() const {
    double s = 0.0;
    for (double lp : token_logprobs) s += lp;
    return s;
  }
};

// Linear-softmax emission policy over a fixed feature map of the decision
// context. Actions are the target vocabulary plus END-STEP.
//
// Feature layout (deterministic function of the two vocabularies):
//   [0, Vs)        one-hot of the next unconsumed source token; the cursor
//                  is the number of target tokens emitted so far
//   [Vs, 2Vs)      one-hot of the lookahead source token (cursor+1), zero
//                  until that position has been read
//   2Vs            flag: no unconsumed source token under the cursor
//   2Vs+1          flag: lookahead position not read yet
//   [.., ..+Vt)    one-hot of the last emitted target token
//   ..             flag: nothing emitted yet
//   .. (6)         lag buckets over (read - emitted): <=0, 1, 2, 3, 4, >=5
//   ..             step progress t/T
//   ..             flag: final step (t == T)
//   ..             bias (always 1)
class SoftmaxPolicy {
 public:
  SoftmaxPolicy(Vocab source_vocab, Vocab target_vocab);

  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t n_actions() const { return n_actions_; }
  std::size_t end_action() const { return n_actions_ - 1; }
  std::size_t bias_feature() const { return off_bias_; }
  const Vocab& source_vocab() const { return src_vocab_; }
  const Vocab& target_vocab() const { return tgt_vocab_; }
  PolicyParameters& params() { return params_; }
  const PolicyParameters& params() const { return params_; }

  FeatureVector featurize(const DecisionContext& ctx) const;

  // Softmax over vocab + END-STEP; entries positive and summing to 1.
  // Throws NumericError on non-finite logits.
  std::vector<double> token_distribution(const FeatureVector& fv) const;
  std::vector<double> action_logprobs(const FeatureVector& fv) const;

  // Autoregressively samples until END-STEP or max_tokens, recording the
  // exact log-probability of every sampled action. Sampling END-STEP first
  // yields an empty emission (the WAIT decision).
  Emission sample_emission(const DecisionContext& ctx, Rng& rng,
                           std::size_t max_tokens) const;
  // Argmax at every position; used for deterministic evaluation.
  Emission greedy_emission(const DecisionContext& ctx,
                           std::size_t max_tokens) const;

  // Total log-probability of the emission under this policy for the given
  // context; re-scoring a sampled emission reproduces its recorded value
  // exactly. Throws DataError on out-of-vocabulary tokens.
  double emission_logprob(const DecisionContext& ctx,
                          const Emission& emission) const;

  // Analytic gradient of emission_logprob with respect to the weights.
  PolicyParameters grad_logprob(const DecisionContext& ctx,
                                const Emission& emission) const;
  // Adds coeff * grad_logprob into `grad` without allocating.
  void accumulate_grad_logprob(const DecisionContext& ctx,
                               const Emission& emission, double coeff,
                               PolicyParameters& grad) const;

  // Deep, immutable copy for use as the frozen reference policy.
  SoftmaxPolicy snapshot_reference() const { return *this; }

  void save_checkpoint(const std::string& path) const;
  static SoftmaxPolicy load_checkpoint(const std::string& path);

 private:
  int action_of(const std::string& token) const;  // DataError on OOV
  // Walks the emission's autoregressive factorization, calling
  // visit(ctx_features, action) for every recorded action.
  template <typename Visitor>
  void walk_emission(const DecisionContext& ctx, const Emission& emission,
                     Visitor&& visit) const;

  Vocab src_vocab_;
  Vocab tgt_vocab_;
  std::size_t feature_dim_ = 0;
  std::size_t n_actions_ = 0;
  PolicyParameters params_;

  // Feature offsets.
  std::size_t off_next_ = 0;
  std::size_t off_look_ = 0;
  std::size_t off_next_missing_ = 0;
  std::size_t off_look_missing_ = 0;
  std::size_t off_last_tgt_ = 0;
  std::size_t off_nothing_emitted_ = 0;
  std::size_t off_lag_ = 0;
  std::size_t off_progress_ = 0;
  std::size_t off_final_ = 0;
  std::size_t off_bias_ = 0;
};

constexpr std::size_t kLagBuckets = 6;

// Rule-based wait-k baseline. `translator` supplies the target token for a
// source position given the source read so far (positional lookup).
using WaitKTranslator =
    std::function<std::string(const TokenSeq& source_read, std::size_t pos)>;

// Emits nothing until >= k source tokens are read; thereafter one target
// token per newly read source token, flushing the remainder at the final
// step. Throws ConfigError for k < 1.
Emission waitk_emission(std::size_t k, const DecisionContext& ctx,
                        const WaitKTranslator& translator);

}  // namespace simt

#endif  // SIMT_POLICY_HPP
