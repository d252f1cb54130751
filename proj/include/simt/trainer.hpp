#ifndef SIMT_TRAINER_HPP
#define SIMT_TRAINER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "simt/common.hpp"
#include "simt/corpus.hpp"
#include "simt/policy.hpp"
#include "simt/reward.hpp"
#include "simt/sampler.hpp"

namespace simt {

struct TrainConfig {
  std::size_t steps = 1;
  std::size_t group_size = 5;  // B
  double beta = 0.02;          // KL weight
  double alpha = 0.1;          // learning rate
  std::size_t chunk_size = 3;  // m
  double lambda = 2.0;
  std::size_t max_tokens = 60;  // per-step emission cap
  std::uint64_t seed = 0;
  std::string optimizer = "sgd";  // sgd | adam
  bool center_rewards = false;    // subtract the group-mean reward
  TruncationMode truncation = TruncationMode::ClipRaw;
  std::string quality = "token-f1";
  double epsilon_std = 1e-8;
  // Initial logit bias on the END-STEP action; positive values shorten
  // early emissions so the zero-initialized policy does not flood steps
  // with near-uniform token babble.
  double init_end_step_bias = 0.0;
  std::size_t checkpoint_every = 0;  // 0 = final checkpoint only
  std::string checkpoint_path;

  void validate() const;
};

struct TrainLogRow {
  std::size_t step = 0;
  double mean_reward = 0.0;       // group mean of r_T
  double mean_quality_raw = 0.0;  // group mean of q_hat
  double mean_AL = 0.0;           // group mean of raw latency
  double mean_KL = 0.0;           // group mean of per-step KL means
  double grad_norm = 0.0;         // pre-clip gradient norm
};

// g = (1/B) sum_i sum_t (r^i_T - beta * D^i_t) * grad log pi(emission_t).
// With center_rewards the group-mean reward is subtracted from each r^i_T
// before weighting.
PolicyParameters policy_gradient(const SoftmaxPolicy& policy,
                                 const GroupSample& gs,
                                 const std::vector<RewardBreakdown>& rewards,
                                 double beta, bool center_rewards);

// Scales `grad` down to `max_norm` when it exceeds it; returns the
// pre-clip norm.
double clip_gradient(PolicyParameters& grad, double max_norm);

// Owns the trained policy, the frozen reference snapshot, and the
// optimizer state. One step = one group on one example, one ascent update.
class Trainer {
 public:
  Trainer(SoftmaxPolicy policy, TrainConfig cfg);

  TrainLogRow step(const ParallelExample& example, std::uint64_t group_seed);

  const SoftmaxPolicy& policy() const { return policy_; }
  const SoftmaxPolicy& reference() const { return ref_; }

 private:
  void apply_update(const PolicyParameters& grad);

  SoftmaxPolicy policy_;
  SoftmaxPolicy ref_;  // frozen at construction
  TrainConfig cfg_;
  QualityFn quality_fn_;
  PolicyParameters adam_m_;
  PolicyParameters adam_v_;
  std::size_t adam_t_ = 0;
  std::size_t step_count_ = 0;
};

struct TrainResult {
  SoftmaxPolicy policy;
  SoftmaxPolicy reference;
  std::vector<TrainLogRow> log;
};

// Full run: vocabularies from the dataset, zero-initialized weights (plus
// the END-STEP bias), frozen reference at the initial parameters, then
// `steps` single-group updates on seeded-uniform examples.
TrainResult train(const std::vector<ParallelExample>& dataset,
                  const TrainConfig& cfg);

// Convenience: the initial policy `train` would start from.
SoftmaxPolicy make_initial_policy(const std::vector<ParallelExample>& dataset,
                                  const TrainConfig& cfg);

void write_train_log_csv(const std::vector<TrainLogRow>& log,
                         const std::string& path);

}  // namespace simt

#endif  // SIMT_TRAINER_HPP
