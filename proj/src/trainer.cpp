#include "simt/trainer.hpp"

#include <cmath>

#include <fmt/core.h>

#include "simt/csv.hpp"
#include "simt/metrics.hpp"

namespace simt {

namespace {

constexpr double kGradClipNorm = 1.0;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

}  // namespace

void TrainConfig::validate() const {
  if (steps < 1) throw ConfigError("steps must be >= 1");
  if (group_size < 2) throw ConfigError("group size must be >= 2");
  if (beta < 0.0) throw ConfigError("beta must be >= 0");
  if (alpha <= 0.0) throw ConfigError("alpha must be > 0");
  if (chunk_size < 1) throw ConfigError("chunk size must be >= 1");
  if (lambda <= 0.0) throw ConfigError("lambda must be > 0");
  if (max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
  if (epsilon_std <= 0.0) throw ConfigError("epsilon_std must be > 0");
  if (optimizer != "sgd" && optimizer != "adam")
    throw ConfigError(
        fmt::format("unknown optimizer '{}' (expected sgd or adam)",
                    optimizer));
  quality_by_name(quality);  // throws on an unknown scorer
}

PolicyParameters policy_gradient(const SoftmaxPolicy& policy,
                                 const GroupSample& gs,
                                 const std::vector<RewardBreakdown>& rewards,
                                 double beta, bool center_rewards) {
  const std::size_t n = gs.trajectories.size();
  if (rewards.size() != n)
    throw UsageError("rewards are not aligned with the group");

  double baseline = 0.0;
  if (center_rewards) {
    for (const auto& b : rewards) baseline += b.r_T;
    baseline /= static_cast<double>(n);
  }

  PolicyParameters grad =
      PolicyParameters::zeros(policy.feature_dim(), policy.n_actions());
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Trajectory& traj = gs.trajectories[i];
    const double r = rewards[i].r_T - baseline;

    // Replay the episode's contexts exactly as the sampler built them.
    DecisionContext ctx;
    ctx.total_steps = traj.steps.size();
    for (std::size_t t = 0; t < traj.steps.size(); ++t) {
      const StepRecord& rec = traj.steps[t];
      ctx.source_read.insert(ctx.source_read.end(), rec.chunk.begin(),
                             rec.chunk.end());
      ctx.step_index = t + 1;
      ctx.within_step.clear();
      const double coeff =
          inv_n * (r - beta * rewards[i].kl_per_step[t]);
      policy.accumulate_grad_logprob(ctx, rec.emission, coeff, grad);
      ctx.history.insert(ctx.history.end(), rec.emission.tokens.begin(),
                         rec.emission.tokens.end());
    }
  }
  return grad;
}

double clip_gradient(PolicyParameters& grad, double max_norm) {
  const double norm = grad.norm();
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (double& g : grad.w) g *= scale;
  }
  return norm;
}

Trainer::Trainer(SoftmaxPolicy policy, TrainConfig cfg)
    : policy_(std::move(policy)),
      ref_(policy_),
      cfg_(std::move(cfg)),
      quality_fn_(quality_by_name(cfg_.quality)),
      adam_m_(PolicyParameters::zeros(policy_.feature_dim(),
                                      policy_.n_actions())),
      adam_v_(PolicyParameters::zeros(policy_.feature_dim(),
                                      policy_.n_actions())) {
  cfg_.validate();
}

TrainLogRow Trainer::step(const ParallelExample& example,
                          std::uint64_t group_seed) {
  const GroupSample gs =
      run_group(policy_, ref_, example, cfg_.group_size, cfg_.chunk_size,
                group_seed, cfg_.max_tokens);

  RewardConfig rcfg;
  rcfg.lambda = cfg_.lambda;
  rcfg.truncation = cfg_.truncation;
  rcfg.chunk_size = cfg_.chunk_size;
  rcfg.epsilon_std = cfg_.epsilon_std;
  const std::vector<RewardBreakdown> rewards =
      group_rewards(gs, quality_fn_, latency_al, rcfg);

  PolicyParameters grad = policy_gradient(policy_, gs, rewards, cfg_.beta,
                                          cfg_.center_rewards);
  ++step_count_;

  TrainLogRow row;
  row.step = step_count_;
  const double inv_n = 1.0 / static_cast<double>(rewards.size());
  for (const auto& b : rewards) {
    row.mean_reward += b.r_T * inv_n;
    row.mean_quality_raw += b.q_hat * inv_n;
    row.mean_AL += b.L_hat * inv_n;
    row.mean_KL += b.mean_kl() * inv_n;
  }
  row.grad_norm = clip_gradient(grad, kGradClipNorm);
  if (!std::isfinite(row.grad_norm)) {
    std::string members;
    for (std::size_t i = 0; i < rewards.size(); ++i)
      members += fmt::format("{}r_T={} KL={}", i == 0 ? "" : ", ",
                             rewards[i].r_T, rewards[i].mean_kl());
    throw NumericError(fmt::format(
        "non-finite gradient at step {} on example '{}' (group: {})",
        step_count_, example.id, members));
  }
  apply_update(grad);
  return row;
}

void Trainer::apply_update(const PolicyParameters& grad) {
  PolicyParameters& p = policy_.params();
  if (cfg_.optimizer == "sgd") {
    for (std::size_t i = 0; i < p.w.size(); ++i)
      p.w[i] += cfg_.alpha * grad.w[i];
    return;
  }
  // Adam, ascent form.
  ++adam_t_;
  const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(adam_t_));
  const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(adam_t_));
  for (std::size_t i = 0; i < p.w.size(); ++i) {
    adam_m_.w[i] = kAdamBeta1 * adam_m_.w[i] + (1.0 - kAdamBeta1) * grad.w[i];
    adam_v_.w[i] =
        kAdamBeta2 * adam_v_.w[i] + (1.0 - kAdamBeta2) * grad.w[i] * grad.w[i];
    const double m_hat = adam_m_.w[i] / bc1;
    const double v_hat = adam_v_.w[i] / bc2;
    p.w[i] += cfg_.alpha * m_hat / (std::sqrt(v_hat) + kAdamEps);
  }
}

SoftmaxPolicy make_initial_policy(const std::vector<ParallelExample>& dataset,
                                  const TrainConfig& cfg) {
  if (dataset.empty()) throw ConfigError("training dataset is empty");
  std::vector<std::string> src_tokens, tgt_tokens;
  for (const auto& ex : dataset) {
    src_tokens.insert(src_tokens.end(), ex.source.begin(), ex.source.end());
    tgt_tokens.insert(tgt_tokens.end(), ex.reference.begin(),
                      ex.reference.end());
  }
  SoftmaxPolicy policy(Vocab::from_tokens(std::move(src_tokens)),
                       Vocab::from_tokens(std::move(tgt_tokens)));
  if (cfg.init_end_step_bias != 0.0) {
    PolicyParameters& p = policy.params();
    p.at(policy.bias_feature(), policy.end_action()) = cfg.init_end_step_bias;
  }
  return policy;
}

TrainResult train(const std::vector<ParallelExample>& dataset,
                  const TrainConfig& cfg) {
  cfg.validate();
  Trainer trainer(make_initial_policy(dataset, cfg), cfg);

  Rng pick_rng(derive_seed(cfg.seed, 0x9121c7));
  std::vector<TrainLogRow> log;
  log.reserve(cfg.steps);
  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    const ParallelExample& ex =
        dataset[uniform_index(pick_rng, dataset.size())];
    const std::uint64_t group_seed = derive_seed(cfg.seed, 0x6e07, step);
    log.push_back(trainer.step(ex, group_seed));
    if (!cfg.checkpoint_path.empty() && cfg.checkpoint_every > 0 &&
        step % cfg.checkpoint_every == 0)
      trainer.policy().save_checkpoint(cfg.checkpoint_path);
  }
  if (!cfg.checkpoint_path.empty())
    trainer.policy().save_checkpoint(cfg.checkpoint_path);
  return TrainResult{trainer.policy(), trainer.reference(), std::move(log)};
}

void write_train_log_csv(const std::vector<TrainLogRow>& log,
                         const std::string& path) {
  CsvTable table;
  table.header = {"step",    "mean_reward", "mean_quality_raw",
                  "mean_AL", "mean_KL",     "grad_norm"};
  for (const auto& row : log) {
    table.rows.push_back({fmt::format("{}", row.step),
                          csv_number(row.mean_reward),
                          csv_number(row.mean_quality_raw),
                          csv_number(row.mean_AL), csv_number(row.mean_KL),
                          csv_number(row.grad_norm)});
  }
  write_csv(table, path);
}

}  // namespace simt
