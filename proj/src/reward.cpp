#include "simt/reward.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "simt/csv.hpp"

namespace simt {

TruncationMode truncation_from_name(const std::string& name) {
  if (name == "clip-raw") return TruncationMode::ClipRaw;
  if (name == "as-written") return TruncationMode::AsWritten;
  if (name == "none") return TruncationMode::None;
  throw ConfigError(fmt::format(
      "unknown truncation mode '{}' (expected clip-raw, as-written, or none)",
      name));
}

std::string truncation_name(TruncationMode mode) {
  switch (mode) {
    case TruncationMode::ClipRaw:
      return "clip-raw";
    case TruncationMode::AsWritten:
      return "as-written";
    case TruncationMode::None:
      return "none";
  }
  throw ConfigError("unhandled truncation mode");
}

void RewardConfig::validate() const {
  if (lambda <= 0.0) throw ConfigError("lambda must be > 0");
  if (epsilon_std <= 0.0) throw ConfigError("epsilon_std must be > 0");
  if (chunk_size < 1) throw ConfigError("chunk size must be >= 1");
}

double RewardBreakdown::mean_kl() const {
  if (kl_per_step.empty()) return 0.0;
  double s = 0.0;
  for (double d : kl_per_step) s += d;
  return s / static_cast<double>(kl_per_step.size());
}

std::vector<double> normalize_group(const std::vector<double>& values,
                                    double epsilon_std) {
  const std::size_t n = values.size();
  if (n < 2)
    throw ConfigError("group normalization needs at least two values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);  // population variance
  const double std_dev = std::sqrt(var);
  std::vector<double> out(n, 0.0);
  if (std_dev < epsilon_std) return out;
  for (std::size_t i = 0; i < n; ++i) out[i] = (values[i] - mean) / std_dev;
  return out;
}

std::vector<double> truncate_latency(const std::vector<double>& raw,
                                     const RewardConfig& cfg) {
  const double floor = static_cast<double>(cfg.chunk_size);
  switch (cfg.truncation) {
    case TruncationMode::ClipRaw: {
      std::vector<double> clipped = raw;
      for (double& v : clipped) v = std::max(floor, v);
      return normalize_group(clipped, cfg.epsilon_std);
    }
    case TruncationMode::AsWritten: {
      std::vector<double> z = normalize_group(raw, cfg.epsilon_std);
      for (double& v : z) v = std::max(floor, v);
      return z;
    }
    case TruncationMode::None:
      return normalize_group(raw, cfg.epsilon_std);
  }
  throw ConfigError("unhandled truncation mode");
}

double fuse(double q, double L, double lambda) { return lambda * q - L; }

double kl_step(double logprob_theta, double logprob_ref) {
  return logprob_theta - logprob_ref;
}

std::vector<RewardBreakdown> group_rewards(const GroupSample& gs,
                                           const QualityFn& quality_fn,
                                           const LatencyFn& latency_fn,
                                           const RewardConfig& cfg) {
  cfg.validate();
  const std::size_t n = gs.trajectories.size();
  if (n < 2) throw ConfigError("reward needs a group of at least two");

  std::vector<RewardBreakdown> out(n);
  std::vector<double> qualities(n), latencies(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Trajectory& traj = gs.trajectories[i];
    RewardBreakdown& b = out[i];
    try {
      b.L_hat = latency_fn(traj);
      b.q_hat = quality_fn(traj.hypothesis, traj.source.reference);
    } catch (const EmptyHypothesisError&) {
      b.empty_hypothesis = true;
      b.q_hat = 0.0;
      b.L_hat = static_cast<double>(traj.source_len());
    }
    for (const auto& s : traj.steps)
      b.kl_per_step.push_back(kl_step(s.logprob_theta, s.logprob_ref));
    qualities[i] = b.q_hat;
    latencies[i] = b.L_hat;
  }

  const std::vector<double> q = normalize_group(qualities, cfg.epsilon_std);
  const std::vector<double> L = truncate_latency(latencies, cfg);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].q = q[i];
    out[i].L = L[i];
    out[i].r_T = fuse(q[i], L[i], cfg.lambda);
  }
  return out;
}

void save_rewards_csv(const std::vector<RewardBreakdown>& rows,
                      const std::string& path) {
  CsvTable table;
  table.header = {"q_hat", "L_hat", "q", "L", "r_T", "mean_KL",
                  "empty_hypothesis"};
  for (const auto& b : rows) {
    table.rows.push_back({csv_number(b.q_hat), csv_number(b.L_hat),
                          csv_number(b.q), csv_number(b.L),
                          csv_number(b.r_T), csv_number(b.mean_kl()),
                          b.empty_hypothesis ? "1" : "0"});
  }
  write_csv(table, path);
}

}  // namespace simt
