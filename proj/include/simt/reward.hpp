#ifndef SIMT_REWARD_HPP
#define SIMT_REWARD_HPP

#include <string>
#include <vector>

#include "simt/common.hpp"
#include "simt/metrics.hpp"
#include "simt/sampler.hpp"

namespace simt {

// Where the chunk-size floor is applied to the group's latency scores.
//   ClipRaw:   raw latencies are clipped to >= m, then z-scored (default).
//   AsWritten: z-score first, then clip the z-scores to >= m; with small
//              groups the z-score bound (B-1)/sqrt(B) sits below typical
//              chunk sizes, which freezes the latency signal entirely.
//   None:      no floor; plain z-scores.
enum class TruncationMode { ClipRaw, AsWritten, None };

TruncationMode truncation_from_name(const std::string& name);
std::string truncation_name(TruncationMode mode);

struct RewardConfig {
  double lambda = 2.0;
  TruncationMode truncation = TruncationMode::ClipRaw;
  std::size_t chunk_size = 3;
  double epsilon_std = 1e-8;

  void validate() const;
};

struct RewardBreakdown {
  double q_hat = 0.0;  // raw quality
  double L_hat = 0.0;  // raw latency
  double q = 0.0;      // group-normalized quality
  double L = 0.0;      // normalized-and-truncated latency
  double r_T = 0.0;    // fused terminal reward, lambda*q - L
  std::vector<double> kl_per_step;
  bool empty_hypothesis = false;

  double mean_kl() const;
};

// Group z-scores with the population standard deviation. A degenerate
// group (std below epsilon_std) maps to all zeros.
std::vector<double> normalize_group(const std::vector<double>& values,
                                    double epsilon_std);

std::vector<double> truncate_latency(const std::vector<double>& raw,
                                     const RewardConfig& cfg);

double fuse(double q, double L, double lambda);

// Per-step log-ratio penalty for the sampled emission.
double kl_step(double logprob_theta, double logprob_ref);

// Scores every trajectory in the group. An empty-hypothesis member is not
// an error here: it gets quality 0 and the worst latency in range (the
// source length) so the update can push away from it.
std::vector<RewardBreakdown> group_rewards(const GroupSample& gs,
                                           const QualityFn& quality_fn,
                                           const LatencyFn& latency_fn,
                                           const RewardConfig& cfg);

void save_rewards_csv(const std::vector<RewardBreakdown>& rows,
                      const std::string& path);

}  // namespace simt

#endif  // SIMT_REWARD_HPP
