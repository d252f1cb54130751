#ifndef SIMT_METRICS_HPP
#define SIMT_METRICS_HPP

#include <functional>
#include <string>
#include <vector>

#include "simt/common.hpp"
#include "simt/sampler.hpp"

namespace simt {

// Read/write schedule of one trajectory: g[j] is the number of source
// tokens that had been read when hypothesis token j+1 was emitted.
struct LagProfile {
  std::vector<std::size_t> g;  // non-decreasing, each in [1, src_len]
  std::size_t src_len = 0;
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
};

LagProfile lag_profile(const Trajectory& traj);

// Average lagging, in source tokens:
//   AL = (1/tau) * sum_{j=1..tau} [ g(j) - (j-1)/gamma ],
// gamma = hyp_len/src_len, tau = first j with g(j) = src_len (falls back
// to hyp_len when the hypothesis finishes before the source is exhausted).
double average_lagging(const LagProfile& p);

// Length-adaptive variant: gamma = max(hyp_len, ref_len)/src_len.
double laal(const LagProfile& p);

// Bag-of-token F1 on the 0..100 scale (multiset intersection). Empty
// hypothesis scores 0.
double quality_token_f1(const TokenSeq& hyp, const TokenSeq& ref);

// 100 * |longest common prefix| / ref_len; order-sensitive.
double quality_exact_prefix(const TokenSeq& hyp, const TokenSeq& ref);

// Bag-of-token recall on the 0..100 scale. Insensitive to extra
// hypothesis tokens, so padding is quality-free under this scorer.
double quality_token_recall(const TokenSeq& hyp, const TokenSeq& ref);

using QualityFn =
    std::function<double(const TokenSeq& hyp, const TokenSeq& ref)>;
using LatencyFn = std::function<double(const Trajectory& traj)>;

// Names: "token-f1", "exact-prefix", "token-recall".
QualityFn quality_by_name(const std::string& name);

double latency_al(const Trajectory& traj);
double latency_laal(const Trajectory& traj);

}  // namespace simt

#endif  // SIMT_METRICS_HPP
