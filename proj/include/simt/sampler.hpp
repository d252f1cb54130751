#ifndef SIMT_SAMPLER_HPP
#define SIMT_SAMPLER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "simt/common.hpp"
#include "simt/corpus.hpp"
#include "simt/policy.hpp"
#include "simt/stream.hpp"

namespace simt {

// One decision step of an episode: the chunk revealed at step t plus what
// the policy emitted, with the emission's total log-probability under the
// trained policy and the frozen reference.
struct StepRecord {
  std::size_t step_index = 0;  // 1-based, 1..T
  TokenSeq chunk;
  Emission emission;
  double logprob_theta = 0.0;
  double logprob_ref = 0.0;
};

struct Trajectory {
  ParallelExample source;
  std::vector<StepRecord> steps;
  TokenSeq hypothesis;  // concatenation of all step emissions, in order
  std::size_t chunk_size = 0;

  std::size_t source_len() const;
};

struct GroupSample {
  ParallelExample source;
  std::vector<Trajectory> trajectories;
};

// Runs one full episode: reveal chunks one at a time, sample an emission
// per step, and record exact log-probabilities under both policies.
Trajectory run_episode(const SoftmaxPolicy& policy, const SoftmaxPolicy& ref,
                       const ParallelExample& example, std::size_t chunk_size,
                       Rng& rng, std::size_t max_tokens);

// Deterministic episode with argmax decoding; logprob_ref mirrors
// logprob_theta so KL terms vanish.
Trajectory run_episode_greedy(const SoftmaxPolicy& policy,
                              const ParallelExample& example,
                              std::size_t chunk_size, std::size_t max_tokens);

// Rule-based wait-k episode; emissions carry no log-probabilities.
Trajectory run_waitk_episode(std::size_t k, const ParallelExample& example,
                             std::size_t chunk_size,
                             const WaitKTranslator& translator);

// B independent episodes over the same source. Member i runs on its own
// generator seeded from (master_seed, example id, i) so groups reproduce
// regardless of rollout order.
GroupSample run_group(const SoftmaxPolicy& policy, const SoftmaxPolicy& ref,
                      const ParallelExample& example, std::size_t group_size,
                      std::size_t chunk_size, std::uint64_t master_seed,
                      std::size_t max_tokens);

void save_trajectories(const std::vector<Trajectory>& trajectories,
                       const std::string& path);
std::vector<Trajectory> load_trajectories(const std::string& path);

}  // namespace simt

#endif  // SIMT_SAMPLER_HPP
