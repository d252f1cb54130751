#ifndef SIMT_EVAL_HPP
#define SIMT_EVAL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "simt/corpus.hpp"
#include "simt/metrics.hpp"
#include "simt/policy.hpp"
#include "simt/trainer.hpp"

namespace simt {

struct EvalReport {
  std::size_t n_examples = 0;
  double mean_quality = 0.0;  // over all examples (empty hypotheses score 0)
  double mean_AL = 0.0;       // over non-empty hypotheses only
  double mean_LAAL = 0.0;     // over non-empty hypotheses only
  double empty_hypothesis_rate = 0.0;
};

// Greedy decoding throughout, so the report is deterministic; the seed
// parameter is accepted for interface symmetry with training but nothing
// consumes it.
EvalReport evaluate(const SoftmaxPolicy& policy,
                    const std::vector<ParallelExample>& dataset,
                    std::size_t chunk_size, const QualityFn& quality_fn,
                    std::size_t max_tokens, std::uint64_t seed = 0);

struct WaitKRow {
  std::size_t k = 0;
  double quality = 0.0;
  double AL = 0.0;
  double LAAL = 0.0;
};

std::vector<WaitKRow> sweep_waitk(const std::vector<std::size_t>& k_values,
                                  const std::vector<ParallelExample>& dataset,
                                  const WaitKTranslator& translator,
                                  std::size_t chunk_size,
                                  const QualityFn& quality_fn);

struct LambdaRow {
  double lambda = 0.0;
  double quality = 0.0;
  double AL = 0.0;
};

// One full training run per lambda, identical seeds; each trained policy
// is then evaluated greedily on eval_data.
std::vector<LambdaRow> sweep_lambda(const std::vector<double>& lambda_values,
                                    const TrainConfig& base_cfg,
                                    const std::vector<ParallelExample>& train_data,
                                    const std::vector<ParallelExample>& eval_data);

void save_waitk_csv(const std::vector<WaitKRow>& rows,
                    const std::string& path);
void save_lambda_csv(const std::vector<LambdaRow>& rows,
                     const std::string& path);

// Word-for-word oracle translator over the synthetic rule table, for
// wait-k baselines: resolves ambiguous tokens from whatever source prefix
// is visible (unresolved falls back to the non-trigger reading).
WaitKTranslator rule_table_translator(const RuleTable& table);

}  // namespace simt

#endif  // SIMT_EVAL_HPP
