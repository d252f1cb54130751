#include "simt/eval.hpp"

#include <fmt/core.h>

#include "simt/csv.hpp"
#include "simt/sampler.hpp"

namespace simt {

namespace {

struct MeanAccumulator {
  double sum = 0.0;
  std::size_t n = 0;
  void add(double x) {
    sum += x;
    ++n;
  }
  double mean() const { return n == 0 ? 0.0 : sum / static_cast<double>(n); }
};

}  // namespace

EvalReport evaluate(const SoftmaxPolicy& policy,
                    const std::vector<ParallelExample>& dataset,
                    std::size_t chunk_size, const QualityFn& quality_fn,
                    std::size_t max_tokens, std::uint64_t) {
  if (dataset.empty()) throw ConfigError("evaluation dataset is empty");
  MeanAccumulator quality, al, la;
  std::size_t empties = 0;
  for (const auto& ex : dataset) {
    const Trajectory traj =
        run_episode_greedy(policy, ex, chunk_size, max_tokens);
    quality.add(quality_fn(traj.hypothesis, ex.reference));
    if (traj.hypothesis.empty()) {
      ++empties;
      continue;
    }
    const LagProfile p = lag_profile(traj);
    al.add(average_lagging(p));
    la.add(laal(p));
  }
  EvalReport report;
  report.n_examples = dataset.size();
  report.mean_quality = quality.mean();
  report.mean_AL = al.mean();
  report.mean_LAAL = la.mean();
  report.empty_hypothesis_rate =
      static_cast<double>(empties) / static_cast<double>(dataset.size());
  return report;
}

std::vector<WaitKRow> sweep_waitk(const std::vector<std::size_t>& k_values,
                                  const std::vector<ParallelExample>& dataset,
                                  const WaitKTranslator& translator,
                                  std::size_t chunk_size,
                                  const QualityFn& quality_fn) {
  if (dataset.empty()) throw ConfigError("sweep dataset is empty");
  std::vector<WaitKRow> rows;
  for (std::size_t k : k_values) {
    if (k < 1) throw ConfigError("wait-k: k must be >= 1");
    MeanAccumulator quality, al, la;
    for (const auto& ex : dataset) {
      const Trajectory traj = run_waitk_episode(k, ex, chunk_size, translator);
      quality.add(quality_fn(traj.hypothesis, ex.reference));
      const LagProfile p = lag_profile(traj);
      al.add(average_lagging(p));
      la.add(laal(p));
    }
    rows.push_back(WaitKRow{k, quality.mean(), al.mean(), la.mean()});
  }
  return rows;
}

std::vector<LambdaRow> sweep_lambda(
    const std::vector<double>& lambda_values, const TrainConfig& base_cfg,
    const std::vector<ParallelExample>& train_data,
    const std::vector<ParallelExample>& eval_data) {
  std::vector<LambdaRow> rows;
  const QualityFn quality_fn = quality_by_name(base_cfg.quality);
  for (double lambda : lambda_values) {
    if (lambda <= 0.0) throw ConfigError("lambda must be > 0");
    TrainConfig cfg = base_cfg;
    cfg.lambda = lambda;
    const TrainResult result = train(train_data, cfg);
    const EvalReport report = evaluate(result.policy, eval_data,
                                       cfg.chunk_size, quality_fn,
                                       cfg.max_tokens);
    rows.push_back(LambdaRow{lambda, report.mean_quality, report.mean_AL});
  }
  return rows;
}

void save_waitk_csv(const std::vector<WaitKRow>& rows,
                    const std::string& path) {
  CsvTable table;
  table.header = {"k", "quality", "AL", "LAAL"};
  for (const auto& r : rows)
    table.rows.push_back({fmt::format("{}", r.k), csv_number(r.quality),
                          csv_number(r.AL), csv_number(r.LAAL)});
  write_csv(table, path);
}

void save_lambda_csv(const std::vector<LambdaRow>& rows,
                     const std::string& path) {
  CsvTable table;
  table.header = {"lambda", "quality", "AL"};
  for (const auto& r : rows)
    table.rows.push_back(
        {csv_number(r.lambda), csv_number(r.quality), csv_number(r.AL)});
  write_csv(table, path);
}

WaitKTranslator rule_table_translator(const RuleTable& table) {
  return [table](const TokenSeq& source_read, std::size_t pos) {
    if (pos >= source_read.size())
      throw UsageError("translator asked for an unread source position");
    const std::string& tok = source_read[pos];
    auto plain = table.plain.find(tok);
    if (plain != table.plain.end()) return plain->second;
    auto ambiguous = table.ambiguous.find(tok);
    if (ambiguous == table.ambiguous.end())
      throw DataError(
          fmt::format("source token '{}' is not in the rule table", tok));
    const std::size_t probe = pos + table.distance;
    if (probe < source_read.size() &&
        source_read[probe] == ambiguous->second.trigger)
      return ambiguous->second.on_trigger;
    return ambiguous->second.otherwise;
  };
}

}  // namespace simt
