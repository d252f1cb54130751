#include "simt/sampler.hpp"

#include <fstream>

#include <fmt/core.h>
#include <json.hpp>

namespace simt {

std::size_t Trajectory::source_len() const {
  std::size_t n = 0;
  for (const auto& s : steps) n += s.chunk.size();
  return n;
}

namespace {

// Shared episode skeleton: reveals chunks in order and lets `decide`
// produce the emission for each step context.
template <typename Decide>
Trajectory drive_episode(const ParallelExample& example,
                         std::size_t chunk_size, Decide&& decide) {
  const ChunkedSource cs = segment(example.source, chunk_size);
  StreamState st;

  Trajectory traj;
  traj.source = example;
  traj.chunk_size = chunk_size;

  DecisionContext ctx;
  ctx.total_steps = cs.steps();
  for (std::size_t t = 1; t <= cs.steps(); ++t) {
    auto chunk = advance(st, cs);
    ctx.source_read.insert(ctx.source_read.end(), chunk->begin(),
                           chunk->end());
    ctx.step_index = t;
    ctx.within_step.clear();

    StepRecord rec;
    rec.step_index = t;
    rec.chunk = *chunk;
    decide(ctx, rec);

    ctx.history.insert(ctx.history.end(), rec.emission.tokens.begin(),
                       rec.emission.tokens.end());
    traj.hypothesis.insert(traj.hypothesis.end(), rec.emission.tokens.begin(),
                           rec.emission.tokens.end());
    traj.steps.push_back(std::move(rec));
  }
  return traj;
}

}  // namespace

Trajectory run_episode(const SoftmaxPolicy& policy, const SoftmaxPolicy& ref,
                       const ParallelExample& example, std::size_t chunk_size,
                       Rng& rng, std::size_t max_tokens) {
  return drive_episode(example, chunk_size,
                       [&](const DecisionContext& ctx, StepRecord& rec) {
                         rec.emission =
                             policy.sample_emission(ctx, rng, max_tokens);
                         rec.logprob_theta = rec.emission.logprob();
                         rec.logprob_ref =
                             ref.emission_logprob(ctx, rec.emission);
                       });
}

Trajectory run_episode_greedy(const SoftmaxPolicy& policy,
                              const ParallelExample& example,
                              std::size_t chunk_size, std::size_t max_tokens) {
  return drive_episode(example, chunk_size,
                       [&](const DecisionContext& ctx, StepRecord& rec) {
                         rec.emission = policy.greedy_emission(ctx, max_tokens);
                         rec.logprob_theta = rec.emission.logprob();
                         rec.logprob_ref = rec.logprob_theta;
                       });
}

Trajectory run_waitk_episode(std::size_t k, const ParallelExample& example,
                             std::size_t chunk_size,
                             const WaitKTranslator& translator) {
  return drive_episode(example, chunk_size,
                       [&](const DecisionContext& ctx, StepRecord& rec) {
                         rec.emission = waitk_emission(k, ctx, translator);
                       });
}

GroupSample run_group(const SoftmaxPolicy& policy, const SoftmaxPolicy& ref,
                      const ParallelExample& example, std::size_t group_size,
                      std::size_t chunk_size, std::uint64_t master_seed,
                      std::size_t max_tokens) {
  if (group_size < 2)
    throw ConfigError(
        "group size must be >= 2 (group normalization is undefined "
        "otherwise)");
  GroupSample gs;
  gs.source = example;
  gs.trajectories.reserve(group_size);
  const std::uint64_t example_key = hash_string(example.id);
  for (std::size_t i = 0; i < group_size; ++i) {
    Rng rng(derive_seed(master_seed, example_key, i));
    gs.trajectories.push_back(
        run_episode(policy, ref, example, chunk_size, rng, max_tokens));
  }
  return gs;
}

void save_trajectories(const std::vector<Trajectory>& trajectories,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path));
  for (const auto& traj : trajectories) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : traj.steps) {
      steps.push_back({{"step_index", s.step_index},
                       {"chunk", s.chunk},
                       {"tokens", s.emission.tokens},
                       {"token_logprobs", s.emission.token_logprobs},
                       {"ended_by_stop", s.emission.ended_by_stop},
                       {"logprob_theta", s.logprob_theta},
                       {"logprob_ref", s.logprob_ref}});
    }
    nlohmann::json row{{"id", traj.source.id},
                       {"source", join_tokens(traj.source.source)},
                       {"reference", join_tokens(traj.source.reference)},
                       {"chunk_size", traj.chunk_size},
                       {"steps", steps}};
    out << row.dump() << '\n';
  }
}

std::vector<Trajectory> load_trajectories(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path));
  std::vector<Trajectory> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
      Trajectory traj;
      traj.source.id = row.at("id").get<std::string>();
      traj.source.source = split_tokens(row.at("source").get<std::string>());
      traj.source.reference =
          split_tokens(row.at("reference").get<std::string>());
      traj.chunk_size = row.at("chunk_size").get<std::size_t>();
      for (const auto& s : row.at("steps")) {
        StepRecord rec;
        rec.step_index = s.at("step_index").get<std::size_t>();
        rec.chunk = s.at("chunk").get<TokenSeq>();
        rec.emission.tokens = s.at("tokens").get<TokenSeq>();
        rec.emission.token_logprobs =
            s.at("token_logprobs").get<std::vector<double>>();
        rec.emission.ended_by_stop = s.at("ended_by_stop").get<bool>();
        rec.logprob_theta = s.at("logprob_theta").get<double>();
        rec.logprob_ref = s.at("logprob_ref").get<double>();
        traj.hypothesis.insert(traj.hypothesis.end(),
                               rec.emission.tokens.begin(),
                               rec.emission.tokens.end());
        traj.steps.push_back(std::move(rec));
      }
      out.push_back(std::move(traj));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(
          fmt::format("{}:{}: bad trajectory row: {}", path, lineno, e.what()));
    }
  }
  return out;
}

}  // namespace simt
