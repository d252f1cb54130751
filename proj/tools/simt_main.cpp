// Command-line front end: corpus generation, training, evaluation,
// latency sweeps, and trajectory metrics.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "simt/common.hpp"
#include "simt/corpus.hpp"
#include "simt/csv.hpp"
#include "simt/eval.hpp"
#include "simt/metrics.hpp"
#include "simt/sampler.hpp"
#include "simt/trainer.hpp"

namespace {

void add_train_flags(CLI::App* cmd, simt::TrainConfig& cfg,
                     std::string& truncation) {
  cmd->set_config("--config");
  cmd->add_option("--steps", cfg.steps, "Training steps");
  cmd->add_option("--B", cfg.group_size, "Rollout group size");
  cmd->add_option("--beta", cfg.beta, "KL penalty weight");
  cmd->add_option("--alpha", cfg.alpha, "Learning rate");
  cmd->add_option("--m", cfg.chunk_size, "Source chunk size");
  cmd->add_option("--lambda", cfg.lambda, "Quality weight in the reward");
  cmd->add_option("--max-tokens", cfg.max_tokens,
                  "Per-step emission cap");
  cmd->add_option("--seed", cfg.seed, "Master seed");
  cmd->add_option("--optimizer", cfg.optimizer, "sgd or adam");
  cmd->add_flag("--center-rewards", cfg.center_rewards,
                "Subtract the group-mean reward");
  cmd->add_option("--truncation", truncation,
                  "Latency truncation: clip-raw, as-written, or none");
  cmd->add_option("--quality", cfg.quality,
                  "Quality scorer: token-f1, exact-prefix, or token-recall");
  cmd->add_option("--epsilon-std", cfg.epsilon_std,
                  "Degenerate-group std threshold");
  cmd->add_option("--init-end-step-bias", cfg.init_end_step_bias,
                  "Initial END-STEP logit bias");
  cmd->add_option("--checkpoint-every", cfg.checkpoint_every,
                  "Checkpoint interval in steps (0 = final only)");
  cmd->add_option("--checkpoint", cfg.checkpoint_path,
                  "Checkpoint JSON path");
}

int run(int argc, char** argv) {
  CLI::App app{"Streaming-translation policy laboratory"};
  app.require_subcommand(1);

  // gen
  simt::SyntheticTaskSpec task;
  std::size_t gen_n = 1000;
  std::string gen_out, gen_rules;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic parallel corpus");
  gen->add_option("--n", gen_n, "Number of examples");
  gen->add_option("--vocab", task.src_vocab_size, "Source vocabulary size");
  gen->add_option("--ambiguous-fraction", task.ambiguous_fraction,
                  "Fraction of ambiguous source tokens");
  gen->add_option("--distance", task.disambiguator_distance,
                  "Disambiguator lookahead distance");
  gen->add_option("--min-len", task.min_sentence_len, "Minimum sentence length");
  gen->add_option("--max-len", task.max_sentence_len, "Maximum sentence length");
  gen->add_option("--seed", task.seed, "Corpus seed");
  gen->add_option("--out", gen_out, "Output JSONL path")->required();
  gen->add_option("--rules", gen_rules, "Also save the rule table JSON here");

  // train
  simt::TrainConfig train_cfg;
  std::string train_truncation = "clip-raw";
  std::string train_data, train_log_out;
  auto* tr = app.add_subcommand("train", "Train a streaming policy");
  tr->add_option("--data", train_data, "Training corpus JSONL")->required();
  tr->add_option("--out", train_log_out, "Training log CSV path");
  add_train_flags(tr, train_cfg, train_truncation);

  // eval
  std::string eval_data, eval_ckpt, eval_quality = "token-f1", eval_out;
  std::size_t eval_m = 3, eval_max_tokens = 60;
  std::uint64_t eval_seed = 0;
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint");
  ev->add_option("--data", eval_data, "Evaluation corpus JSONL")->required();
  ev->add_option("--checkpoint", eval_ckpt, "Policy checkpoint JSON")
      ->required();
  ev->add_option("--m", eval_m, "Source chunk size");
  ev->add_option("--quality", eval_quality, "Quality scorer");
  ev->add_option("--max-tokens", eval_max_tokens, "Per-step emission cap");
  ev->add_option("--seed", eval_seed, "Unused under greedy decoding");
  ev->add_option("--out", eval_out, "Optional report CSV path");

  // sweep-waitk
  std::string wk_data, wk_rules, wk_quality = "token-f1", wk_out;
  std::size_t wk_m = 1;
  std::vector<std::size_t> wk_ks{1, 3, 5, 7};
  auto* wk = app.add_subcommand("sweep-waitk",
                                "Quality/latency curve for wait-k baselines");
  wk->add_option("--data", wk_data, "Corpus JSONL")->required();
  wk->add_option("--rules", wk_rules, "Rule table JSON")->required();
  wk->add_option("--k", wk_ks, "k values")->delimiter(',');
  wk->add_option("--m", wk_m, "Source chunk size");
  wk->add_option("--quality", wk_quality, "Quality scorer");
  wk->add_option("--out", wk_out, "Curve CSV path")->required();

  // sweep-lambda
  simt::TrainConfig sl_cfg;
  std::string sl_truncation = "clip-raw";
  std::string sl_data, sl_eval_data, sl_out;
  std::vector<double> sl_lambdas{0.5, 1.0, 2.0, 4.0};
  auto* sl = app.add_subcommand("sweep-lambda",
                                "Train once per lambda and plot the trade-off");
  sl->add_option("--data", sl_data, "Training corpus JSONL")->required();
  sl->add_option("--eval-data", sl_eval_data,
                 "Held-out corpus (defaults to --data)");
  sl->add_option("--lambdas", sl_lambdas, "Lambda values")->delimiter(',');
  sl->add_option("--out", sl_out, "Curve CSV path")->required();
  add_train_flags(sl, sl_cfg, sl_truncation);

  // metrics
  std::string mt_traj, mt_quality = "token-f1", mt_out;
  auto* mt = app.add_subcommand("metrics",
                                "Latency/quality rows from trajectory JSONL");
  mt->add_option("--trajectories", mt_traj, "Trajectory JSONL")->required();
  mt->add_option("--quality", mt_quality, "Quality scorer");
  mt->add_option("--out", mt_out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (gen->parsed()) {
    const auto examples = simt::gen_synthetic(task, gen_n);
    simt::save_jsonl(gen_out, examples);
    if (!gen_rules.empty())
      simt::save_rule_table(gen_rules, simt::build_rule_table(task));
    fmt::print("wrote {} examples to {}\n", examples.size(), gen_out);
    return 0;
  }

  if (tr->parsed()) {
    train_cfg.truncation = simt::truncation_from_name(train_truncation);
    const auto dataset = simt::load_jsonl(train_data);
    const simt::TrainResult result = simt::train(dataset, train_cfg);
    if (!train_log_out.empty())
      simt::write_train_log_csv(result.log, train_log_out);
    const auto& last = result.log.back();
    fmt::print(
        "trained {} steps: mean_reward={} mean_quality_raw={} mean_AL={} "
        "mean_KL={}\n",
        last.step, simt::csv_number(last.mean_reward),
        simt::csv_number(last.mean_quality_raw),
        simt::csv_number(last.mean_AL), simt::csv_number(last.mean_KL));
    return 0;
  }

  if (ev->parsed()) {
    const auto dataset = simt::load_jsonl(eval_data);
    const simt::SoftmaxPolicy policy =
        simt::SoftmaxPolicy::load_checkpoint(eval_ckpt);
    const simt::EvalReport report =
        simt::evaluate(policy, dataset, eval_m,
                       simt::quality_by_name(eval_quality), eval_max_tokens,
                       eval_seed);
    fmt::print(
        "n_examples={}\nmean_quality={}\nmean_AL={}\nmean_LAAL={}\n"
        "empty_hypothesis_rate={}\n",
        report.n_examples, simt::csv_number(report.mean_quality),
        simt::csv_number(report.mean_AL), simt::csv_number(report.mean_LAAL),
        simt::csv_number(report.empty_hypothesis_rate));
    if (!eval_out.empty()) {
      simt::CsvTable table;
      table.header = {"n_examples", "mean_quality", "mean_AL", "mean_LAAL",
                      "empty_hypothesis_rate"};
      table.rows.push_back({fmt::format("{}", report.n_examples),
                            simt::csv_number(report.mean_quality),
                            simt::csv_number(report.mean_AL),
                            simt::csv_number(report.mean_LAAL),
                            simt::csv_number(report.empty_hypothesis_rate)});
      simt::write_csv(table, eval_out);
    }
    return 0;
  }

  if (wk->parsed()) {
    const auto dataset = simt::load_jsonl(wk_data);
    const simt::RuleTable rules = simt::load_rule_table(wk_rules);
    const auto rows =
        simt::sweep_waitk(wk_ks, dataset, simt::rule_table_translator(rules),
                          wk_m, simt::quality_by_name(wk_quality));
    simt::save_waitk_csv(rows, wk_out);
    fmt::print("wrote {} rows to {}\n", rows.size(), wk_out);
    return 0;
  }

  if (sl->parsed()) {
    sl_cfg.truncation = simt::truncation_from_name(sl_truncation);
    const auto train_set = simt::load_jsonl(sl_data);
    const auto eval_set =
        sl_eval_data.empty() ? train_set : simt::load_jsonl(sl_eval_data);
    const auto rows = simt::sweep_lambda(sl_lambdas, sl_cfg, train_set,
                                         eval_set);
    simt::save_lambda_csv(rows, sl_out);
    fmt::print("wrote {} rows to {}\n", rows.size(), sl_out);
    return 0;
  }

  if (mt->parsed()) {
    const auto trajectories = simt::load_trajectories(mt_traj);
    const simt::QualityFn quality_fn = simt::quality_by_name(mt_quality);
    simt::CsvTable table;
    table.header = {"id", "src_len", "hyp_len", "AL", "LAAL", "quality"};
    for (const auto& traj : trajectories) {
      const simt::LagProfile p = simt::lag_profile(traj);
      std::string al, la;
      if (p.hyp_len > 0) {
        al = simt::csv_number(simt::average_lagging(p));
        la = simt::csv_number(simt::laal(p));
      }
      table.rows.push_back(
          {traj.source.id, fmt::format("{}", p.src_len),
           fmt::format("{}", p.hyp_len), al, la,
           simt::csv_number(
               quality_fn(traj.hypothesis, traj.source.reference))});
    }
    simt::write_csv(table, mt_out);
    fmt::print("wrote {} rows to {}\n", table.rows.size(), mt_out);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const simt::UsageError& e) {
    fmt::print(stderr, "usage error: {}\n", e.what());
    return 2;
  } catch (const simt::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
