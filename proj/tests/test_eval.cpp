#include "simt/eval.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "simt/csv.hpp"
#include "testutil.hpp"

using namespace simt;
using simt_test::make_example;
using simt_test::tiny_policy;

namespace {

// Feature rows of the {a,b,c} -> {A,B,C} policy (see the layout note in
// test_policy.cpp): nothing-emitted flag, final-step flag, bias.
constexpr std::size_t kNothing = 11;
constexpr std::size_t kFinal = 19;
constexpr std::size_t kBias = 20;

std::vector<ParallelExample> toy_dataset() {
  return {make_example("a b", "A B", "e0"), make_example("b c a", "B C A", "e1"),
          make_example("c c b a", "C C B A", "e2"),
          make_example("a c", "A C", "e3")};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("evaluation of an empty dataset is a config error") {
  const SoftmaxPolicy policy = tiny_policy();
  CHECK_THROWS_AS(evaluate(policy, {}, 2, quality_token_f1, 4), ConfigError);
}

TEST_CASE("greedy evaluation is deterministic") {
  SoftmaxPolicy policy = tiny_policy();
  Rng wrng(19);
  simt_test::randomize(policy.params(), wrng);
  const auto data = toy_dataset();
  const EvalReport a = evaluate(policy, data, 2, quality_token_f1, 4);
  const EvalReport b = evaluate(policy, data, 2, quality_token_f1, 4, 999);
  CHECK(a.n_examples == data.size());
  CHECK(a.mean_quality == b.mean_quality);
  CHECK(a.mean_AL == b.mean_AL);
  CHECK(a.mean_LAAL == b.mean_LAAL);
  CHECK(a.empty_hypothesis_rate == b.empty_hypothesis_rate);
}

TEST_CASE("a policy that never emits reports an all-empty evaluation") {
  SoftmaxPolicy policy = tiny_policy();
  policy.params().at(kBias, policy.end_action()) = 20.0;
  const EvalReport rep = evaluate(policy, toy_dataset(), 2, quality_token_f1,
                                  4);
  CHECK(rep.empty_hypothesis_rate == 1.0);
  CHECK(rep.mean_quality == 0.0);
  CHECK(rep.mean_AL == 0.0);
  CHECK(rep.mean_LAAL == 0.0);
}

TEST_CASE("a wait-until-final policy scores the source length as its lag") {
  SoftmaxPolicy policy = tiny_policy();
  // Silent while nothing has been emitted, except on the final step where
  // the emit actions take over.
  policy.params().at(kNothing, policy.end_action()) = 20.0;
  policy.params().at(kFinal, policy.end_action()) = -40.0;
  const std::vector<ParallelExample> data{
      make_example("a b c a", "A B C A", "w0"),
      make_example("b c", "B C", "w1")};
  const EvalReport rep = evaluate(policy, data, 3, quality_token_f1, 3);
  CHECK(rep.empty_hypothesis_rate == 0.0);
  // Everything lands on the final step, so AL and LAAL collapse to the
  // source length: (4 + 2) / 2.
  CHECK(rep.mean_AL == 3.0);
  CHECK(rep.mean_LAAL == 3.0);
}

TEST_CASE("empty and non-empty hypotheses are averaged separately") {
  SoftmaxPolicy policy = tiny_policy();
  // END wins on final steps; elsewhere the tie-break emits tokens up to the
  // cap. A one-chunk source is final immediately, so it stays empty.
  policy.params().at(kFinal, policy.end_action()) = 20.0;
  policy.params().at(kBias, policy.end_action()) = -1.0;
  const std::vector<ParallelExample> data{
      make_example("a b", "A B", "m0"),          // one chunk: empty
      make_example("a b c a", "A B C A", "m1")};  // two chunks: emits
  const EvalReport rep = evaluate(policy, data, 3, quality_token_f1, 2);
  CHECK(rep.empty_hypothesis_rate == 0.5);
  // Non-empty member: hypothesis [A, A] emitted with 3 of 4 words read;
  // AL = ((3-0) + (3-2)) / 2, LAAL = ((3-0) + (3-1)) / 2.
  CHECK(rep.mean_AL == 2.0);
  CHECK(rep.mean_LAAL == 2.5);
  // Quality averages over all examples: (0 + 200/3) / 2.
  CHECK(rep.mean_quality == doctest::Approx(100.0 / 3).epsilon(1e-12));
}

TEST_CASE("the wait-k sweep trades latency for quality on the synthetic "
          "task") {
  SyntheticTaskSpec spec;
  spec.src_vocab_size = 6;
  spec.ambiguous_fraction = 0.5;
  spec.disambiguator_distance = 1;
  spec.min_sentence_len = 4;
  spec.max_sentence_len = 8;
  spec.seed = 13;
  const RuleTable table = build_rule_table(spec);
  const auto data = gen_synthetic(spec, 30);
  const auto translator = rule_table_translator(table);

  const std::vector<std::size_t> ks{1, 2, 4, 8};
  const auto rows = sweep_waitk(ks, data, translator, 1, quality_token_f1);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < ks.size(); ++i) CHECK(rows[i].k == ks[i]);

  // k = 1 guesses some ambiguous tokens; k >= distance + 1 resolves all.
  CHECK(rows[0].quality < 100.0);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].quality == 100.0);

  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i].AL > rows[i - 1].AL);

  // The translator emits exactly one token per source word, so the
  // lag-aware variant changes nothing.
  for (const auto& row : rows) CHECK(row.LAAL == row.AL);

  // k past every sentence length is offline decoding: AL is the mean
  // source length.
  double mean_len = 0.0;
  for (const auto& ex : data) mean_len += static_cast<double>(ex.source.size());
  mean_len /= static_cast<double>(data.size());
  CHECK(rows[3].AL == doctest::Approx(mean_len).epsilon(1e-12));

  CHECK_THROWS_AS(sweep_waitk({0}, data, translator, 1, quality_token_f1),
                  ConfigError);
}

TEST_CASE("the lambda sweep is deterministic and labels its rows") {
  TrainConfig cfg;
  cfg.steps = 25;
  cfg.group_size = 3;
  cfg.chunk_size = 2;
  cfg.alpha = 0.1;
  cfg.max_tokens = 6;
  cfg.seed = 5;
  const auto data = toy_dataset();
  const std::vector<double> lambdas{0.5, 4.0};

  const auto rows = sweep_lambda(lambdas, cfg, data, data);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].lambda == 0.5);
  CHECK(rows[1].lambda == 4.0);
  for (const auto& row : rows) {
    CHECK(std::isfinite(row.quality));
    CHECK(std::isfinite(row.AL));
  }

  const auto again = sweep_lambda(lambdas, cfg, data, data);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].quality == again[i].quality);
    CHECK(rows[i].AL == again[i].AL);
  }
}

TEST_CASE("the rule-table translator resolves from the visible prefix") {
  RuleTable table;
  table.distance = 1;
  table.source_vocab = {"amb", "t", "x"};
  table.plain = {{"x", "X"}, {"t", "T"}};
  table.ambiguous = {{"amb", AmbiguousRule{"t", "P", "Q"}}};
  const auto tr = rule_table_translator(table);

  const TokenSeq all{"amb", "t", "x"};
  CHECK(tr(all, 1) == "T");
  CHECK(tr(all, 2) == "X");
  CHECK(tr(all, 0) == "P");  // trigger visible one position ahead

  CHECK(tr(TokenSeq{"amb", "x"}, 0) == "Q");  // visible, not the trigger
  CHECK(tr(TokenSeq{"amb"}, 0) == "Q");       // probe not yet readable

  CHECK_THROWS_AS(tr(TokenSeq{"amb"}, 1), UsageError);
  CHECK_THROWS_AS(tr(TokenSeq{"zzz"}, 0), DataError);
}

TEST_CASE("sweep CSVs carry fixed headers") {
  const std::vector<WaitKRow> wrows{{1, 50.0, 1.0, 1.5}};
  const std::vector<LambdaRow> lrows{{2.0, 90.0, 3.25}};
  const std::string wp = "eval_test_waitk.csv";
  const std::string lp = "eval_test_lambda.csv";
  save_waitk_csv(wrows, wp);
  save_lambda_csv(lrows, lp);
  CHECK(slurp(wp) == "k,quality,AL,LAAL\n1,50,1,1.5\n");
  CHECK(slurp(lp) == "lambda,quality,AL\n2,90,3.25\n");
  std::remove(wp.c_str());
  std::remove(lp.c_str());
}

TEST_CASE("CSV scalars are shortest-round-trip and quoting is minimal") {
  CHECK(csv_number(1.0) == "1");
  CHECK(csv_number(0.5) == "0.5");
  CHECK(csv_number(100.0 / 3.0) == "33.333333333333336");
  CHECK(csv_quote("plain") == "plain");
  CHECK(csv_quote("a,b") == "\"a,b\"");
  CHECK(csv_quote("q\"o") == "\"q\"\"o\"");
}

}  // TEST_SUITE
