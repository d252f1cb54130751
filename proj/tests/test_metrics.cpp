#include "simt/metrics.hpp"

#include <doctest.h>

#include "simt/eval.hpp"
#include "testutil.hpp"

using namespace simt;
using simt_test::make_example;

namespace {

// Hand-built trajectory: per step a chunk size and an emission size,
// tokens named positionally.
Trajectory build_traj(const std::vector<std::size_t>& chunk_sizes,
                      const std::vector<std::size_t>& emit_sizes,
                      std::size_t ref_len) {
  REQUIRE(chunk_sizes.size() == emit_sizes.size());
  Trajectory traj;
  std::size_t src = 0, hyp = 0;
  for (std::size_t t = 0; t < chunk_sizes.size(); ++t) {
    StepRecord rec;
    rec.step_index = t + 1;
    for (std::size_t i = 0; i < chunk_sizes[t]; ++i)
      rec.chunk.push_back("s" + std::to_string(src++));
    for (std::size_t i = 0; i < emit_sizes[t]; ++i) {
      rec.emission.tokens.push_back("h" + std::to_string(hyp++));
      traj.hypothesis.push_back(rec.emission.tokens.back());
    }
    traj.steps.push_back(std::move(rec));
  }
  traj.source = make_example("x", "y");
  traj.source.source.clear();
  traj.source.reference.clear();
  for (std::size_t i = 0; i < src; ++i)
    traj.source.source.push_back("s" + std::to_string(i));
  for (std::size_t i = 0; i < ref_len; ++i)
    traj.source.reference.push_back("r" + std::to_string(i));
  traj.chunk_size = chunk_sizes.empty() ? 1 : chunk_sizes[0];
  return traj;
}

TokenSeq toks(std::initializer_list<const char*> xs) {
  TokenSeq out;
  for (const char* x : xs) out.emplace_back(x);
  return out;
}

WaitKTranslator identity_translator() {
  return [](const TokenSeq& src, std::size_t pos) { return src[pos]; };
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("lag profile of an offline trajectory is flat at src_len") {
  const Trajectory traj = build_traj({3, 3, 2}, {0, 0, 5}, 5);
  const LagProfile p = lag_profile(traj);
  CHECK(p.src_len == 8);
  CHECK(p.hyp_len == 5);
  CHECK(p.ref_len == 5);
  REQUIRE(p.g.size() == 5);
  for (auto g : p.g) CHECK(g == 8);
}

TEST_CASE("lag profile of an empty hypothesis is empty") {
  const Trajectory traj = build_traj({2, 2}, {0, 0}, 4);
  CHECK(lag_profile(traj).g.empty());
}

TEST_CASE("wait-k schedule with m=1 has g(j) = min(j+k-1, n)") {
  const std::size_t n = 9;
  const auto ex = make_example("a a a a a a a a a", "a a a a a a a a a");
  for (std::size_t k = 1; k <= n; ++k) {
    const Trajectory traj =
        run_waitk_episode(k, ex, 1, identity_translator());
    const LagProfile p = lag_profile(traj);
    REQUIRE(p.hyp_len == n);
    for (std::size_t j = 1; j <= n; ++j)
      CHECK(p.g[j - 1] == std::min(j + k - 1, n));
  }
}

TEST_CASE("offline AL equals src_len exactly") {
  const Trajectory traj = build_traj({5, 5}, {0, 10}, 10);
  const LagProfile p = lag_profile(traj);
  CHECK(average_lagging(p) == 10.0);
  CHECK(laal(p) == 10.0);
}

TEST_CASE("offline AL is src_len regardless of lengths") {
  Rng rng(41);
  for (int iter = 0; iter < 100; ++iter) {
    const std::size_t src = 1 + uniform_index(rng, 30);
    const std::size_t hyp = 1 + uniform_index(rng, 40);
    const std::size_t ref = 1 + uniform_index(rng, 40);
    const Trajectory traj = build_traj({src}, {hyp}, ref);
    const LagProfile p = lag_profile(traj);
    CHECK(average_lagging(p) == static_cast<double>(src));
    CHECK(laal(p) == static_cast<double>(src));
  }
}

TEST_CASE("wait-k AL equals k for m=1 and equal lengths") {
  const auto ex = make_example("a a a a a a a a a a", "a a a a a a a a a a");
  for (std::size_t k = 1; k <= 9; ++k) {
    const Trajectory traj =
        run_waitk_episode(k, ex, 1, identity_translator());
    CHECK(average_lagging(lag_profile(traj)) ==
          doctest::Approx(static_cast<double>(k)).epsilon(1e-9));
  }
}

TEST_CASE("perfect interleave has AL = 1") {
  const Trajectory traj = build_traj({1, 1, 1, 1}, {1, 1, 1, 1}, 4);
  CHECK(average_lagging(lag_profile(traj)) == doctest::Approx(1.0));
}

TEST_CASE("tau falls back to hyp_len when the source is never exhausted "
          "by an emission") {
  // g = [1, 2], src_len = 5: no hypothesis token sees the full source.
  const Trajectory traj = build_traj({1, 1, 3}, {1, 1, 0}, 5);
  const LagProfile p = lag_profile(traj);
  // gamma = 2/5; AL = (1/2) * [(1 - 0) + (2 - 1/(2/5))] = 0.25.
  CHECK(average_lagging(p) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("empty hypothesis raises EmptyHypothesisError") {
  const Trajectory traj = build_traj({2, 2}, {0, 0}, 4);
  const LagProfile p = lag_profile(traj);
  CHECK_THROWS_AS(average_lagging(p), EmptyHypothesisError);
  CHECK_THROWS_AS(laal(p), EmptyHypothesisError);
  CHECK_THROWS_AS(latency_al(traj), EmptyHypothesisError);
}

TEST_CASE("LAAL equals AL iff the hypothesis is the longer side") {
  // Equal lengths: identical gamma.
  const Trajectory eq = build_traj({2, 2}, {2, 2}, 4);
  CHECK(laal(lag_profile(eq)) == average_lagging(lag_profile(eq)));

  // Longer hypothesis: gamma still from hyp_len.
  const Trajectory longer = build_traj({2, 2}, {3, 3}, 4);
  CHECK(laal(lag_profile(longer)) ==
        average_lagging(lag_profile(longer)));

  // Under-generation: LAAL's larger gamma shrinks the subtrahend.
  const Trajectory shorter = build_traj({2, 2}, {1, 1}, 6);
  CHECK(laal(lag_profile(shorter)) >
        average_lagging(lag_profile(shorter)));
}

TEST_CASE("latency metrics see only token counts, not spellings") {
  Trajectory traj = build_traj({2, 2, 1}, {1, 2, 1}, 4);
  const double before = average_lagging(lag_profile(traj));
  for (auto& s : traj.steps) {
    for (auto& t : s.chunk) t = "Z" + t;
    for (auto& t : s.emission.tokens) t = "Q" + t;
  }
  traj.hypothesis.clear();
  for (const auto& s : traj.steps)
    traj.hypothesis.insert(traj.hypothesis.end(), s.emission.tokens.begin(),
                           s.emission.tokens.end());
  CHECK(average_lagging(lag_profile(traj)) == before);
}

TEST_CASE("token F1 scores") {
  CHECK(quality_token_f1(toks({"A", "B", "C"}), toks({"A", "B", "C"})) ==
        100.0);
  CHECK(quality_token_f1(toks({"X", "Y"}), toks({"A", "B"})) == 0.0);
  CHECK(quality_token_f1({}, toks({"A"})) == 0.0);
  // Precision 1, recall 1/2.
  CHECK(quality_token_f1(toks({"A", "B"}), toks({"A", "B", "C", "D"})) ==
        doctest::Approx(66.66666666666667).epsilon(1e-12));
  // Multiset counting: only two of the three copies match.
  CHECK(quality_token_f1(toks({"A", "A", "A"}), toks({"A", "A", "B"})) ==
        doctest::Approx(100.0 * 2.0 / 3.0).epsilon(1e-9));
  CHECK_THROWS_AS(quality_token_f1(toks({"A"}), {}), DataError);
}

TEST_CASE("exact prefix scores") {
  CHECK(quality_exact_prefix(toks({"A", "B"}), toks({"A", "B"})) == 100.0);
  CHECK(quality_exact_prefix(toks({"X", "B"}), toks({"A", "B"})) == 0.0);
  CHECK(quality_exact_prefix(toks({"A", "B", "C", "X"}),
                             toks({"A", "B", "C", "D"})) == 75.0);
  CHECK_THROWS_AS(quality_exact_prefix(toks({"A"}), {}), DataError);
}

TEST_CASE("token recall ignores padding while F1 does not") {
  const TokenSeq ref = toks({"A", "B", "C"});
  const TokenSeq clean = toks({"A", "B", "C"});
  TokenSeq padded = clean;
  for (int i = 0; i < 7; ++i) padded.push_back("junk");

  CHECK(quality_token_recall(clean, ref) == 100.0);
  CHECK(quality_token_recall(padded, ref) == 100.0);
  CHECK(quality_token_f1(padded, ref) < quality_token_f1(clean, ref));
  CHECK(quality_token_recall({}, ref) == 0.0);
  CHECK_THROWS_AS(quality_token_recall(toks({"A"}), {}), DataError);
}

TEST_CASE("scorers resolve by name") {
  const TokenSeq hyp = toks({"A", "X"});
  const TokenSeq ref = toks({"A", "B"});
  CHECK(quality_by_name("token-f1")(hyp, ref) == quality_token_f1(hyp, ref));
  CHECK(quality_by_name("exact-prefix")(hyp, ref) ==
        quality_exact_prefix(hyp, ref));
  CHECK(quality_by_name("token-recall")(hyp, ref) ==
        quality_token_recall(hyp, ref));
  CHECK_THROWS_AS(quality_by_name("bleu"), ConfigError);
}

}  // TEST_SUITE
