#ifndef SIMT_CORPUS_HPP
#define SIMT_CORPUS_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "simt/common.hpp"

namespace simt {

// Configuration for the synthetic transduction task. Each source token maps
// to exactly one target token, except for a controllable fraction of
// "ambiguous" tokens whose correct target depends on the source token
// `disambiguator_distance` positions ahead.
struct SyntheticTaskSpec {
  std::size_t src_vocab_size = 12;
  double ambiguous_fraction = 0.3;
  std::size_t disambiguator_distance = 1;
  std::size_t min_sentence_len = 12;
  std::size_t max_sentence_len = 20;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct ParallelExample {
  TokenSeq source;
  TokenSeq reference;
  std::string id;
};

// Resolution rule for one ambiguous source token: the target is
// `on_trigger` when the token `distance` positions ahead equals `trigger`,
// and `otherwise` in every other case (including "no such position").
struct AmbiguousRule {
  std::string trigger;
  std::string on_trigger;
  std::string otherwise;
};

// The serializable oracle for the synthetic task. reference_translate() is a
// pure positionwise application of these rules.
struct RuleTable {
  std::size_t distance = 1;
  std::vector<std::string> source_vocab;
  std::unordered_map<std::string, std::string> plain;
  std::unordered_map<std::string, AmbiguousRule> ambiguous;

  bool contains(const std::string& token) const {
    return plain.count(token) > 0 || ambiguous.count(token) > 0;
  }
  // All distinct target tokens, sorted.
  std::vector<std::string> target_vocab() const;
};

// Deterministic in the task seed.
RuleTable build_rule_table(const SyntheticTaskSpec& spec);

// Positionwise oracle translation; output length equals input length.
// Throws DataError on a token absent from the table.
TokenSeq reference_translate(const TokenSeq& source, const RuleTable& table);
TokenSeq reference_translate(const TokenSeq& source,
                             const SyntheticTaskSpec& spec);

// n examples, deterministic in spec.seed. Ambiguous positions get their
// trigger planted at +distance with probability 1/2 so both rule branches
// occur at comparable rates.
std::vector<ParallelExample> gen_synthetic(const SyntheticTaskSpec& spec,
                                           std::size_t n);

// JSONL corpus I/O: one {"id", "source", "reference"} object per line,
// whitespace-tokenized on load, line order preserved.
std::vector<ParallelExample> load_jsonl(const std::string& path);
void save_jsonl(const std::string& path,
                const std::vector<ParallelExample>& examples);

void save_rule_table(const std::string& path, const RuleTable& table);
RuleTable load_rule_table(const std::string& path);

}  // namespace simt

#endif  // SIMT_CORPUS_HPP
