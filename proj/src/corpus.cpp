#include "simt/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/core.h>
#include <json.hpp>

namespace simt {

namespace {

constexpr std::uint64_t kTableSalt = 0x7ab1e5a17ULL;
constexpr std::uint64_t kSentenceSalt = 0x5e97e9ce5ULL;

// Probability that a sentence carries an ambiguous token's trigger at the
// disambiguation position; 1/2 keeps both rule branches equally likely.
constexpr double kTriggerPlantProb = 0.5;

}  // namespace

void SyntheticTaskSpec::validate() const {
  if (src_vocab_size < 1)
    throw ConfigError("synthetic task: src_vocab_size must be >= 1");
  if (ambiguous_fraction < 0.0 || ambiguous_fraction > 1.0)
    throw ConfigError(fmt::format(
        "synthetic task: ambiguous_fraction {} outside [0,1]",
        ambiguous_fraction));
  if (ambiguous_fraction > 0.0 && disambiguator_distance < 1)
    throw ConfigError(
        "synthetic task: disambiguator_distance must be >= 1 when the task "
        "has ambiguous tokens");
  if (min_sentence_len < 1 || min_sentence_len > max_sentence_len)
    throw ConfigError(fmt::format(
        "synthetic task: bad sentence length range [{},{}]", min_sentence_len,
        max_sentence_len));
}

std::vector<std::string> RuleTable::target_vocab() const {
  std::set<std::string> targets;
  for (const auto& [tok, tgt] : plain) targets.insert(tgt);
  for (const auto& [tok, rule] : ambiguous) {
    targets.insert(rule.on_trigger);
    targets.insert(rule.otherwise);
  }
  return {targets.begin(), targets.end()};
}

RuleTable build_rule_table(const SyntheticTaskSpec& spec) {
  spec.validate();
  RuleTable table;
  table.distance = spec.disambiguator_distance;

  const std::size_t v = spec.src_vocab_size;
  table.source_vocab.reserve(v);
  for (std::size_t i = 0; i < v; ++i)
    table.source_vocab.push_back(fmt::format("w{}", i));

  Rng rng(derive_seed(spec.seed, kTableSalt));

  // Pick which tokens are ambiguous by a seeded Fisher-Yates shuffle.
  std::vector<std::size_t> order(v);
  for (std::size_t i = 0; i < v; ++i) order[i] = i;
  for (std::size_t i = v; i > 1; --i)
    std::swap(order[i - 1], order[uniform_index(rng, i)]);
  const auto n_ambiguous = static_cast<std::size_t>(
      std::llround(spec.ambiguous_fraction * static_cast<double>(v)));

  std::vector<bool> is_ambiguous(v, false);
  for (std::size_t i = 0; i < n_ambiguous; ++i) is_ambiguous[order[i]] = true;

  for (std::size_t i = 0; i < v; ++i) {
    const std::string& tok = table.source_vocab[i];
    if (is_ambiguous[i]) {
      AmbiguousRule rule;
      rule.trigger = table.source_vocab[uniform_index(rng, v)];
      rule.on_trigger = fmt::format("W{}A", i);
      rule.otherwise = fmt::format("W{}B", i);
      table.ambiguous.emplace(tok, rule);
    } else {
      table.plain.emplace(tok, fmt::format("W{}", i));
    }
  }
  return table;
}

TokenSeq reference_translate(const TokenSeq& source, const RuleTable& table) {
  TokenSeq out;
  out.reserve(source.size());
  for (std::size_t j = 0; j < source.size(); ++j) {
    const std::string& tok = source[j];
    if (auto it = table.plain.find(tok); it != table.plain.end()) {
      out.push_back(it->second);
      continue;
    }
    auto it = table.ambiguous.find(tok);
    if (it == table.ambiguous.end())
      throw DataError(fmt::format("token '{}' not in rule table", tok));
    const AmbiguousRule& rule = it->second;
    const std::size_t look = j + table.distance;
    if (look < source.size() && source[look] == rule.trigger)
      out.push_back(rule.on_trigger);
    else
      out.push_back(rule.otherwise);
  }
  return out;
}

TokenSeq reference_translate(const TokenSeq& source,
                             const SyntheticTaskSpec& spec) {
  return reference_translate(source, build_rule_table(spec));
}

std::vector<ParallelExample> gen_synthetic(const SyntheticTaskSpec& spec,
                                           std::size_t n) {
  spec.validate();
  if (n < 1) throw ConfigError("gen_synthetic: n must be >= 1");
  const RuleTable table = build_rule_table(spec);
  Rng rng(derive_seed(spec.seed, kSentenceSalt));

  std::vector<ParallelExample> out;
  out.reserve(n);
  const std::size_t span = spec.max_sentence_len - spec.min_sentence_len + 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = spec.min_sentence_len + uniform_index(rng, span);
    TokenSeq source(len);
    for (auto& tok : source)
      tok = table.source_vocab[uniform_index(rng, table.source_vocab.size())];
    // Plant triggers so the disambiguation branches actually fire.
    for (std::size_t j = 0; j < len; ++j) {
      auto it = table.ambiguous.find(source[j]);
      if (it == table.ambiguous.end()) continue;
      const std::size_t look = j + table.distance;
      if (look < len && u01(rng) < kTriggerPlantProb)
        source[look] = it->second.trigger;
    }
    ParallelExample ex;
    ex.source = std::move(source);
    ex.reference = reference_translate(ex.source, table);
    ex.id = fmt::format("syn-{:06d}", i);
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<ParallelExample> load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open corpus file '{}'", path));
  std::vector<ParallelExample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(
          fmt::format("{}:{}: malformed JSONL record: {}", path, lineno,
                      e.what()));
    }
    if (!rec.is_object() || !rec.contains("source") ||
        !rec.contains("reference"))
      throw ParseError(fmt::format(
          "{}:{}: record must be an object with 'source' and 'reference'",
          path, lineno));
    ParallelExample ex;
    ex.source = split_tokens(rec.at("source").get<std::string>());
    ex.reference = split_tokens(rec.at("reference").get<std::string>());
    ex.id = rec.value("id", fmt::format("line-{}", lineno));
    if (ex.source.empty())
      throw DataError(fmt::format("{}:{}: empty source", path, lineno));
    if (ex.reference.empty())
      throw DataError(fmt::format("{}:{}: empty reference", path, lineno));
    out.push_back(std::move(ex));
  }
  return out;
}

void save_jsonl(const std::string& path,
                const std::vector<ParallelExample>& examples) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write corpus file '{}'", path));
  for (const auto& ex : examples) {
    nlohmann::json rec{{"id", ex.id},
                       {"source", join_tokens(ex.source)},
                       {"reference", join_tokens(ex.reference)}};
    out << rec.dump() << '\n';
  }
}

void save_rule_table(const std::string& path, const RuleTable& table) {
  nlohmann::json rules = nlohmann::json::object();
  for (const auto& [tok, tgt] : table.plain) rules[tok] = {{"target", tgt}};
  for (const auto& [tok, rule] : table.ambiguous)
    rules[tok] = {{"trigger", rule.trigger},
                  {"on_trigger", rule.on_trigger},
                  {"otherwise", rule.otherwise}};
  nlohmann::json doc{{"distance", table.distance},
                     {"source_vocab", table.source_vocab},
                     {"rules", rules}};
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write rule table '{}'", path));
  out << doc.dump(2) << '\n';
}

RuleTable load_rule_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open rule table '{}'", path));
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("{}: malformed rule table: {}", path,
                                 e.what()));
  }
  RuleTable table;
  try {
    table.distance = doc.at("distance").get<std::size_t>();
    table.source_vocab = doc.at("source_vocab").get<std::vector<std::string>>();
    for (const auto& [tok, rule] : doc.at("rules").items()) {
      if (rule.contains("target")) {
        table.plain.emplace(tok, rule.at("target").get<std::string>());
      } else {
        AmbiguousRule r{rule.at("trigger").get<std::string>(),
                        rule.at("on_trigger").get<std::string>(),
                        rule.at("otherwise").get<std::string>()};
        table.ambiguous.emplace(tok, r);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("{}: bad rule table field: {}", path,
                                 e.what()));
  }
  return table;
}

}  // namespace simt
