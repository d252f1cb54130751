#include "simt/metrics.hpp"

#include <algorithm>
#include <map>

#include <fmt/core.h>

namespace simt {

LagProfile lag_profile(const Trajectory& traj) {
  LagProfile p;
  p.hyp_len = traj.hypothesis.size();
  p.ref_len = traj.source.reference.size();
  std::size_t read = 0;
  for (const auto& step : traj.steps) {
    read += step.chunk.size();
    for (std::size_t j = 0; j < step.emission.tokens.size(); ++j)
      p.g.push_back(read);
  }
  p.src_len = read;
  return p;
}

namespace {

double lag_mean(const LagProfile& p, double gamma) {
  if (p.hyp_len == 0)
    throw EmptyHypothesisError("latency is undefined for an empty hypothesis");
  std::size_t tau = p.hyp_len;
  for (std::size_t j = 0; j < p.g.size(); ++j) {
    if (p.g[j] == p.src_len) {
      tau = j + 1;
      break;
    }
  }
  double sum = 0.0;
  for (std::size_t j = 1; j <= tau; ++j)
    sum += static_cast<double>(p.g[j - 1]) -
           static_cast<double>(j - 1) / gamma;
  return sum / static_cast<double>(tau);
}

}  // namespace

double average_lagging(const LagProfile& p) {
  const double gamma =
      static_cast<double>(p.hyp_len) / static_cast<double>(p.src_len);
  return lag_mean(p, gamma);
}

double laal(const LagProfile& p) {
  const double gamma =
      static_cast<double>(std::max(p.hyp_len, p.ref_len)) /
      static_cast<double>(p.src_len);
  return lag_mean(p, gamma);
}

namespace {

std::size_t multiset_overlap(const TokenSeq& a, const TokenSeq& b) {
  std::map<std::string, std::size_t> counts;
  for (const auto& tok : a) ++counts[tok];
  std::size_t overlap = 0;
  for (const auto& tok : b) {
    auto it = counts.find(tok);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  return overlap;
}

void require_reference(const TokenSeq& ref) {
  if (ref.empty()) throw DataError("quality scored against an empty reference");
}

}  // namespace

double quality_token_f1(const TokenSeq& hyp, const TokenSeq& ref) {
  require_reference(ref);
  if (hyp.empty()) return 0.0;
  const auto overlap = static_cast<double>(multiset_overlap(hyp, ref));
  if (overlap == 0.0) return 0.0;
  const double precision = overlap / static_cast<double>(hyp.size());
  const double recall = overlap / static_cast<double>(ref.size());
  return 100.0 * 2.0 * precision * recall / (precision + recall);
}

double quality_exact_prefix(const TokenSeq& hyp, const TokenSeq& ref) {
  require_reference(ref);
  std::size_t match = 0;
  while (match < hyp.size() && match < ref.size() &&
         hyp[match] == ref[match])
    ++match;
  return 100.0 * static_cast<double>(match) /
         static_cast<double>(ref.size());
}

double quality_token_recall(const TokenSeq& hyp, const TokenSeq& ref) {
  require_reference(ref);
  if (hyp.empty()) return 0.0;
  return 100.0 * static_cast<double>(multiset_overlap(hyp, ref)) /
         static_cast<double>(ref.size());
}

QualityFn quality_by_name(const std::string& name) {
  if (name == "token-f1") return quality_token_f1;
  if (name == "exact-prefix") return quality_exact_prefix;
  if (name == "token-recall") return quality_token_recall;
  throw ConfigError(fmt::format(
      "unknown quality scorer '{}' (expected token-f1, exact-prefix, or "
      "token-recall)",
      name));
}

double latency_al(const Trajectory& traj) {
  return average_lagging(lag_profile(traj));
}

double latency_laal(const Trajectory& traj) {
  return laal(lag_profile(traj));
}

}  // namespace simt
