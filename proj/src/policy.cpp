#include "simt/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/core.h>
#include <json.hpp>

namespace simt {

Vocab Vocab::from_tokens(std::vector<std::string> toks) {
  std::sort(toks.begin(), toks.end());
  toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
  Vocab v;
  v.tokens = std::move(toks);
  for (std::size_t i = 0; i < v.tokens.size(); ++i)
    v.index.emplace(v.tokens[i], static_cast<int>(i));
  return v;
}

namespace {

// Preserves the stored order; used when reloading checkpoints.
Vocab vocab_from_ordered(std::vector<std::string> toks) {
  Vocab v;
  v.tokens = std::move(toks);
  for (std::size_t i = 0; i < v.tokens.size(); ++i)
    v.index.emplace(v.tokens[i], static_cast<int>(i));
  if (v.index.size() != v.tokens.size())
    throw ParseError("vocabulary contains duplicate tokens");
  return v;
}

}  // namespace

double PolicyParameters::norm() const {
  double s = 0.0;
  for (double x : w) s += x * x;
  return std::sqrt(s);
}

SoftmaxPolicy::SoftmaxPolicy(Vocab source_vocab, Vocab target_vocab)
    : src_vocab_(std::move(source_vocab)), tgt_vocab_(std::move(target_vocab)) {
  if (tgt_vocab_.size() == 0)
    throw ConfigError("policy: empty target vocabulary");
  const std::size_t vs = src_vocab_.size();
  const std::size_t vt = tgt_vocab_.size();
  off_next_ = 0;
  off_look_ = vs;
  off_next_missing_ = 2 * vs;
  off_look_missing_ = 2 * vs + 1;
  off_last_tgt_ = 2 * vs + 2;
  off_nothing_emitted_ = off_last_tgt_ + vt;
  off_lag_ = off_nothing_emitted_ + 1;
  off_progress_ = off_lag_ + kLagBuckets;
  off_final_ = off_progress_ + 1;
  off_bias_ = off_final_ + 1;
  feature_dim_ = off_bias_ + 1;
  n_actions_ = vt + 1;  // +1 for END-STEP
  params_ = PolicyParameters::zeros(feature_dim_, n_actions_);
}

FeatureVector SoftmaxPolicy::featurize(const DecisionContext& ctx) const {
  FeatureVector fv(feature_dim_, 0.0);
  const std::size_t read = ctx.source_read.size();
  const std::size_t emitted = ctx.history.size() + ctx.within_step.size();

  // Translation-cursor heuristic: the next unconsumed source position is
  // the count of target tokens emitted so far.
  if (emitted < read) {
    const int idx = src_vocab_.lookup(ctx.source_read[emitted]);
    if (idx >= 0) fv[off_next_ + static_cast<std::size_t>(idx)] = 1.0;
  } else {
    fv[off_next_missing_] = 1.0;
  }
  if (emitted + 1 < read) {
    const int idx = src_vocab_.lookup(ctx.source_read[emitted + 1]);
    if (idx >= 0) fv[off_look_ + static_cast<std::size_t>(idx)] = 1.0;
  } else {
    fv[off_look_missing_] = 1.0;
  }

  const std::string* last = nullptr;
  if (!ctx.within_step.empty())
    last = &ctx.within_step.back();
  else if (!ctx.history.empty())
    last = &ctx.history.back();
  if (last != nullptr) {
    const int idx = tgt_vocab_.lookup(*last);
    if (idx >= 0) fv[off_last_tgt_ + static_cast<std::size_t>(idx)] = 1.0;
  } else {
    fv[off_nothing_emitted_] = 1.0;
  }

  const long lag = static_cast<long>(read) - static_cast<long>(emitted);
  std::size_t bucket = 0;
  if (lag >= static_cast<long>(kLagBuckets) - 1)
    bucket = kLagBuckets - 1;
  else if (lag > 0)
    bucket = static_cast<std::size_t>(lag);
  fv[off_lag_ + bucket] = 1.0;

  fv[off_progress_] =
      ctx.total_steps > 0
          ? static_cast<double>(ctx.step_index) /
                static_cast<double>(ctx.total_steps)
          : 1.0;
  if (ctx.step_index == ctx.total_steps) fv[off_final_] = 1.0;
  fv[off_bias_] = 1.0;
  return fv;
}

std::vector<double> SoftmaxPolicy::action_logprobs(
    const FeatureVector& fv) const {
  std::vector<double> z(n_actions_, 0.0);
  for (std::size_t f = 0; f < feature_dim_; ++f) {
    const double x = fv[f];
    if (x == 0.0) continue;
    const double* row = params_.w.data() + f * n_actions_;
    for (std::size_t a = 0; a < n_actions_; ++a) z[a] += x * row[a];
  }
  const double m = *std::max_element(z.begin(), z.end());
  if (!std::isfinite(m))
    throw NumericError("policy logits are not finite");
  double sum = 0.0;
  for (double za : z) sum += std::exp(za - m);
  const double log_norm = m + std::log(sum);
  for (double& za : z) za -= log_norm;
  return z;
}

std::vector<double> SoftmaxPolicy::token_distribution(
    const FeatureVector& fv) const {
  std::vector<double> p = action_logprobs(fv);
  for (double& lp : p) lp = std::exp(lp);
  return p;
}

int SoftmaxPolicy::action_of(const std::string& token) const {
  const int idx = tgt_vocab_.lookup(token);
  if (idx < 0)
    throw DataError(
        fmt::format("token '{}' not in the policy's target vocabulary",
                    token));
  return idx;
}

template <typename Visitor>
void SoftmaxPolicy::walk_emission(const DecisionContext& ctx,
                                  const Emission& emission,
                                  Visitor&& visit) const {
  DecisionContext cur = ctx;
  for (const auto& tok : emission.tokens) {
    visit(cur, static_cast<std::size_t>(action_of(tok)));
    cur.within_step.push_back(tok);
  }
  if (emission.ended_by_stop) visit(cur, end_action());
}

Emission SoftmaxPolicy::sample_emission(const DecisionContext& ctx, Rng& rng,
                                        std::size_t max_tokens) const {
  Emission e;
  DecisionContext cur = ctx;
  while (true) {
    if (e.tokens.size() >= max_tokens) {
      // Cap reached: the step ends without an END-STEP sample and the
      // emission's log-probability covers only the emitted tokens.
      e.ended_by_stop = false;
      return e;
    }
    const std::vector<double> lps = action_logprobs(featurize(cur));
    const double u = u01(rng);
    double acc = 0.0;
    std::size_t a = n_actions_ - 1;
    for (std::size_t i = 0; i < n_actions_; ++i) {
      acc += std::exp(lps[i]);
      if (u < acc) {
        a = i;
        break;
      }
    }
    e.token_logprobs.push_back(lps[a]);
    if (a == end_action()) {
      e.ended_by_stop = true;
      return e;
    }
    e.tokens.push_back(tgt_vocab_.tokens[a]);
    cur.within_step.push_back(tgt_vocab_.tokens[a]);
  }
}

Emission SoftmaxPolicy::greedy_emission(const DecisionContext& ctx,
                                        std::size_t max_tokens) const {
  Emission e;
  DecisionContext cur = ctx;
  while (true) {
    if (e.tokens.size() >= max_tokens) {
      e.ended_by_stop = false;
      return e;
    }
    const std::vector<double> lps = action_logprobs(featurize(cur));
    const std::size_t a = static_cast<std::size_t>(
        std::max_element(lps.begin(), lps.end()) - lps.begin());
    e.token_logprobs.push_back(lps[a]);
    if (a == end_action()) {
      e.ended_by_stop = true;
      return e;
    }
    e.tokens.push_back(tgt_vocab_.tokens[a]);
    cur.within_step.push_back(tgt_vocab_.tokens[a]);
  }
}

double SoftmaxPolicy::emission_logprob(const DecisionContext& ctx,
                                       const Emission& emission) const {
  double total = 0.0;
  walk_emission(ctx, emission,
                [&](const DecisionContext& cur, std::size_t a) {
                  total += action_logprobs(featurize(cur))[a];
                });
  return total;
}

void SoftmaxPolicy::accumulate_grad_logprob(const DecisionContext& ctx,
                                            const Emission& emission,
                                            double coeff,
                                            PolicyParameters& grad) const {
  if (grad.n_features != feature_dim_ || grad.n_actions != n_actions_)
    throw UsageError("gradient accumulator has mismatched shape");
  walk_emission(ctx, emission,
                [&](const DecisionContext& cur, std::size_t a) {
                  const FeatureVector fv = featurize(cur);
                  const std::vector<double> p = token_distribution(fv);
                  for (std::size_t f = 0; f < feature_dim_; ++f) {
                    const double x = fv[f];
                    if (x == 0.0) continue;
                    double* row = grad.w.data() + f * n_actions_;
                    for (std::size_t b = 0; b < n_actions_; ++b) {
                      const double ind = (b == a) ? 1.0 : 0.0;
                      row[b] += coeff * x * (ind - p[b]);
                    }
                  }
                });
}

PolicyParameters SoftmaxPolicy::grad_logprob(const DecisionContext& ctx,
                                             const Emission& emission) const {
  PolicyParameters grad = PolicyParameters::zeros(feature_dim_, n_actions_);
  accumulate_grad_logprob(ctx, emission, 1.0, grad);
  return grad;
}

void SoftmaxPolicy::save_checkpoint(const std::string& path) const {
  nlohmann::json doc{{"n_features", params_.n_features},
                     {"n_actions", params_.n_actions},
                     {"weights", params_.w},
                     {"source_vocab", src_vocab_.tokens},
                     {"target_vocab", tgt_vocab_.tokens}};
  std::ofstream out(path);
  if (!out)
    throw DataError(fmt::format("cannot write checkpoint '{}'", path));
  out << doc.dump() << '\n';
}

SoftmaxPolicy SoftmaxPolicy::load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open checkpoint '{}'", path));
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(
        fmt::format("{}: malformed checkpoint: {}", path, e.what()));
  }
  try {
    SoftmaxPolicy policy(
        vocab_from_ordered(doc.at("source_vocab").get<std::vector<std::string>>()),
        vocab_from_ordered(doc.at("target_vocab").get<std::vector<std::string>>()));
    const auto nf = doc.at("n_features").get<std::size_t>();
    const auto na = doc.at("n_actions").get<std::size_t>();
    if (nf != policy.feature_dim() || na != policy.n_actions())
      throw ParseError(fmt::format(
          "{}: checkpoint dimensions {}x{} do not match the vocabulary "
          "layout {}x{}",
          path, nf, na, policy.feature_dim(), policy.n_actions()));
    auto w = doc.at("weights").get<std::vector<double>>();
    if (w.size() != nf * na)
      throw ParseError(fmt::format("{}: weight count {} != {}x{}", path,
                                   w.size(), nf, na));
    policy.params_.w = std::move(w);
    return policy;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(
        fmt::format("{}: bad checkpoint field: {}", path, e.what()));
  }
}

Emission waitk_emission(std::size_t k, const DecisionContext& ctx,
                        const WaitKTranslator& translator) {
  if (k < 1) throw ConfigError("wait-k: k must be >= 1");
  const std::size_t read = ctx.source_read.size();
  const std::size_t done = ctx.history.size();
  const bool final_step = ctx.step_index == ctx.total_steps;

  std::size_t want = 0;
  if (final_step)
    want = read;  // flush everything that remains
  else if (read >= k)
    want = read - k + 1;

  Emission e;
  for (std::size_t pos = done; pos < want; ++pos)
    e.tokens.push_back(translator(ctx.source_read, pos));
  return e;
}

}  // namespace simt
