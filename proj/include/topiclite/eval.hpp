#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "topiclite/errors.hpp"
#include "topiclite/lda.hpp"
#include "topiclite/rng.hpp"
#include "topiclite/util.hpp"

namespace topiclite {

struct PerplexityReport {
  double perplexity = 0.0;
  double entropy_nats = 0.0;
  double entropy_bits = 0.0;
  std::size_t n_tokens_scored = 0;   // N_B
  std::size_t n_tokens_skipped = 0;  // unknown words + degenerate documents
  std::size_t n_docs_skipped = 0;    // documents with no scoreable tokens
};

namespace detail {

constexpr std::uint64_t kFoldSeedTag = 0x70657270u;  // per-document fold-in

// FNV-1a over the token ids. Per-document fold-in seeds key off content, not
// position, so scores are invariant under test-set ordering.
inline std::uint64_t hash_tokens(const std::vector<std::int32_t>& tokens) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto t : tokens) {
    h = (h ^ static_cast<std::uint32_t>(t)) * 0x100000001b3ULL;
  }
  return h;
}

struct DocScore {
  double log_prob_sum = 0.0;
  std::size_t scored = 0;
  std::size_t skipped = 0;
  bool degenerate = false;
};

inline DocScore score_document(const TopicModel& model,
                               const std::vector<std::int32_t>& tokens,
                               int fold_sweeps, std::uint64_t doc_seed) {
  DocScore ds;
  std::vector<std::int32_t> known;
  known.reserve(tokens.size());
  for (auto t : tokens) {
    if (t == kUnkId) {
      ++ds.skipped;
    } else {
      known.push_back(t);
    }
  }
  if (known.empty()) {
    ds.degenerate = true;
    ds.skipped = tokens.size();
    return ds;
  }
  const std::vector<double> theta = fold_in(model, known, fold_sweeps, doc_seed);
  const int k_count = model.topics();
  for (auto w : known) {
    double p = 0.0;
    for (int k = 0; k < k_count; ++k) {
      p += theta[k] * model.phi[k][static_cast<std::size_t>(w)];
    }
    ds.log_prob_sum += std::log(p);
    ++ds.scored;
  }
  return ds;
}

}  // namespace detail

// Held-out perplexity: per-document theta by fold-in with phi frozen, then
// perplexity = exp(-(1/N_B) * sum log P(w)) over the scoreable tokens.
// Documents are scored independently (parallel when threads > 1) and reduced
// in document order, so results do not depend on scheduling.
inline PerplexityReport perplexity(const TopicModel& model,
                                   const std::vector<std::vector<std::int32_t>>& test_docs,
                                   int fold_sweeps, std::uint64_t seed,
                                   unsigned threads = 1) {
  if (test_docs.empty()) throw NoScoreableTokens("perplexity: empty test set");

  std::vector<detail::DocScore> scores(test_docs.size());
  parallel_for(test_docs.size(), threads, [&](std::size_t d) {
    scores[d] = detail::score_document(
        model, test_docs[d], fold_sweeps,
        rng::derive_seed(seed, detail::kFoldSeedTag,
                         detail::hash_tokens(test_docs[d])));
  });

  PerplexityReport report;
  double log_sum = 0.0;
  for (const auto& ds : scores) {
    log_sum += ds.log_prob_sum;
    report.n_tokens_scored += ds.scored;
    report.n_tokens_skipped += ds.skipped;
    if (ds.degenerate) ++report.n_docs_skipped;
  }
  if (report.n_tokens_scored == 0) {
    throw NoScoreableTokens("perplexity: no test tokens in model vocabulary");
  }
  report.entropy_nats = -log_sum / static_cast<double>(report.n_tokens_scored);
  report.entropy_bits = report.entropy_nats / std::log(2.0);
  report.perplexity = std::exp(report.entropy_nats);
  return report;
}

// ---------------------------------------------------------------------------
// Topic divergence
// ---------------------------------------------------------------------------

// KL(p || q) = sum_w p_w * ln(p_w / q_w). Requires q_w > 0 wherever p_w > 0;
// beta-smoothed phi rows always satisfy this.
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw ConfigError("kl_divergence: dimension mismatch");
  }
  double sum = 0.0;
  for (std::size_t w = 0; w < p.size(); ++w) {
    if (p[w] == 0.0) continue;
    if (q[w] <= 0.0) {
      throw NonAbsolutelyContinuous(
          "kl_divergence: zero probability in q where p is positive");
    }
    sum += p[w] * std::log(p[w] / q[w]);
  }
  return sum;
}

// Symmetrized KL: (KL(p,q) + KL(q,p)) / 2.
inline double js_divergence(std::span<const double> p, std::span<const double> q) {
  return 0.5 * (kl_divergence(p, q) + kl_divergence(q, p));
}

struct DivergenceReport {
  int topics = 0;
  std::vector<double> pairwise;  // K x K, symmetric, zero diagonal
  double total = 0.0;            // sum over all ordered pairs

  double at(int i, int j) const {
    return pairwise[static_cast<std::size_t>(i) * topics + j];
  }
};

// Pairwise divergence between every ordered pair of topics; the diagonal
// contributes zero and each unordered pair is counted twice in the total.
inline DivergenceReport js_model(const TopicModel& model) {
  DivergenceReport report;
  report.topics = model.topics();
  const auto k_count = static_cast<std::size_t>(report.topics);
  report.pairwise.assign(k_count * k_count, 0.0);
  for (std::size_t i = 0; i < k_count; ++i) {
    for (std::size_t j = i + 1; j < k_count; ++j) {
      const double js = js_divergence(model.phi[i], model.phi[j]);
      report.pairwise[i * k_count + j] = js;
      report.pairwise[j * k_count + i] = js;
      report.total += 2.0 * js;
    }
  }
  return report;
}

}  // namespace topiclite
