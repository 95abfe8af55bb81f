#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "topiclite/corpus.hpp"
#include "topiclite/errors.hpp"
#include "topiclite/rng.hpp"

namespace topiclite {

enum class System { full, bf, br, artex };

inline const char* system_name(System s) {
  switch (s) {
    case System::full: return "full";
    case System::bf: return "bf";
    case System::br: return "br";
    default: return "artex";
  }
}

inline std::optional<System> parse_system(std::string_view s) {
  if (s == "full" || s == "FULL") return System::full;
  if (s == "bf" || s == "BF") return System::bf;
  if (s == "br" || s == "BR") return System::br;
  if (s == "artex" || s == "ARTEX") return System::artex;
  return std::nullopt;
}

// Fraction of a document's sentences retained in its summary.
struct CompressionRate {
  double value;
  explicit CompressionRate(double v) : value(v) {
    if (!(v > 0.0 && v <= 1.0)) {
      throw ConfigError("compression rate must be in (0, 1]");
    }
  }
};

struct Summary {
  System system = System::bf;
  double rate = 1.0;
  std::vector<std::size_t> selected;  // strictly increasing sentence indices
  std::string text;
};

// n = max(1, round(rate * p)), rounding half up.
inline std::size_t sentences_for_rate(std::size_t p, CompressionRate rate) {
  auto n = static_cast<std::size_t>(
      std::floor(rate.value * static_cast<double>(p) + 0.5));
  return std::min(p, std::max<std::size_t>(1, n));
}

namespace detail {

inline std::string summary_text(const Document& doc,
                                const std::vector<std::size_t>& selected) {
  std::string text;
  for (auto idx : selected) {
    if (!text.empty()) text += ' ';
    text += doc.sentences[idx].raw;
  }
  return text;
}

}  // namespace detail

// Lead baseline: the first n sentences.
inline Summary summarize_bf(const Document& doc, CompressionRate rate) {
  const std::size_t p = doc.sentences.size();
  const std::size_t n = sentences_for_rate(p, rate);
  Summary s;
  s.system = System::bf;
  s.rate = rate.value;
  s.selected.resize(n);
  std::iota(s.selected.begin(), s.selected.end(), std::size_t{0});
  s.text = detail::summary_text(doc, s.selected);
  return s;
}

// Random baseline: n distinct sentences drawn uniformly without replacement.
// Procedure (replayable): pool = [0..p-1]; for i in 0..n-1 swap pool[i] with
// pool[i + eng() % (p - i)] where eng = mt19937_64(seed); keep pool[0..n-1],
// emit in increasing index order.
inline Summary summarize_br(const Document& doc, CompressionRate rate,
                            std::uint64_t seed) {
  const std::size_t p = doc.sentences.size();
  const std::size_t n = sentences_for_rate(p, rate);
  std::vector<std::size_t> pool(p);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  rng::Engine eng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + rng::bounded(eng, p - i);
    std::swap(pool[i], pool[j]);
  }
  Summary s;
  s.system = System::br;
  s.rate = rate.value;
  s.selected.assign(pool.begin(), pool.begin() + n);
  std::sort(s.selected.begin(), s.selected.end());
  s.text = detail::summary_text(doc, s.selected);
  return s;
}

// ---------------------------------------------------------------------------
// ARTEX
// ---------------------------------------------------------------------------

// Sentence-term count matrix over the document-local vocabulary:
// counts[mu * n + j] = occurrences of local word j in sentence mu.
struct SentenceMatrix {
  std::size_t p = 0;  // sentences
  std::size_t n = 0;  // distinct words in the document
  std::vector<std::int32_t> counts;                // p x n, row-major
  std::vector<std::int32_t> local_to_corpus_word;  // local j -> corpus word id

  std::int32_t at(std::size_t mu, std::size_t j) const {
    return counts[mu * n + j];
  }
};

// Row and column averages of the sentence matrix: pseudo_word[mu] is the
// sentence's average word occurrence count ("lexical weight"), and
// pseudo_sentence[j] is word j's average count across sentences (the
// "global topic" vector).
struct PseudoVectors {
  std::vector<double> pseudo_word;      // length p
  std::vector<double> pseudo_sentence;  // length n
};

struct ArtexVectors {
  SentenceMatrix matrix;
  PseudoVectors pseudo;
};

// Local word ids are assigned in first-occurrence order within the document.
inline SentenceMatrix build_sentence_matrix(const Document& doc) {
  SentenceMatrix m;
  m.p = doc.sentences.size();
  std::unordered_map<std::int32_t, std::size_t> local;
  for (const auto& sent : doc.sentences) {
    for (auto id : sent.tokens) {
      auto [it, inserted] = local.emplace(id, m.local_to_corpus_word.size());
      if (inserted) m.local_to_corpus_word.push_back(id);
    }
  }
  m.n = m.local_to_corpus_word.size();
  if (m.p == 0 || m.n == 0) {
    throw EmptyDocument("build_sentence_matrix: document has no tokens");
  }
  m.counts.assign(m.p * m.n, 0);
  for (std::size_t mu = 0; mu < m.p; ++mu) {
    for (auto id : doc.sentences[mu].tokens) {
      ++m.counts[mu * m.n + local.at(id)];
    }
  }
  return m;
}

inline PseudoVectors build_pseudo_vectors(const SentenceMatrix& m) {
  PseudoVectors v;
  v.pseudo_word.assign(m.p, 0.0);
  v.pseudo_sentence.assign(m.n, 0.0);
  for (std::size_t mu = 0; mu < m.p; ++mu) {
    for (std::size_t j = 0; j < m.n; ++j) {
      const double c = m.at(mu, j);
      v.pseudo_word[mu] += c;
      v.pseudo_sentence[j] += c;
    }
  }
  for (auto& a : v.pseudo_word) a /= static_cast<double>(m.n);
  for (auto& b : v.pseudo_sentence) b /= static_cast<double>(m.p);
  return v;
}

inline ArtexVectors build_artex_vectors(const Document& doc) {
  ArtexVectors v;
  v.matrix = build_sentence_matrix(doc);
  v.pseudo = build_pseudo_vectors(v.matrix);
  return v;
}

// Unnormalized sentence weights:
//   w_mu = 1/(N*p) * (sum_j s_{mu,j} * b_j) * a_mu
//        = (sum_j s_{mu,j} * colsum_j) * rowsum_mu / (N^2 * p^2)
// The numerator is computed in exact integer arithmetic so that equal
// weights compare equal and the ranking is invariant under scaling all
// counts by a positive constant.
inline std::vector<double> artex_raw_weights(const SentenceMatrix& m) {
  std::vector<std::int64_t> colsum(m.n, 0), rowsum(m.p, 0);
  for (std::size_t mu = 0; mu < m.p; ++mu) {
    for (std::size_t j = 0; j < m.n; ++j) {
      const std::int64_t c = m.at(mu, j);
      colsum[j] += c;
      rowsum[mu] += c;
    }
  }
  const double denom = static_cast<double>(m.n) * static_cast<double>(m.n) *
                       static_cast<double>(m.p) * static_cast<double>(m.p);
  std::vector<double> raw(m.p, 0.0);
  for (std::size_t mu = 0; mu < m.p; ++mu) {
    std::int64_t dot = 0;
    for (std::size_t j = 0; j < m.n; ++j) {
      dot += static_cast<std::int64_t>(m.at(mu, j)) * colsum[j];
    }
    raw[mu] = static_cast<double>(dot * rowsum[mu]) / denom;
  }
  return raw;
}

// Min-max normalized scores in [0,1]. When every raw weight is equal the
// scores are all zero and ranking falls back to original order.
inline std::vector<double> artex_weights(const SentenceMatrix& m,
                                         const PseudoVectors& v) {
  if (v.pseudo_word.size() != m.p || v.pseudo_sentence.size() != m.n) {
    throw ConfigError("artex_weights: pseudo vectors inconsistent with matrix");
  }
  std::vector<double> scores = artex_raw_weights(m);
  const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
  const double lo = *lo_it, hi = *hi_it;
  if (hi == lo) {
    std::fill(scores.begin(), scores.end(), 0.0);
    return scores;
  }
  for (auto& s : scores) s = (s - lo) / (hi - lo);
  return scores;
}

// Indices of the top-n weights; ties broken by lower original index. The
// result is in increasing index order.
inline std::vector<std::size_t> top_n_by_weight(const std::vector<double>& w,
                                                std::size_t n) {
  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
  order.resize(std::min(n, order.size()));
  std::sort(order.begin(), order.end());
  return order;
}

inline Summary summarize_artex(const Document& doc, CompressionRate rate) {
  const auto vectors = build_artex_vectors(doc);
  const auto weights = artex_weights(vectors.matrix, vectors.pseudo);
  Summary s;
  s.system = System::artex;
  s.rate = rate.value;
  s.selected =
      top_n_by_weight(weights, sentences_for_rate(doc.sentences.size(), rate));
  s.text = detail::summary_text(doc, s.selected);
  return s;
}

inline Summary summarize(System system, const Document& doc,
                         CompressionRate rate, std::uint64_t seed) {
  switch (system) {
    case System::bf: return summarize_bf(doc, rate);
    case System::br: return summarize_br(doc, rate, seed);
    case System::artex: return summarize_artex(doc, rate);
    default: throw ConfigError("summarize: FULL is not a summarizer");
  }
}

}  // namespace topiclite
