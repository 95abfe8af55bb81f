#pragma once

// Deterministic generators for test corpora: documents drawn from a known
// topic model (for recovery checks) and plain-text corpora with a Zipfian
// vocabulary (for pipeline and timing checks).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "topiclite/corpus.hpp"
#include "topiclite/rng.hpp"

namespace testsupport {

inline std::vector<double> dirichlet(topiclite::rng::Engine& eng,
                                     std::size_t dim, double concentration) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> out(dim);
  double sum = 0.0;
  for (auto& x : out) {
    x = gamma(eng);
    sum += x;
  }
  if (sum <= 0.0) {  // all-zero draw is possible for tiny concentration
    out.assign(dim, 1.0 / static_cast<double>(dim));
    return out;
  }
  for (auto& x : out) x /= sum;
  return out;
}

inline std::size_t sample_discrete(topiclite::rng::Engine& eng,
                                   const std::vector<double>& probs) {
  double u = topiclite::rng::unit(eng);
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;
}

// K topic-word rows drawn from a symmetric Dirichlet(beta). Retries until
// each topic's dominant word is distinct so recovery is well-posed.
inline std::vector<std::vector<double>> make_generator_phi(int topics,
                                                           int vocab,
                                                           double beta,
                                                           std::uint64_t seed) {
  topiclite::rng::Engine eng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<std::vector<double>> phi;
    phi.reserve(topics);
    for (int k = 0; k < topics; ++k) {
      phi.push_back(dirichlet(eng, static_cast<std::size_t>(vocab), beta));
    }
    std::vector<std::size_t> tops;
    for (const auto& row : phi) {
      tops.push_back(static_cast<std::size_t>(
          std::max_element(row.begin(), row.end()) - row.begin()));
    }
    std::sort(tops.begin(), tops.end());
    if (std::adjacent_find(tops.begin(), tops.end()) == tops.end()) {
      return phi;
    }
  }
  throw std::runtime_error("make_generator_phi: could not separate topics");
}

inline std::vector<std::vector<std::int32_t>> generate_lda_docs(
    const std::vector<std::vector<double>>& phi, std::size_t n_docs,
    std::size_t doc_len, double alpha, std::uint64_t seed) {
  topiclite::rng::Engine eng(seed);
  std::vector<std::vector<std::int32_t>> docs(n_docs);
  for (auto& doc : docs) {
    const auto theta = dirichlet(eng, phi.size(), alpha);
    doc.reserve(doc_len);
    for (std::size_t i = 0; i < doc_len; ++i) {
      const std::size_t k = sample_discrete(eng, theta);
      doc.push_back(static_cast<std::int32_t>(sample_discrete(eng, phi[k])));
    }
  }
  return docs;
}

// Pronounceable pseudo-words, unique and at least four characters.
inline std::vector<std::string> make_words(std::size_t n) {
  static const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m",
                                  "n", "p", "r", "s", "t", "v", "z"};
  static const char* kNuclei[] = {"a", "e", "i", "o", "u", "ai", "ou"};
  std::vector<std::string> words;
  words.reserve(n);
  std::size_t i = 0;
  while (words.size() < n) {
    std::string w;
    std::size_t code = i++;
    for (int syll = 0; syll < 3; ++syll) {
      w += kOnsets[code % 14];
      code /= 14;
      w += kNuclei[code % 7];
      code /= 7;
    }
    words.push_back(w);
  }
  return words;
}

inline topiclite::Vocabulary make_vocabulary(std::size_t n) {
  topiclite::Vocabulary vocab;
  for (const auto& w : make_words(n)) vocab.add_occurrence(w);
  return vocab;
}

struct TextCorpusOptions {
  std::size_t n_docs = 100;
  double mean_sentences = 10.0;
  std::size_t min_sentence_words = 4;
  std::size_t max_sentence_words = 9;
  std::size_t vocab = 2000;
  double zipf_exponent = 1.05;
  std::uint64_t seed = 0;
};

// Raw documents with Zipf-distributed words, capitalized sentence starts and
// terminal periods, ready for the normal ingestion pipeline.
inline std::vector<topiclite::RawDocument> generate_text_corpus(
    const TextCorpusOptions& opt) {
  const auto words = make_words(opt.vocab);
  std::vector<double> weights(opt.vocab);
  double total = 0.0;
  for (std::size_t i = 0; i < opt.vocab; ++i) {
    weights[i] = 1.0 / std::pow(static_cast<double>(i + 1), opt.zipf_exponent);
    total += weights[i];
  }
  std::vector<double> cdf(opt.vocab);
  double acc = 0.0;
  for (std::size_t i = 0; i < opt.vocab; ++i) {
    acc += weights[i] / total;
    cdf[i] = acc;
  }

  topiclite::rng::Engine eng(opt.seed);
  auto draw_word = [&]() -> const std::string& {
    const double u = topiclite::rng::unit(eng);
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    return words[std::min<std::size_t>(it - cdf.begin(), opt.vocab - 1)];
  };

  std::vector<topiclite::RawDocument> docs(opt.n_docs);
  for (std::size_t d = 0; d < opt.n_docs; ++d) {
    // sentence count uniform in [mean/2, 3*mean/2]
    const auto lo = static_cast<std::uint64_t>(opt.mean_sentences * 0.5);
    const auto hi = static_cast<std::uint64_t>(opt.mean_sentences * 1.5);
    const std::size_t n_sentences =
        std::max<std::uint64_t>(1, lo + topiclite::rng::bounded(eng, hi - lo + 1));
    std::string text;
    for (std::size_t s = 0; s < n_sentences; ++s) {
      const std::size_t len =
          opt.min_sentence_words +
          topiclite::rng::bounded(
              eng, opt.max_sentence_words - opt.min_sentence_words + 1);
      for (std::size_t w = 0; w < len; ++w) {
        std::string word = draw_word();
        if (w == 0) {
          word[0] = static_cast<char>(std::toupper(word[0]));
        } else {
          text += ' ';
        }
        text += word;
      }
      text += ". ";
    }
    docs[d].id = "doc" + std::to_string(d);
    docs[d].language = topiclite::Language::en;
    docs[d].text = std::move(text);
  }
  return docs;
}

struct TopicalTextOptions {
  std::size_t n_docs = 100;
  double mean_sentences = 10.0;
  std::size_t min_sentence_words = 4;
  std::size_t max_sentence_words = 9;
  std::size_t n_topics = 20;          // generator topics (word blocks)
  std::size_t words_per_topic = 80;   // block vocabulary size
  std::size_t shared_words = 800;     // function-word pool used everywhere
  std::size_t topics_per_doc = 3;
  double lead_fraction = 0.35;        // leading sentences use the primary topic
  double shared_word_prob = 0.25;
  double zipf_exponent = 1.05;
  std::uint64_t seed = 0;
};

// Text with encyclopedic structure: each document has a primary topic that
// governs its leading sentences, with secondary topics appearing later.
// Topic blocks have distinct vocabularies, so the full text spans more of
// the vocabulary than its leading portion does.
inline std::vector<topiclite::RawDocument> generate_topical_text_corpus(
    const TopicalTextOptions& opt) {
  const std::size_t block_vocab = opt.n_topics * opt.words_per_topic;
  const auto words = make_words(block_vocab + opt.shared_words);

  auto zipf_cdf = [&](std::size_t n) {
    std::vector<double> cdf(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      total += 1.0 / std::pow(static_cast<double>(i + 1), opt.zipf_exponent);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += 1.0 / std::pow(static_cast<double>(i + 1), opt.zipf_exponent) / total;
      cdf[i] = acc;
    }
    return cdf;
  };
  const auto block_cdf = zipf_cdf(opt.words_per_topic);
  const auto shared_cdf = zipf_cdf(opt.shared_words);

  topiclite::rng::Engine eng(opt.seed);
  auto draw_from = [&](const std::vector<double>& cdf) {
    const double u = topiclite::rng::unit(eng);
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    return std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
  };

  std::vector<topiclite::RawDocument> docs(opt.n_docs);
  for (std::size_t d = 0; d < opt.n_docs; ++d) {
    const std::size_t primary = topiclite::rng::bounded(eng, opt.n_topics);
    std::vector<std::size_t> doc_topics = {primary};
    while (doc_topics.size() < std::min(opt.topics_per_doc, opt.n_topics)) {
      const std::size_t t = topiclite::rng::bounded(eng, opt.n_topics);
      if (std::find(doc_topics.begin(), doc_topics.end(), t) ==
          doc_topics.end()) {
        doc_topics.push_back(t);
      }
    }

    const auto lo = static_cast<std::uint64_t>(opt.mean_sentences * 0.5);
    const auto hi = static_cast<std::uint64_t>(opt.mean_sentences * 1.5);
    const std::size_t n_sentences =
        std::max<std::uint64_t>(1, lo + topiclite::rng::bounded(eng, hi - lo + 1));
    const auto n_lead = static_cast<std::size_t>(
        std::ceil(opt.lead_fraction * static_cast<double>(n_sentences)));

    std::string text;
    for (std::size_t s = 0; s < n_sentences; ++s) {
      std::size_t topic = primary;
      if (s >= n_lead) {
        // later sentences wander into the secondary topics
        topic = doc_topics[topiclite::rng::bounded(eng, doc_topics.size())];
      }
      const std::size_t len =
          opt.min_sentence_words +
          topiclite::rng::bounded(
              eng, opt.max_sentence_words - opt.min_sentence_words + 1);
      for (std::size_t w = 0; w < len; ++w) {
        std::size_t word_id;
        if (topiclite::rng::unit(eng) < opt.shared_word_prob) {
          word_id = block_vocab + draw_from(shared_cdf);
        } else {
          word_id = topic * opt.words_per_topic + draw_from(block_cdf);
        }
        std::string word = words[word_id];
        if (w == 0) {
          word[0] = static_cast<char>(std::toupper(word[0]));
        } else {
          text += ' ';
        }
        text += word;
      }
      text += ". ";
    }
    docs[d].id = "doc" + std::to_string(d);
    docs[d].language = topiclite::Language::en;
    docs[d].text = std::move(text);
  }
  return docs;
}

// A document of bare token ids grouped into sentences; raw strings are
// synthesized from the ids so summary text remains meaningful.
inline topiclite::Document make_token_document(std::size_t n_sentences,
                                               std::size_t max_sentence_len,
                                               std::int32_t max_word_id,
                                               std::uint64_t seed) {
  topiclite::rng::Engine eng(seed);
  topiclite::Document doc;
  doc.id = "tokdoc" + std::to_string(seed);
  for (std::size_t s = 0; s < n_sentences; ++s) {
    topiclite::Sentence sent;
    sent.index = s;
    const std::size_t len = 1 + topiclite::rng::bounded(eng, max_sentence_len);
    for (std::size_t i = 0; i < len; ++i) {
      const auto id = static_cast<std::int32_t>(
          topiclite::rng::bounded(eng, static_cast<std::uint64_t>(max_word_id)));
      sent.tokens.push_back(id);
      if (!sent.raw.empty()) sent.raw += ' ';
      sent.raw += "w" + std::to_string(id);
    }
    if (!doc.raw_text.empty()) doc.raw_text += ' ';
    doc.raw_text += sent.raw;
    doc.sentences.push_back(std::move(sent));
  }
  return doc;
}

}  // namespace testsupport
