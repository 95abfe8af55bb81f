#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "topiclite/errors.hpp"
#include "topiclite/log.hpp"
#include "topiclite/rng.hpp"
#include "topiclite/util.hpp"

namespace topiclite {

enum class Language { en, es, fr, other };

inline std::optional<Language> parse_language(std::string_view s) {
  if (s == "en") return Language::en;
  if (s == "es") return Language::es;
  if (s == "fr") return Language::fr;
  if (s == "other") return Language::other;
  return std::nullopt;
}

inline const char* language_name(Language lang) {
  switch (lang) {
    case Language::en: return "en";
    case Language::es: return "es";
    case Language::fr: return "fr";
    default: return "other";
  }
}

// A document as it arrives from disk, before segmentation.
struct RawDocument {
  std::string id;
  Language language = Language::en;
  std::string text;
};

struct Sentence {
  std::size_t index = 0;          // ordinal within the document
  std::string raw;                // original text, trimmed
  std::vector<std::int32_t> tokens;  // vocabulary ids
};

struct Document {
  std::string id;
  Language language = Language::en;
  std::vector<Sentence> sentences;
  std::string raw_text;  // retained sentences joined with single spaces

  std::size_t token_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.tokens.size();
    return n;
  }
};

// Reserved id for test-set words absent from a training vocabulary.
constexpr std::int32_t kUnkId = -1;

class Vocabulary {
 public:
  std::int32_t add_occurrence(const std::string& word) {
    auto [it, inserted] = ids_.emplace(word, static_cast<std::int32_t>(words_.size()));
    if (inserted) {
      words_.push_back(word);
      collection_frequency_.push_back(0);
      document_frequency_.push_back(0);
    }
    ++collection_frequency_[it->second];
    return it->second;
  }

  void count_document(const std::set<std::int32_t>& distinct_ids) {
    for (auto id : distinct_ids) ++document_frequency_[id];
  }

  std::int32_t lookup(const std::string& word) const {
    auto it = ids_.find(word);
    return it == ids_.end() ? kUnkId : it->second;
  }

  const std::string& reverse(std::int32_t id) const { return words_.at(id); }
  std::int64_t collection_frequency(std::int32_t id) const { return collection_frequency_.at(id); }
  std::int64_t document_frequency(std::int32_t id) const { return document_frequency_.at(id); }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::int32_t> ids_;
  std::vector<std::int64_t> collection_frequency_;
  std::vector<std::int64_t> document_frequency_;
};

struct Corpus {
  std::vector<Document> documents;
  Vocabulary vocabulary;

  std::size_t total_tokens() const {
    std::size_t n = 0;
    for (const auto& d : documents) n += d.token_count();
    return n;
  }
};

// ---------------------------------------------------------------------------
// UTF-8 helpers. Letter classification covers ASCII plus the Latin-1 /
// Latin Extended ranges, which is enough for the declared languages.
// ---------------------------------------------------------------------------

namespace utf8 {

// Decodes the codepoint starting at s[i]; advances i past it. Invalid bytes
// decode as themselves (one byte) so scanning always terminates.
inline char32_t decode(std::string_view s, std::size_t& i) {
  unsigned char c0 = static_cast<unsigned char>(s[i]);
  if (c0 < 0x80) {
    ++i;
    return c0;
  }
  auto cont = [&](std::size_t k) {
    return i + k < s.size() &&
           (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
  };
  if ((c0 & 0xE0) == 0xC0 && cont(1)) {
    char32_t cp = (c0 & 0x1Fu) << 6 | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu);
    i += 2;
    return cp;
  }
  if ((c0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    char32_t cp = (c0 & 0x0Fu) << 12 |
                  (static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 6 |
                  (static_cast<unsigned char>(s[i + 2]) & 0x3Fu);
    i += 3;
    return cp;
  }
  if ((c0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    char32_t cp = (c0 & 0x07u) << 18 |
                  (static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 12 |
                  (static_cast<unsigned char>(s[i + 2]) & 0x3Fu) << 6 |
                  (static_cast<unsigned char>(s[i + 3]) & 0x3Fu);
    i += 4;
    return cp;
  }
  ++i;
  return c0;
}

inline void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline bool is_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

inline bool is_letter(char32_t cp) {
  if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return true;
  if (cp >= 0xC0 && cp <= 0xFF) return cp != 0xD7 && cp != 0xF7;  // Latin-1
  if (cp >= 0x100 && cp <= 0x24F) return true;  // Latin Extended-A/B
  return false;
}

inline bool is_upper(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return true;
  return cp >= 0xC0 && cp <= 0xDE && cp != 0xD7;
}

inline char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  return cp;
}

inline bool is_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == 0xA0;
}

}  // namespace utf8

// ---------------------------------------------------------------------------
// Sentence segmentation
// ---------------------------------------------------------------------------

namespace detail {

inline const std::unordered_set<std::string>& abbreviations(Language lang) {
  static const std::unordered_set<std::string> en = {
      "dr", "mr", "mrs", "ms", "prof", "sr", "jr", "st", "vs", "etc",
      "e.g", "i.e", "cf", "fig", "no", "inc", "ltd", "co", "jan", "feb",
      "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec",
      "u.s", "u.k", "ph.d", "est", "approx", "a.m", "p.m"};
  static const std::unordered_set<std::string> es = {
      "sr", "sra", "srta", "dr", "dra", "ud", "uds", "etc", "pág", "núm",
      "av", "avda", "gral", "cap", "art", "aprox", "p.ej", "ej"};
  static const std::unordered_set<std::string> fr = {
      "m", "mm", "mme", "mlle", "dr", "st", "ste", "etc", "cf", "fig",
      "p.ex", "av", "bd", "n°", "env", "chap", "vol"};
  switch (lang) {
    case Language::es: return es;
    case Language::fr: return fr;
    default: return en;
  }
}

inline std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (static_cast<unsigned char>(s[b]) <= ' ')) ++b;
  while (e > b && (static_cast<unsigned char>(s[e - 1]) <= ' ')) --e;
  return s.substr(b, e - b);
}

// Word immediately preceding position `dot` (letters and internal dots).
// Used for the abbreviation guard.
inline std::string word_before(std::string_view text, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0) {
    unsigned char c = static_cast<unsigned char>(text[b - 1]);
    bool keep = (c >= 0x80) || std::isalpha(c) || text[b - 1] == '.';
    if (!keep) break;
    --b;
  }
  std::string_view w = text.substr(b, dot - b);
  while (!w.empty() && w.front() == '.') w.remove_prefix(1);
  return std::string(w);
}

inline std::string lowercase_utf8(std::string_view w) {
  std::string out;
  std::size_t i = 0;
  while (i < w.size()) {
    char32_t cp = utf8::decode(w, i);
    utf8::encode(utf8::to_lower(cp), out);
  }
  return out;
}

}  // namespace detail

// Splits raw text into sentences. Boundaries are terminal punctuation
// (. ! ? …) followed by whitespace and an uppercase letter or digit, with an
// abbreviation guard for periods. Paragraph breaks (blank lines) always
// split. Returns trimmed sentence strings in original order.
inline std::vector<std::string> segment_sentences(std::string_view raw_text,
                                                  Language lang = Language::en) {
  if (detail::trim(raw_text).empty()) {
    throw EmptyDocument("segment_sentences: empty input");
  }
  const auto& abbrev = detail::abbreviations(lang);

  std::vector<std::string> sentences;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    if (end <= start) return;
    std::string_view s = detail::trim(raw_text.substr(start, end - start));
    if (!s.empty()) sentences.emplace_back(s);
    start = end;
  };

  std::size_t i = 0;
  while (i < raw_text.size()) {
    std::size_t cp_pos = i;
    char32_t cp = utf8::decode(raw_text, i);

    // Paragraph break: newline followed by optional blanks and another one.
    if (cp == '\n') {
      std::size_t j = i;
      bool paragraph = false;
      while (j < raw_text.size()) {
        char c = raw_text[j];
        if (c == '\n') {
          paragraph = true;
          ++j;
        } else if (c == ' ' || c == '\t' || c == '\r') {
          ++j;
        } else {
          break;
        }
      }
      if (paragraph) {
        flush(cp_pos);
        start = j;
        i = j;
      }
      continue;
    }

    bool terminal = cp == '!' || cp == '?' || cp == 0x2026;
    bool period = cp == '.';
    if (!terminal && !period) continue;

    // Collapse runs of terminal punctuation ("..." / "?!") into one stop.
    std::size_t after = i;
    while (after < raw_text.size()) {
      std::size_t k = after;
      char32_t nx = utf8::decode(raw_text, k);
      if (nx == '.' || nx == '!' || nx == '?' || nx == 0x2026) {
        after = k;
        period = period && (nx == '.');
        terminal = terminal || nx != '.';
      } else {
        break;
      }
    }

    if (period && !terminal) {
      const std::string prev = detail::word_before(raw_text, cp_pos);
      // A single uppercase letter is an initial ("J. Smith"); a lowercase
      // one is an ordinary word ending the sentence.
      std::size_t cp0 = 0;
      const bool single_initial =
          !prev.empty() && utf8::is_upper(utf8::decode(prev, cp0)) &&
          cp0 == prev.size();
      if (single_initial || abbrev.count(detail::lowercase_utf8(prev)) > 0) {
        i = after;
        continue;
      }
    }

    // Require whitespace, then (optionally skipping opening punctuation)
    // an uppercase letter or digit.
    std::size_t j = after;
    bool saw_space = false;
    while (j < raw_text.size()) {
      std::size_t k = j;
      char32_t nx = utf8::decode(raw_text, k);
      if (utf8::is_space(nx)) {
        saw_space = true;
        j = k;
      } else {
        break;
      }
    }
    if (!saw_space) {
      i = after;
      continue;
    }
    std::size_t k = j;
    while (k < raw_text.size()) {
      std::size_t k2 = k;
      char32_t nx = utf8::decode(raw_text, k2);
      if (nx == '"' || nx == '\'' || nx == '(' || nx == '[' || nx == 0xAB ||
          nx == 0xBF || nx == 0xA1 || nx == 0x2018 || nx == 0x201C) {
        k = k2;
        continue;
      }
      if (utf8::is_upper(nx) || utf8::is_digit(nx)) {
        flush(j);
        start = j;
        after = j;  // resume at the new sentence; whitespace is consumed
      }
      break;
    }
    i = after;
  }
  flush(raw_text.size());

  if (sentences.empty()) throw EmptyDocument("segment_sentences: no sentences");
  return sentences;
}

// ---------------------------------------------------------------------------
// Tokenization
// ---------------------------------------------------------------------------

struct TokenizerOptions {
  bool remove_stopwords = false;
};

namespace detail {

inline const std::unordered_set<std::string>& stopwords(Language lang) {
  static const std::unordered_set<std::string> en = {
      "the", "of", "and", "to", "in", "is", "it", "that", "was", "for",
      "on", "are", "as", "with", "his", "her", "they", "at", "be", "this",
      "have", "from", "or", "had", "by", "not", "but", "what", "all", "were",
      "when", "we", "there", "can", "an", "which", "their", "if", "will",
      "each", "she", "do", "how", "them", "then", "these", "so", "some",
      "would", "into", "has", "more", "its", "who", "him"};
  static const std::unordered_set<std::string> es = {
      "de", "la", "que", "el", "en", "los", "se", "del", "las", "un",
      "por", "con", "no", "una", "su", "para", "es", "al", "lo", "como",
      "más", "pero", "sus", "le", "ya", "fue", "este", "ha", "entre",
      "cuando", "sin", "sobre", "ser", "son", "también", "era", "muy",
      "hasta", "desde", "está", "mi", "porque", "qué", "esta"};
  static const std::unordered_set<std::string> fr = {
      "de", "la", "le", "les", "des", "et", "est", "en", "un", "une",
      "du", "dans", "il", "que", "qui", "au", "pour", "pas", "sur", "ne",
      "se", "par", "plus", "avec", "son", "ce", "mais", "ou", "comme",
      "ils", "aux", "cette", "ses", "sont", "elle", "était", "être",
      "leur", "ont", "tout", "nous", "vous"};
  switch (lang) {
    case Language::es: return es;
    case Language::fr: return fr;
    default: return en;
  }
}

}  // namespace detail

// Lowercased bag-of-words tokens: split on anything that is not a letter or
// digit, keeping apostrophes and hyphens only between word characters. Pure
// digit strings and single-character tokens are dropped. May return an empty
// list.
inline std::vector<std::string> tokenize(std::string_view sentence_raw,
                                         Language lang = Language::en,
                                         const TokenizerOptions& opt = {}) {
  std::vector<std::string> out;
  const auto& stop = detail::stopwords(lang);

  std::string current;
  std::size_t current_len = 0;  // codepoints
  bool has_non_digit = false;

  auto flush = [&]() {
    if (current_len >= 2 && has_non_digit) {
      if (!opt.remove_stopwords || stop.count(current) == 0) {
        out.push_back(current);
      }
    }
    current.clear();
    current_len = 0;
    has_non_digit = false;
  };

  std::size_t i = 0;
  const std::size_t n = sentence_raw.size();
  while (i < n) {
    char32_t cp = utf8::decode(sentence_raw, i);
    if (cp == 0x2019) cp = '\'';  // curly apostrophe

    if (utf8::is_letter(cp) || utf8::is_digit(cp)) {
      utf8::encode(utf8::to_lower(cp), current);
      ++current_len;
      if (!utf8::is_digit(cp)) has_non_digit = true;
      continue;
    }
    if ((cp == '\'' || cp == '-') && !current.empty() && i < n) {
      std::size_t k = i;
      char32_t nx = utf8::decode(sentence_raw, k);
      if (nx == 0x2019) nx = '\'';
      if (utf8::is_letter(nx) || utf8::is_digit(nx)) {
        current.push_back(static_cast<char>(cp));
        ++current_len;
        has_non_digit = true;
        continue;
      }
    }
    flush();
  }
  flush();
  return out;
}

// ---------------------------------------------------------------------------
// Corpus building
// ---------------------------------------------------------------------------

// Segments, tokenizes and indexes raw documents. Vocabulary ids are assigned
// in first-occurrence order (document order, sentence order, token order).
// Sentences that lose all tokens to filtering are dropped; documents that
// lose all sentences are dropped with a warning.
inline Corpus build_corpus(const std::vector<RawDocument>& raw_docs,
                           const TokenizerOptions& opt = {},
                           unsigned threads = 1) {
  struct Tokenized {
    std::vector<std::string> sentence_raws;
    std::vector<std::vector<std::string>> sentence_tokens;
    bool empty_input = false;
  };
  std::vector<Tokenized> work(raw_docs.size());

  parallel_for(raw_docs.size(), threads, [&](std::size_t i) {
    const RawDocument& rd = raw_docs[i];
    Tokenized& t = work[i];
    std::vector<std::string> sentences;
    try {
      sentences = segment_sentences(rd.text, rd.language);
    } catch (const EmptyDocument&) {
      t.empty_input = true;
      return;
    }
    for (auto& s : sentences) {
      auto tokens = tokenize(s, rd.language, opt);
      if (tokens.empty()) continue;  // sentence dropped
      t.sentence_raws.push_back(std::move(s));
      t.sentence_tokens.push_back(std::move(tokens));
    }
  });

  Corpus corpus;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < raw_docs.size(); ++i) {
    Tokenized& t = work[i];
    if (t.sentence_raws.empty()) {
      ++dropped;
      continue;
    }
    Document doc;
    doc.id = raw_docs[i].id;
    doc.language = raw_docs[i].language;
    std::set<std::int32_t> distinct;
    for (std::size_t s = 0; s < t.sentence_raws.size(); ++s) {
      Sentence sent;
      sent.index = doc.sentences.size();
      sent.raw = std::move(t.sentence_raws[s]);
      sent.tokens.reserve(t.sentence_tokens[s].size());
      for (const auto& tok : t.sentence_tokens[s]) {
        std::int32_t id = corpus.vocabulary.add_occurrence(tok);
        sent.tokens.push_back(id);
        distinct.insert(id);
      }
      if (!doc.raw_text.empty()) doc.raw_text += ' ';
      doc.raw_text += sent.raw;
      doc.sentences.push_back(std::move(sent));
    }
    corpus.vocabulary.count_document(distinct);
    corpus.documents.push_back(std::move(doc));
  }

  if (dropped > 0) {
    log_warn("build_corpus: dropped %zu document(s) with no retained tokens",
             dropped);
  }
  if (corpus.documents.empty()) {
    throw EmptyCorpus("build_corpus: no documents with tokens");
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

struct CorpusStats {
  std::size_t n_docs = 0;
  std::size_t n_words = 0;         // token occurrences
  std::size_t n_unique_words = 0;  // distinct words across the group
  std::size_t n_sentences = 0;
  double mean_words = 0.0;      // n_words / n_docs
  double mean_unique = 0.0;     // n_unique_words / n_docs
  double mean_sentences = 0.0;  // n_sentences / n_docs
  // Mean per-document distinct-word count. Differs from mean_unique, which
  // divides the group-level vocabulary size by the document count; see
  // README for why both are reported.
  double mean_document_types = 0.0;
};

namespace detail {

template <class DocIter>
CorpusStats stats_over(DocIter begin, DocIter end) {
  CorpusStats st;
  std::unordered_set<std::int32_t> group_vocab;
  std::size_t type_total = 0;
  for (auto it = begin; it != end; ++it) {
    const Document& d = **it;
    ++st.n_docs;
    st.n_sentences += d.sentences.size();
    std::unordered_set<std::int32_t> doc_vocab;
    for (const auto& s : d.sentences) {
      st.n_words += s.tokens.size();
      for (auto id : s.tokens) doc_vocab.insert(id);
    }
    type_total += doc_vocab.size();
    group_vocab.insert(doc_vocab.begin(), doc_vocab.end());
  }
  st.n_unique_words = group_vocab.size();
  if (st.n_docs > 0) {
    st.mean_words = static_cast<double>(st.n_words) / st.n_docs;
    st.mean_unique = static_cast<double>(st.n_unique_words) / st.n_docs;
    st.mean_sentences = static_cast<double>(st.n_sentences) / st.n_docs;
    st.mean_document_types = static_cast<double>(type_total) / st.n_docs;
  }
  return st;
}

}  // namespace detail

inline CorpusStats corpus_stats(const Corpus& corpus) {
  std::vector<const Document*> all;
  all.reserve(corpus.documents.size());
  for (const auto& d : corpus.documents) all.push_back(&d);
  return detail::stats_over(all.begin(), all.end());
}

inline std::map<Language, CorpusStats> corpus_stats_by_language(const Corpus& corpus) {
  std::map<Language, std::vector<const Document*>> groups;
  for (const auto& d : corpus.documents) groups[d.language].push_back(&d);
  std::map<Language, CorpusStats> out;
  for (auto& [lang, docs] : groups) {
    out[lang] = detail::stats_over(docs.begin(), docs.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Train/test split
// ---------------------------------------------------------------------------

struct SplitSpec {
  std::vector<std::size_t> train_indices;  // sorted document indices
  std::vector<std::size_t> test_indices;
  double ratio = 0.9;
  std::uint64_t seed = 0;
};

// Deterministic shuffled partition; |train| = round(ratio * M), half up.
inline SplitSpec split_corpus(const Corpus& corpus, double ratio,
                              std::uint64_t seed) {
  const std::size_t m = corpus.documents.size();
  if (m < 2) throw CorpusTooSmall("split_corpus: need at least 2 documents");
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ConfigError("split_corpus: ratio must be in (0, 1)");
  }
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  rng::Engine eng(seed);
  for (std::size_t i = m - 1; i > 0; --i) {
    std::size_t j = rng::bounded(eng, i + 1);
    std::swap(order[i], order[j]);
  }
  auto n_train = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(m),
                       std::floor(ratio * static_cast<double>(m) + 0.5)));
  SplitSpec split;
  split.ratio = ratio;
  split.seed = seed;
  split.train_indices.assign(order.begin(), order.begin() + n_train);
  split.test_indices.assign(order.begin() + n_train, order.end());
  std::sort(split.train_indices.begin(), split.train_indices.end());
  std::sort(split.test_indices.begin(), split.test_indices.end());
  return split;
}

}  // namespace topiclite
