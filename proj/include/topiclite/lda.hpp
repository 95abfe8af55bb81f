#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "topiclite/corpus.hpp"
#include "topiclite/errors.hpp"
#include "topiclite/log.hpp"
#include "topiclite/rng.hpp"
#include "topiclite/util.hpp"

namespace topiclite {

struct Hyperparameters {
  int topics = 10;        // K
  double alpha = 0.0;     // symmetric Dirichlet on theta; <= 0 means 50/K
  double beta = 0.01;     // symmetric Dirichlet on phi
  int iterations = 1000;  // Gibbs sweeps
  int burn_in = 500;
  int sample_lag = 50;    // sweeps between phi samples after burn-in
  std::uint64_t seed = 0;

  double resolved_alpha() const {
    return alpha > 0.0 ? alpha : 50.0 / static_cast<double>(topics);
  }

  // iterations == 0 is the untrained baseline: phi is estimated from the
  // random initial assignments.
  void validate() const {
    if (topics < 1) throw ConfigError("hyperparameters: K must be >= 1");
    if (beta <= 0.0) throw ConfigError("hyperparameters: beta must be > 0");
    if (alpha < 0.0) throw ConfigError("hyperparameters: alpha must be > 0");
    if (iterations < 0) throw ConfigError("hyperparameters: iterations must be >= 0");
    if (burn_in < 0) throw ConfigError("hyperparameters: burn_in must be >= 0");
    if (iterations > 0 && burn_in >= iterations) {
      throw ConfigError("hyperparameters: burn_in must be < iterations");
    }
    if (sample_lag < 1) throw ConfigError("hyperparameters: sample_lag must be >= 1");
  }
};

// Topic assignments plus the count tables driving the collapsed sampler.
// n_wk is stored word-major (V x K) so the per-token loop over topics is
// contiguous; n_kw(k, w) exposes the transposed view.
struct GibbsState {
  int topics = 0;  // K
  int vocab = 0;   // V
  std::vector<std::vector<std::int32_t>> tokens;  // per document word ids
  std::vector<std::vector<std::int32_t>> z;       // per document topic per token
  std::vector<std::int32_t> n_wk;  // V x K
  std::vector<std::int32_t> n_dk;  // M x K
  std::vector<std::int32_t> n_k;   // K
  std::vector<std::int32_t> n_d;   // M
  rng::Engine eng;

  std::size_t docs() const { return tokens.size(); }
  std::int32_t n_kw(int k, int w) const { return n_wk[static_cast<std::size_t>(w) * topics + k]; }
  std::size_t total_tokens() const {
    std::size_t n = 0;
    for (const auto& d : tokens) n += d.size();
    return n;
  }
};

// Uniform random topic per token from the seeded generator, in document
// order then position order.
inline GibbsState init_state(std::vector<std::vector<std::int32_t>> docs,
                             int vocab_size, const Hyperparameters& hyper) {
  hyper.validate();
  GibbsState st;
  st.topics = hyper.topics;
  st.vocab = vocab_size;
  st.tokens = std::move(docs);
  st.eng.seed(hyper.seed);

  const std::size_t m = st.tokens.size();
  const auto k_count = static_cast<std::size_t>(st.topics);
  st.z.resize(m);
  st.n_wk.assign(static_cast<std::size_t>(st.vocab) * k_count, 0);
  st.n_dk.assign(m * k_count, 0);
  st.n_k.assign(k_count, 0);
  st.n_d.assign(m, 0);

  for (std::size_t d = 0; d < m; ++d) {
    st.z[d].resize(st.tokens[d].size());
    for (std::size_t i = 0; i < st.tokens[d].size(); ++i) {
      const auto w = static_cast<std::size_t>(st.tokens[d][i]);
      const auto k = static_cast<std::int32_t>(rng::bounded(st.eng, k_count));
      st.z[d][i] = k;
      ++st.n_wk[w * k_count + k];
      ++st.n_dk[d * k_count + k];
      ++st.n_k[k];
      ++st.n_d[d];
    }
  }
  return st;
}

inline GibbsState init_state(const Corpus& corpus, const Hyperparameters& hyper) {
  std::vector<std::vector<std::int32_t>> docs;
  docs.reserve(corpus.documents.size());
  for (const auto& doc : corpus.documents) {
    std::vector<std::int32_t> flat;
    flat.reserve(doc.token_count());
    for (const auto& s : doc.sentences) {
      flat.insert(flat.end(), s.tokens.begin(), s.tokens.end());
    }
    docs.push_back(std::move(flat));
  }
  return init_state(std::move(docs), static_cast<int>(corpus.vocabulary.size()),
                    hyper);
}

// Full conditional p(z_i = k | z_-i, w) for token i of document d, with the
// token's current assignment removed. Probabilities are normalized.
inline std::vector<double> gibbs_conditional(const GibbsState& st,
                                             const Hyperparameters& hyper,
                                             std::size_t d, std::size_t i) {
  const int k_count = st.topics;
  const double alpha = hyper.resolved_alpha();
  const double beta = hyper.beta;
  const double v_beta = static_cast<double>(st.vocab) * beta;
  const auto w = static_cast<std::size_t>(st.tokens[d][i]);
  const std::int32_t old_k = st.z[d][i];

  std::vector<double> p(k_count);
  double total = 0.0;
  for (int k = 0; k < k_count; ++k) {
    const int drop = (k == old_k) ? 1 : 0;
    const double nwk = st.n_wk[w * k_count + k] - drop;
    const double nk = st.n_k[k] - drop;
    const double ndk = st.n_dk[d * static_cast<std::size_t>(k_count) + k] - drop;
    p[k] = (nwk + beta) / (nk + v_beta) * (ndk + alpha);
    total += p[k];
  }
  for (auto& x : p) x /= total;
  return p;
}

// One full sweep: every token resampled once, document order, position order.
inline void gibbs_sweep(GibbsState& st, const Hyperparameters& hyper) {
  const int k_count = st.topics;
  const double alpha = hyper.resolved_alpha();
  const double beta = hyper.beta;
  const double v_beta = static_cast<double>(st.vocab) * beta;

  std::vector<double> cdf(k_count);
  for (std::size_t d = 0; d < st.tokens.size(); ++d) {
    std::int32_t* doc_topics = &st.n_dk[d * static_cast<std::size_t>(k_count)];
    const auto& words = st.tokens[d];
    auto& topics = st.z[d];
    for (std::size_t i = 0; i < words.size(); ++i) {
      const auto w = static_cast<std::size_t>(words[i]);
      const std::int32_t old_k = topics[i];
      std::int32_t* word_topics = &st.n_wk[w * k_count];

      --word_topics[old_k];
      --doc_topics[old_k];
      --st.n_k[old_k];

      double total = 0.0;
      for (int k = 0; k < k_count; ++k) {
        total += (word_topics[k] + beta) / (st.n_k[k] + v_beta) *
                 (doc_topics[k] + alpha);
        cdf[k] = total;
      }
      const double u = rng::unit(st.eng) * total;
      int new_k = 0;
      while (new_k < k_count - 1 && cdf[new_k] < u) ++new_k;

      ++word_topics[new_k];
      ++doc_topics[new_k];
      ++st.n_k[new_k];
      topics[i] = new_k;
    }
  }
}

// Joint log-likelihood of the current assignments,
// sum over tokens of log[(n_kw+b)/(n_k+Vb) * (n_dk+a)/(n_d+Ka)].
inline double log_likelihood(const GibbsState& st, const Hyperparameters& hyper) {
  const int k_count = st.topics;
  const double alpha = hyper.resolved_alpha();
  const double beta = hyper.beta;
  const double v_beta = static_cast<double>(st.vocab) * beta;
  const double k_alpha = static_cast<double>(k_count) * alpha;

  double sum = 0.0;
  for (std::size_t d = 0; d < st.tokens.size(); ++d) {
    for (std::size_t i = 0; i < st.tokens[d].size(); ++i) {
      const auto w = static_cast<std::size_t>(st.tokens[d][i]);
      const int k = st.z[d][i];
      const double word_term =
          (st.n_wk[w * k_count + k] + beta) / (st.n_k[k] + v_beta);
      const double doc_term =
          (st.n_dk[d * static_cast<std::size_t>(k_count) + k] + alpha) /
          (st.n_d[d] + k_alpha);
      sum += std::log(word_term * doc_term);
    }
  }
  return sum;
}

struct TrainInfo {
  int sweeps = 0;
  int samples = 0;  // phi samples averaged
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
};

// K row-stochastic word distributions plus everything needed to score
// held-out text against them.
struct TopicModel {
  std::vector<std::vector<double>> phi;  // K x V, rows sum to 1
  Hyperparameters hyper;
  Vocabulary vocabulary;
  TrainInfo info;

  int topics() const { return static_cast<int>(phi.size()); }
  int vocab() const { return phi.empty() ? 0 : static_cast<int>(phi[0].size()); }
};

namespace detail {

inline void accumulate_phi_sample(const GibbsState& st, double beta,
                                  std::vector<std::vector<double>>& acc) {
  const int k_count = st.topics;
  const double v_beta = static_cast<double>(st.vocab) * beta;
  for (int w = 0; w < st.vocab; ++w) {
    const std::int32_t* word_topics =
        &st.n_wk[static_cast<std::size_t>(w) * k_count];
    for (int k = 0; k < k_count; ++k) {
      acc[k][w] += (word_topics[k] + beta) / (st.n_k[k] + v_beta);
    }
  }
}

}  // namespace detail

// Trains by collapsed Gibbs sampling. phi is the mean of (n_kw+b)/(n_k+Vb)
// over post-burn-in samples taken every sample_lag sweeps; if the schedule
// yields no sample before the last sweep, the final state is used.
inline TopicModel train_tokens(std::vector<std::vector<std::int32_t>> docs,
                               int vocab_size, Vocabulary vocabulary,
                               Hyperparameters hyper) {
  hyper.validate();
  if (vocab_size <= 0) throw EmptyCorpus("train: empty vocabulary");

  const auto t0 = std::chrono::steady_clock::now();
  GibbsState st = init_state(std::move(docs), vocab_size, hyper);
  if (static_cast<std::size_t>(hyper.topics) > st.total_tokens()) {
    log_warn("train: K=%d exceeds corpus size of %zu tokens", hyper.topics,
             st.total_tokens());
  }

  std::vector<std::vector<double>> acc(
      hyper.topics, std::vector<double>(vocab_size, 0.0));
  int samples = 0;
  for (int sweep = 1; sweep <= hyper.iterations; ++sweep) {
    gibbs_sweep(st, hyper);
    const bool scheduled = sweep > hyper.burn_in &&
                           (sweep - hyper.burn_in) % hyper.sample_lag == 0;
    const bool last_resort = sweep == hyper.iterations && samples == 0;
    if (scheduled || last_resort) {
      detail::accumulate_phi_sample(st, hyper.beta, acc);
      ++samples;
    }
    if (log_level() >= LogLevel::debug && sweep % 50 == 0) {
      log_debug("train: sweep %d/%d log-likelihood %.2f", sweep,
                hyper.iterations, log_likelihood(st, hyper));
    }
  }
  if (samples == 0) {  // iterations == 0: estimate from the initial state
    detail::accumulate_phi_sample(st, hyper.beta, acc);
    samples = 1;
  }
  for (auto& row : acc) {
    for (auto& x : row) x /= samples;
  }

  TopicModel model;
  model.phi = std::move(acc);
  model.hyper = hyper;
  model.hyper.alpha = hyper.resolved_alpha();
  model.vocabulary = std::move(vocabulary);
  model.info.sweeps = hyper.iterations;
  model.info.samples = samples;
  model.info.seed = hyper.seed;
  model.info.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return model;
}

inline TopicModel train(const Corpus& corpus, const Hyperparameters& hyper) {
  if (corpus.documents.empty()) throw EmptyCorpus("train: empty corpus");
  std::vector<std::vector<std::int32_t>> docs;
  docs.reserve(corpus.documents.size());
  for (const auto& doc : corpus.documents) {
    std::vector<std::int32_t> flat;
    flat.reserve(doc.token_count());
    for (const auto& s : doc.sentences) {
      flat.insert(flat.end(), s.tokens.begin(), s.tokens.end());
    }
    docs.push_back(std::move(flat));
  }
  return train_tokens(std::move(docs), static_cast<int>(corpus.vocabulary.size()),
                      corpus.vocabulary, hyper);
}

// ---------------------------------------------------------------------------
// Held-out inference (fold-in)
// ---------------------------------------------------------------------------

// Gibbs sampling over one document's assignments with phi frozen. Tokens
// equal to kUnkId are skipped. theta = (n_dk+a)/(n_d+Ka) averaged over the
// second half of the sweeps. Throws DegenerateDocument when no known tokens
// remain.
inline std::vector<double> fold_in(const TopicModel& model,
                                   const std::vector<std::int32_t>& tokens,
                                   int fold_sweeps, std::uint64_t seed) {
  const int k_count = model.topics();
  std::vector<std::int32_t> known;
  known.reserve(tokens.size());
  for (auto t : tokens) {
    if (t != kUnkId) known.push_back(t);
  }
  if (known.empty()) {
    throw DegenerateDocument("fold_in: no tokens in model vocabulary");
  }

  rng::Engine eng(seed);
  std::vector<std::int32_t> assign(known.size());
  std::vector<std::int32_t> counts(k_count, 0);
  for (std::size_t i = 0; i < known.size(); ++i) {
    const auto k = static_cast<std::int32_t>(
        rng::bounded(eng, static_cast<std::uint64_t>(k_count)));
    assign[i] = k;
    ++counts[k];
  }

  const double alpha = model.hyper.resolved_alpha();
  const double k_alpha = static_cast<double>(k_count) * alpha;
  const double n_total = static_cast<double>(known.size());
  const int burn = fold_sweeps / 2;

  std::vector<double> theta_acc(k_count, 0.0);
  int samples = 0;
  std::vector<double> cdf(k_count);
  for (int sweep = 1; sweep <= fold_sweeps; ++sweep) {
    for (std::size_t i = 0; i < known.size(); ++i) {
      const auto w = static_cast<std::size_t>(known[i]);
      const std::int32_t old_k = assign[i];
      --counts[old_k];
      double total = 0.0;
      for (int k = 0; k < k_count; ++k) {
        total += model.phi[k][w] * (counts[k] + alpha);
        cdf[k] = total;
      }
      const double u = rng::unit(eng) * total;
      int new_k = 0;
      while (new_k < k_count - 1 && cdf[new_k] < u) ++new_k;
      ++counts[new_k];
      assign[i] = new_k;
    }
    if (sweep > burn) {
      for (int k = 0; k < k_count; ++k) {
        theta_acc[k] += (counts[k] + alpha) / (n_total + k_alpha);
      }
      ++samples;
    }
  }
  if (samples == 0) {  // fold_sweeps == 0: estimate from initial assignments
    for (int k = 0; k < k_count; ++k) {
      theta_acc[k] += (counts[k] + alpha) / (n_total + k_alpha);
    }
    samples = 1;
  }
  for (auto& x : theta_acc) x /= samples;
  return theta_acc;
}

// Maps a document's tokens from a source vocabulary into the model's
// vocabulary; words outside it become kUnkId.
inline std::vector<std::int32_t> tokens_in_model_vocab(
    const TopicModel& model, const Document& doc, const Vocabulary& source) {
  std::vector<std::int32_t> out;
  out.reserve(doc.token_count());
  for (const auto& s : doc.sentences) {
    for (auto id : s.tokens) {
      out.push_back(model.vocabulary.lookup(source.reverse(id)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model file format
// ---------------------------------------------------------------------------

// Header line, K phi rows of V decimal floats, then `id word` per line.
inline void save_model(const TopicModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file: " + path);
  out << "topiclite-model v1 K=" << model.topics() << " V=" << model.vocab()
      << " alpha=" << format_double(model.hyper.alpha)
      << " beta=" << format_double(model.hyper.beta)
      << " seed=" << model.info.seed << "\n";
  for (const auto& row : model.phi) {
    for (std::size_t w = 0; w < row.size(); ++w) {
      if (w > 0) out << ' ';
      out << format_double(row[w]);
    }
    out << "\n";
  }
  for (std::size_t id = 0; id < model.vocabulary.size(); ++id) {
    out << id << ' ' << model.vocabulary.reverse(static_cast<std::int32_t>(id))
        << "\n";
  }
  if (!out) throw IoError("failed while writing model file: " + path);
}

inline TopicModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path);

  std::string header;
  if (!std::getline(in, header)) throw DataError(path + ": empty model file");
  int k_count = 0, vocab_size = 0;
  double alpha = 0.0, beta = 0.0;
  unsigned long long seed = 0;
  if (std::sscanf(header.c_str(),
                  "topiclite-model v1 K=%d V=%d alpha=%lf beta=%lf seed=%llu",
                  &k_count, &vocab_size, &alpha, &beta, &seed) != 5 ||
      k_count < 1 || vocab_size < 1) {
    throw DataError(path + ": bad model header");
  }

  TopicModel model;
  model.hyper.topics = k_count;
  model.hyper.alpha = alpha;
  model.hyper.beta = beta;
  model.hyper.seed = seed;
  model.info.seed = seed;
  model.phi.assign(k_count, std::vector<double>(vocab_size, 0.0));

  std::string line;
  for (int k = 0; k < k_count; ++k) {
    if (!std::getline(in, line)) {
      throw DataError(path + ": truncated phi rows");
    }
    const char* p = line.c_str();
    char* end = nullptr;
    for (int w = 0; w < vocab_size; ++w) {
      const double v = std::strtod(p, &end);
      if (end == p) throw DataError(path + ": bad phi row " + std::to_string(k));
      model.phi[k][w] = v;
      p = end;
    }
  }
  for (int id = 0; id < vocab_size; ++id) {
    if (!std::getline(in, line)) {
      throw DataError(path + ": truncated vocabulary listing");
    }
    std::istringstream row(line);
    long got_id = -1;
    std::string word;
    if (!(row >> got_id >> word) || got_id != id) {
      throw DataError(path + ": bad vocabulary line " + std::to_string(id));
    }
    model.vocabulary.add_occurrence(word);
  }
  return model;
}

}  // namespace topiclite
