// topiclite: corpus statistics, extractive summarization, LDA topic-space
// training via collapsed Gibbs sampling, model evaluation, and the
// summarize/train/evaluate benchmark grid.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "topiclite/bench.hpp"
#include "topiclite/corpus.hpp"
#include "topiclite/errors.hpp"
#include "topiclite/eval.hpp"
#include "topiclite/jsonl.hpp"
#include "topiclite/lda.hpp"
#include "topiclite/log.hpp"
#include "topiclite/summarize.hpp"
#include "topiclite/util.hpp"

namespace tl = topiclite;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitIo = 3;

struct GlobalOptions {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string log_level = "warn";
  std::string language = "en";
  bool stopwords = false;
};

tl::Language language_or_throw(const std::string& name) {
  const auto lang = tl::parse_language(name);
  if (!lang) throw tl::ConfigError("unknown language: " + name);
  return *lang;
}

tl::Corpus load_and_build(const std::string& input, const GlobalOptions& g) {
  const auto raw = tl::read_corpus_input(input, language_or_throw(g.language));
  tl::TokenizerOptions opt;
  opt.remove_stopwords = g.stopwords;
  return tl::build_corpus(raw, opt, g.threads);
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw tl::IoError("cannot write " + path);
  return file;
}

int cmd_stats(const std::string& input, const GlobalOptions& g) {
  const tl::Corpus corpus = load_and_build(input, g);
  std::cout << "lang,n_docs,n_words,n_unique,n_sentences,mean_words,"
               "mean_unique,mean_sentences\n";
  for (const auto& [lang, st] : tl::corpus_stats_by_language(corpus)) {
    std::cout << tl::language_name(lang) << ',' << st.n_docs << ','
              << st.n_words << ',' << st.n_unique_words << ','
              << st.n_sentences << ',' << tl::format_double(st.mean_words)
              << ',' << tl::format_double(st.mean_unique) << ','
              << tl::format_double(st.mean_sentences) << "\n";
  }
  return kExitOk;
}

int cmd_summarize(const std::string& input, const std::string& system_name,
                  double rate_value, const std::string& output,
                  const GlobalOptions& g) {
  const auto system = tl::parse_system(system_name);
  if (!system || *system == tl::System::full) {
    throw tl::ConfigError("--system must be one of bf, br, artex");
  }
  const tl::CompressionRate rate(rate_value);
  const tl::Corpus corpus = load_and_build(input, g);

  std::ofstream file;
  std::ostream& out = open_output(file, output);
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    const auto& doc = corpus.documents[d];
    const auto doc_seed = tl::rng::derive_seed(g.seed, 0x62722d73u, d);
    const tl::Summary summary = tl::summarize(*system, doc, rate, doc_seed);
    nlohmann::json obj;
    obj["id"] = doc.id;
    obj["system"] = tl::system_name(summary.system);
    obj["rate"] = summary.rate;
    obj["selected"] = summary.selected;
    obj["text"] = summary.text;
    out << obj.dump() << "\n";
  }
  if (!out) throw tl::IoError("failed while writing summaries");
  return kExitOk;
}

int cmd_train(const std::string& input, const std::string& output,
              const tl::Hyperparameters& hyper, const GlobalOptions& g) {
  const tl::Corpus corpus = load_and_build(input, g);
  const tl::TopicModel model = tl::train(corpus, hyper);
  tl::save_model(model, output);
  tl::log_info("trained K=%d on %zu documents (%zu tokens, V=%zu) in %.2fs",
               model.topics(), corpus.documents.size(), corpus.total_tokens(),
               corpus.vocabulary.size(), model.info.wall_time_s);
  return kExitOk;
}

int cmd_eval(const std::string& model_path, const std::string& test_path,
             int fold_sweeps, const std::string& pairwise_path,
             const GlobalOptions& g) {
  const tl::TopicModel model = tl::load_model(model_path);
  const auto raw = tl::read_corpus_input(test_path, language_or_throw(g.language));
  if (raw.empty()) throw tl::DataError("empty test set: " + test_path);

  tl::TokenizerOptions opt;
  opt.remove_stopwords = g.stopwords;
  std::vector<std::vector<std::int32_t>> test_docs;
  test_docs.reserve(raw.size());
  for (const auto& rd : raw) {
    std::vector<std::int32_t> ids;
    for (const auto& tok : tl::tokenize(rd.text, rd.language, opt)) {
      ids.push_back(model.vocabulary.lookup(tok));
    }
    test_docs.push_back(std::move(ids));
  }

  const tl::PerplexityReport report =
      tl::perplexity(model, test_docs, fold_sweeps, g.seed, g.threads);
  const tl::DivergenceReport divergence = tl::js_model(model);

  nlohmann::json obj;
  obj["perplexity"] = report.perplexity;
  obj["entropy_bits"] = report.entropy_bits;
  obj["n_scored"] = report.n_tokens_scored;
  obj["n_skipped"] = report.n_tokens_skipped;
  obj["js_total"] = divergence.total;
  std::cout << obj.dump() << "\n";

  if (!pairwise_path.empty()) {
    std::ofstream out(pairwise_path, std::ios::binary);
    if (!out) throw tl::IoError("cannot write " + pairwise_path);
    const int k_count = divergence.topics;
    for (int i = 0; i < k_count; ++i) {
      for (int j = 0; j < k_count; ++j) {
        if (j > 0) out << ',';
        out << tl::format_double(divergence.at(i, j));
      }
      out << "\n";
    }
  }
  return kExitOk;
}

int cmd_bench(const std::string& config_path, const GlobalOptions& g) {
  const tl::BenchConfig config = tl::load_bench_config(config_path);
  GlobalOptions corpus_opts = g;
  corpus_opts.language = tl::language_name(config.language);
  const tl::Corpus corpus = load_and_build(config.input, corpus_opts);
  tl::log_info("bench: %zu documents, %zu tokens, V=%zu",
               corpus.documents.size(), corpus.total_tokens(),
               corpus.vocabulary.size());
  const auto records = tl::run_bench(corpus, config.grid, config.language,
                                     config.out_dir, g.threads);
  std::size_t failed = 0;
  for (const auto& r : records) {
    if (!r.ok()) ++failed;
  }
  tl::log_info("bench: %zu records (%zu failed) written to %s",
               records.size(), failed, config.out_dir.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"topic spaces from summarized corpora: summarize, train, "
               "evaluate, benchmark"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--threads", g.threads, "worker threads")
      ->capture_default_str();
  app.add_option("--log-level", g.log_level, "error|warn|info|debug")
      ->capture_default_str();
  auto add_seed = [&g](CLI::App* sub) {
    sub->add_option("--seed", g.seed, "base RNG seed")->capture_default_str();
  };

  // stats
  auto* stats = app.add_subcommand("stats", "corpus statistics as CSV");
  std::string stats_input;
  stats->add_option("--input", stats_input, "corpus JSONL file or .txt directory")
      ->required();
  stats->add_option("--lang", g.language, "language for .txt directories")
      ->capture_default_str();
  stats->add_flag("--stopwords", g.stopwords, "apply stopword lists");

  // summarize
  auto* summ = app.add_subcommand("summarize", "extractive summaries as JSONL");
  std::string summ_input, summ_system, summ_output;
  double summ_rate = 0.3;
  summ->add_option("--input", summ_input, "corpus JSONL file or .txt directory")
      ->required();
  summ->add_option("--system", summ_system, "bf|br|artex")->required();
  summ->add_option("--rate", summ_rate, "compression rate in (0,1]")
      ->required();
  summ->add_option("--output", summ_output, "output path (default stdout)");
  add_seed(summ);
  summ->add_option("--lang", g.language, "language for .txt directories")
      ->capture_default_str();
  summ->add_flag("--stopwords", g.stopwords, "apply stopword lists");

  // train
  auto* train = app.add_subcommand("train", "train an LDA topic space");
  std::string train_input, train_output;
  tl::Hyperparameters hyper;
  train->add_option("--input", train_input, "corpus JSONL file or .txt directory")
      ->required();
  train->add_option("--output", train_output, "model file path")->required();
  train->add_option("--k", hyper.topics, "number of topics")->required();
  train->add_option("--alpha", hyper.alpha, "document Dirichlet prior (0 = 50/K)")
      ->capture_default_str();
  train->add_option("--beta", hyper.beta, "topic-word Dirichlet prior")
      ->capture_default_str();
  train->add_option("--iterations", hyper.iterations, "Gibbs sweeps")
      ->capture_default_str();
  train->add_option("--burn-in", hyper.burn_in, "sweeps before sampling phi")
      ->capture_default_str();
  train->add_option("--sample-lag", hyper.sample_lag,
                    "sweeps between phi samples")
      ->capture_default_str();
  add_seed(train);
  train->add_option("--lang", g.language, "language for .txt directories")
      ->capture_default_str();
  train->add_flag("--stopwords", g.stopwords, "apply stopword lists");

  // eval
  auto* eval = app.add_subcommand("eval", "score a model on held-out text");
  std::string eval_model, eval_test, eval_pairwise;
  int fold_sweeps = 50;
  eval->add_option("--model", eval_model, "model file")->required();
  eval->add_option("--test", eval_test, "test corpus JSONL file or directory")
      ->required();
  eval->add_option("--fold-sweeps", fold_sweeps, "fold-in Gibbs sweeps")
      ->capture_default_str();
  eval->add_option("--pairwise", eval_pairwise, "write K x K divergence CSV");
  add_seed(eval);
  eval->add_option("--lang", g.language, "language for .txt directories")
      ->capture_default_str();
  eval->add_flag("--stopwords", g.stopwords, "apply stopword lists");

  // bench
  auto* bench = app.add_subcommand("bench", "run the experiment grid");
  std::string bench_config;
  bench->add_option("--config", bench_config, "grid config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  }

  if (!tl::set_log_level(g.log_level)) {
    std::cerr << "unknown log level: " << g.log_level << "\n";
    return kExitUsage;
  }
  if (g.threads < 1) g.threads = 1;

  try {
    if (stats->parsed()) return cmd_stats(stats_input, g);
    if (summ->parsed()) {
      return cmd_summarize(summ_input, summ_system, summ_rate, summ_output, g);
    }
    if (train->parsed()) {
      hyper.seed = g.seed;
      return cmd_train(train_input, train_output, hyper, g);
    }
    if (eval->parsed()) {
      return cmd_eval(eval_model, eval_test, fold_sweeps, eval_pairwise, g);
    }
    if (bench->parsed()) return cmd_bench(bench_config, g);
  } catch (const tl::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const tl::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const tl::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
