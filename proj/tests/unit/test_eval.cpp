#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "topiclite/eval.hpp"
#include "topiclite/lda.hpp"
#include "support/synthetic.hpp"

using namespace topiclite;

namespace {

TopicModel uniform_model(int vocab) {
  TopicModel model;
  model.phi = {std::vector<double>(vocab, 1.0 / vocab)};
  model.hyper.topics = 1;
  model.hyper.alpha = 50.0;
  return model;
}

std::vector<std::vector<std::int32_t>> random_docs(int vocab, std::size_t n_docs,
                                                   std::size_t len,
                                                   std::uint64_t seed) {
  rng::Engine eng(seed);
  std::vector<std::vector<std::int32_t>> docs(n_docs);
  for (auto& doc : docs) {
    for (std::size_t i = 0; i < len; ++i) {
      doc.push_back(static_cast<std::int32_t>(
          rng::bounded(eng, static_cast<std::uint64_t>(vocab))));
    }
  }
  return docs;
}

}  // namespace

TEST_CASE("uniform single-topic model scores perplexity V", "[eval]") {
  const auto report =
      perplexity(uniform_model(137), random_docs(137, 6, 40, 3), 10, 7);
  CHECK(std::fabs(report.perplexity - 137.0) < 1e-9);
  CHECK(report.n_tokens_scored == 240);
  CHECK(report.n_tokens_skipped == 0);
  CHECK(report.entropy_bits ==
        Catch::Approx(std::log2(137.0)).epsilon(1e-12));
}

TEST_CASE("a certain model reaches the perplexity floor", "[eval]") {
  TopicModel model;
  model.phi = {{1.0}};
  model.hyper.topics = 1;
  model.hyper.alpha = 1.0;
  const auto report = perplexity(model, {{0, 0, 0, 0}}, 5, 1);
  CHECK(report.perplexity == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("perplexity matches a naive recomputation", "[eval]") {
  const auto gen_phi = testsupport::make_generator_phi(3, 20, 0.05, 19);
  const auto train_docs = testsupport::generate_lda_docs(gen_phi, 60, 30, 0.5, 20);
  Hyperparameters hyper;
  hyper.topics = 3;
  hyper.seed = 5;
  hyper.iterations = 150;
  hyper.burn_in = 75;
  hyper.sample_lag = 15;
  const TopicModel model =
      train_tokens(train_docs, 20, testsupport::make_vocabulary(20), hyper);

  const auto test_docs = testsupport::generate_lda_docs(gen_phi, 15, 25, 0.5, 21);
  const int fold_sweeps = 30;
  const std::uint64_t seed = 77;
  const auto report = perplexity(model, test_docs, fold_sweeps, seed);

  // independent aggregation of perplexity = exp(-1/N_B sum log P(w)) from
  // per-token P(w) values rebuilt with the same per-document fold-in
  double log_sum = 0.0;
  std::size_t n_b = 0;
  for (const auto& doc : test_docs) {
    const auto doc_seed = rng::derive_seed(seed, detail::kFoldSeedTag,
                                           detail::hash_tokens(doc));
    const auto theta = fold_in(model, doc, fold_sweeps, doc_seed);
    for (auto w : doc) {
      double pw = 0.0;
      for (int k = 0; k < 3; ++k) pw += theta[k] * model.phi[k][w];
      log_sum += std::log(pw);
      ++n_b;
    }
  }
  const double expected = std::exp(-log_sum / static_cast<double>(n_b));
  CHECK(report.n_tokens_scored == n_b);
  CHECK(std::fabs(report.perplexity - expected) < 1e-9);
}

TEST_CASE("unknown tokens are excluded and reported", "[eval]") {
  const auto report = perplexity(
      uniform_model(10),
      {{0, kUnkId, 3}, {kUnkId, kUnkId}, {5, 5}}, 5, 2);
  CHECK(report.n_tokens_scored == 4);
  CHECK(report.n_tokens_skipped == 3);
  CHECK(report.n_docs_skipped == 1);
  CHECK(std::fabs(report.perplexity - 10.0) < 1e-9);
}

TEST_CASE("perplexity throws when nothing is scoreable", "[eval]") {
  CHECK_THROWS_AS(perplexity(uniform_model(4), {{kUnkId}, {kUnkId, kUnkId}}, 5, 0),
                  NoScoreableTokens);
  CHECK_THROWS_AS(perplexity(uniform_model(4), {}, 5, 0), NoScoreableTokens);
}

TEST_CASE("perplexity is invariant under document order", "[eval]") {
  const auto gen_phi = testsupport::make_generator_phi(3, 15, 0.05, 29);
  TopicModel model;
  model.phi = gen_phi;
  model.hyper.topics = 3;
  model.hyper.alpha = 0.5;
  auto docs = random_docs(15, 12, 18, 31);
  const auto forward = perplexity(model, docs, 20, 9);
  std::reverse(docs.begin(), docs.end());
  const auto reversed = perplexity(model, docs, 20, 9);
  CHECK(forward.perplexity ==
        Catch::Approx(reversed.perplexity).epsilon(1e-12));
  CHECK(forward.n_tokens_scored == reversed.n_tokens_scored);
}

TEST_CASE("perplexity is identical across thread counts", "[eval]") {
  const auto gen_phi = testsupport::make_generator_phi(2, 12, 0.1, 39);
  TopicModel model;
  model.phi = gen_phi;
  model.hyper.topics = 2;
  model.hyper.alpha = 1.0;
  const auto docs = random_docs(12, 16, 20, 41);
  const auto one = perplexity(model, docs, 15, 3, 1);
  const auto four = perplexity(model, docs, 15, 3, 4);
  CHECK(one.perplexity == four.perplexity);  // bit identical
}

TEST_CASE("kl divergence identities", "[eval]") {
  const std::vector<double> p = {0.9, 0.1};
  const std::vector<double> q = {0.1, 0.9};
  CHECK(kl_divergence(p, p) == 0.0);
  CHECK(kl_divergence(p, q) == Catch::Approx(0.8 * std::log(9.0)).epsilon(1e-12));

  const std::vector<double> u(100, 0.01);
  CHECK(kl_divergence(u, u) == 0.0);

  const std::vector<double> with_zero = {1.0, 0.0};
  CHECK_THROWS_AS(kl_divergence(p, with_zero), NonAbsolutelyContinuous);
  CHECK(kl_divergence(with_zero, p) ==
        Catch::Approx(std::log(1.0 / 0.9)).epsilon(1e-12));
}

TEST_CASE("js divergence is the symmetrized kl", "[eval]") {
  const std::vector<double> p = {0.9, 0.1};
  const std::vector<double> q = {0.1, 0.9};
  CHECK(js_divergence(p, p) == 0.0);
  CHECK(js_divergence(p, q) == Catch::Approx(1.7578).margin(1e-3));
  CHECK(js_divergence(p, q) ==
        Catch::Approx(0.5 * (kl_divergence(p, q) + kl_divergence(q, p)))
            .epsilon(1e-15));

  rng::Engine eng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = testsupport::dirichlet(eng, 2 + rng::bounded(eng, 30), 0.5);
    auto b = testsupport::dirichlet(eng, a.size(), 0.5);
    CHECK(js_divergence(a, b) == js_divergence(b, a));  // exact symmetry
    CHECK(js_divergence(a, b) >= 0.0);
  }
}

TEST_CASE("js_model totals ordered pairs", "[eval]") {
  TopicModel one;
  one.phi = {std::vector<double>(8, 0.125)};
  one.hyper.topics = 1;
  CHECK(js_model(one).total == 0.0);

  const auto gen_phi = testsupport::make_generator_phi(2, 10, 0.1, 57);
  TopicModel two;
  two.phi = gen_phi;
  two.hyper.topics = 2;
  const auto report = js_model(two);
  CHECK(report.total ==
        Catch::Approx(2.0 * js_divergence(gen_phi[0], gen_phi[1]))
            .epsilon(1e-15));
  CHECK(report.at(0, 1) == report.at(1, 0));
  CHECK(report.at(0, 0) == 0.0);
}

TEST_CASE("js_model matches a naive triple loop", "[eval]") {
  rng::Engine eng(61);
  TopicModel model;
  model.hyper.topics = 5;
  for (int k = 0; k < 5; ++k) {
    model.phi.push_back(testsupport::dirichlet(eng, 100, 0.5));
  }
  const auto report = js_model(model);

  double naive = 0.0;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      if (i == j) continue;
      double pair = 0.0;
      for (int w = 0; w < 100; ++w) {
        const double pi = model.phi[i][w];
        const double pj = model.phi[j][w];
        pair += pi * std::log(pi / pj) + pj * std::log(pj / pi);
      }
      naive += 0.5 * pair;
    }
  }
  CHECK(std::fabs(report.total - naive) < 1e-12);

  // symmetric, zero-diagonal
  for (int i = 0; i < 5; ++i) {
    CHECK(report.at(i, i) == 0.0);
    for (int j = 0; j < 5; ++j) CHECK(report.at(i, j) == report.at(j, i));
  }
}

TEST_CASE("js_model total is invariant under topic permutation", "[eval]") {
  rng::Engine eng(67);
  TopicModel model;
  model.hyper.topics = 4;
  for (int k = 0; k < 4; ++k) {
    model.phi.push_back(testsupport::dirichlet(eng, 30, 0.5));
  }
  const double base = js_model(model).total;

  std::vector<int> perm = {0, 1, 2, 3};
  std::mt19937 shuffler(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(perm.begin(), perm.end(), shuffler);
    TopicModel permuted;
    permuted.hyper.topics = 4;
    for (int k : perm) permuted.phi.push_back(model.phi[k]);
    CHECK(js_model(permuted).total == Catch::Approx(base).epsilon(1e-12));
  }
}
