// Microbenchmarks for the likelihood kernels and the sampler.
//
// The background-chain benchmarks use a corpus synthesized at a realistic
// shape (about one thousand documents, vocabulary in the thousands) so the
// per-step costs mirror estimation on the small test collections.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "polya/corpus.hpp"
#include "polya/estimation.hpp"
#include "polya/evaluation.hpp"
#include "polya/urn.hpp"

namespace {

using namespace polya;

Corpus make_corpus(std::size_t n_docs, std::size_t doc_len,
                   std::size_t vocab) {
  std::mt19937_64 rng(12);
  // Zipf-ish unigram draw with per-document burstiness.
  std::vector<double> weight(vocab);
  for (std::size_t t = 0; t < vocab; ++t) {
    weight[t] = 1.0 / static_cast<double>(t + 1);
  }
  std::discrete_distribution<std::size_t> pick(weight.begin(), weight.end());
  std::uniform_int_distribution<int> repeat(1, 3);

  std::vector<std::pair<std::string, std::vector<std::string>>> docs;
  for (std::size_t d = 0; d < n_docs; ++d) {
    std::vector<std::string> tokens;
    while (tokens.size() < doc_len) {
      const std::size_t t = pick(rng);
      const int k = repeat(rng);
      for (int i = 0; i < k && tokens.size() < doc_len; ++i) {
        tokens.push_back("t" + std::to_string(t));
      }
    }
    docs.emplace_back("d" + std::to_string(d), std::move(tokens));
  }
  return Corpus::build(docs);
}

const Corpus& bench_corpus() {
  static const Corpus corpus = make_corpus(1000, 95, 12000);
  return corpus;
}

std::vector<term_id> bench_doc(std::size_t length) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<term_id> pick(0, 199);
  std::vector<term_id> doc(length);
  for (term_id& t : doc) t = pick(rng);
  return doc;
}

void BM_LogLikelihoodIdentity(benchmark::State& state) {
  const std::size_t v = 10'000;
  const auto doc = bench_doc(static_cast<std::size_t>(state.range(0)));
  const UrnModel model(std::vector<double>(v, 0.5),
                       ReplacementMatrix::identity(v));
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_likelihood(model, doc));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogLikelihoodIdentity)->Arg(100)->Arg(1000);

void BM_LogLikelihoodDcmClosedForm(benchmark::State& state) {
  const std::size_t v = 10'000;
  const auto doc = bench_doc(static_cast<std::size_t>(state.range(0)));
  const auto counts = count_terms(doc);
  const std::vector<double> u0(v, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_likelihood_dcm(u0, counts, doc.size()));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogLikelihoodDcmClosedForm)->Arg(100)->Arg(1000);

void BM_BackgroundChain(benchmark::State& state,
                        BackgroundVariant variant) {
  const Corpus& corpus = bench_corpus();
  const auto bs = corpus.burstiness_all();
  const std::size_t v = corpus.vocabulary_size();
  const std::size_t dim =
      variant == BackgroundVariant::gspud_estimate_m ? 2 * v : v;
  for (auto _ : state) {
    auto target = make_background_target(corpus, variant, bs);
    ChainConfig config;
    config.n_samples = 2000;
    config.burn_in = 200;
    config.rng_seed = 5;
    benchmark::DoNotOptimize(mh_chain(*target, dim, config));
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK_CAPTURE(BM_BackgroundChain, multinomial,
                  BackgroundVariant::multinomial);
BENCHMARK_CAPTURE(BM_BackgroundChain, dcm, BackgroundVariant::dcm);
BENCHMARK_CAPTURE(BM_BackgroundChain, gspud_mc,
                  BackgroundVariant::gspud_estimate_m);

void BM_DocumentChain(benchmark::State& state) {
  const Corpus& corpus = bench_corpus();
  const auto bs = corpus.burstiness_all();
  const auto matrix = ReplacementMatrix::diagonal(bs);
  ChainConfig config;
  config.n_samples = 20'000;
  config.burn_in = 2'000;
  config.proposal_sigma = 0.5;
  config.rng_seed = 6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        estimate_document(corpus.document(0), matrix, config));
  }
  state.SetItemsProcessed(state.iterations() * 20'000);
}
BENCHMARK(BM_DocumentChain);

void BM_PermutationTest(benchmark::State& state) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> a(50), b(50);
  for (std::size_t i = 0; i < 50; ++i) {
    a[i] = unif(rng);
    b[i] = unif(rng);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(permutation_test(a, b, 10'000, 3));
  }
}
BENCHMARK(BM_PermutationTest);

}  // namespace

BENCHMARK_MAIN();
