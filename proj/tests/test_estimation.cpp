#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "polya/corpus.hpp"
#include "polya/estimation.hpp"
#include "polya/urn.hpp"

using namespace polya;

namespace {

Corpus toy_corpus(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& docs) {
  return Corpus::build(docs);
}

// Token streams drawn from a known diagonal urn; independent of the library
// estimation path (dense simulation, explicit RNG).
Corpus synthetic_corpus(std::uint64_t seed, const std::vector<double>& u0,
                        const std::vector<double>& diag, std::size_t n_docs,
                        std::size_t doc_len) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t v = u0.size();

  std::vector<std::pair<std::string, std::vector<std::string>>> docs;
  for (std::size_t d = 0; d < n_docs; ++d) {
    std::vector<double> balls = u0;
    double mass = 0.0;
    for (double b : balls) mass += b;
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < doc_len; ++i) {
      double pick = unif(rng) * mass;
      std::size_t colour = 0;
      while (colour + 1 < v && pick > balls[colour]) {
        pick -= balls[colour];
        ++colour;
      }
      tokens.push_back("t" + std::to_string(colour));
      balls[colour] += diag[colour];
      mass += diag[colour];
    }
    docs.emplace_back("d" + std::to_string(d), std::move(tokens));
  }
  return Corpus::build(docs);
}

// 2-d quadrature over the log-parameter box: expectation of f(u) under the
// density the sampler targets, proportional to exp(log_likelihood(exp theta)).
double quadrature_expectation(
    const std::function<double(double, double)>& log_likelihood,
    const std::function<double(double, double)>& f) {
  const double lo = -30.0, hi = 30.0;
  const int n = 600;
  const double h = (hi - lo) / n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double wa = (i == 0 || i == n) ? 0.5 : 1.0;
    const double ua = std::exp(lo + i * h);
    for (int j = 0; j <= n; ++j) {
      const double wb = (j == 0 || j == n) ? 0.5 : 1.0;
      const double ub = std::exp(lo + j * h);
      const double w = wa * wb * std::exp(log_likelihood(ua, ub));
      num += w * f(ua, ub);
      den += w;
    }
  }
  return num / den;
}

}  // namespace

TEST_CASE("multinomial MLE is the cf proportion") {
  const Corpus corpus = toy_corpus({{"1", {"a", "b", "a"}}});
  const auto u0 = mle_multinomial(corpus);
  REQUIRE(u0.size() == 2);
  CHECK(u0[0] == doctest::Approx(2.0 / 3.0));
  CHECK(u0[1] == doctest::Approx(1.0 / 3.0));

  const Corpus single = toy_corpus({{"1", {"only", "only"}}});
  const auto u1 = mle_multinomial(single);
  REQUIRE(u1.size() == 1);
  CHECK(u1[0] == doctest::Approx(1.0));
}

TEST_CASE("mh_chain validates its inputs") {
  const auto flat = [](std::span<const double>) { return 0.0; };
  ChainConfig config;
  config.n_samples = 100;
  config.burn_in = 100;  // not < n_samples
  CHECK_THROWS_AS(mh_chain(flat, 2, config), std::invalid_argument);

  config.burn_in = 10;
  CHECK_THROWS_AS(mh_chain(flat, 0, config), std::invalid_argument);

  const auto bad = [](std::span<const double>) {
    return -std::numeric_limits<double>::infinity();
  };
  config = ChainConfig{};
  config.n_samples = 100;
  config.burn_in = 10;
  CHECK_THROWS_AS(mh_chain(bad, 2, config), std::invalid_argument);
}

TEST_CASE("degenerate chain returns the single retained sample") {
  const auto flat = [](std::span<const double>) { return 0.0; };
  ChainConfig config;
  config.n_samples = 51;
  config.burn_in = 50;
  config.proposal_sigma = 0.3;
  config.rng_seed = 9;
  config.thinning = 1;

  std::vector<double> seen;
  const PosteriorEstimate est =
      mh_chain(flat, 3, config, [&](std::span<const double> params) {
        seen.assign(params.begin(), params.end());
      });
  CHECK(est.n_retained == 1);
  REQUIRE(seen.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(est.mean_params[i] == seen[i]);
}

TEST_CASE("identical seed and config give bit-identical estimates") {
  const auto target = [](std::span<const double> p) {
    double ll = 0.0;
    for (double x : p) ll += -0.5 * (x - 1.3) * (x - 1.3);
    return ll;
  };
  ChainConfig config;
  config.n_samples = 5000;
  config.burn_in = 500;
  config.rng_seed = 1234;
  const PosteriorEstimate a = mh_chain(target, 4, config);
  const PosteriorEstimate b = mh_chain(target, 4, config);
  CHECK(a.acceptance_rate == b.acceptance_rate);
  CHECK(a.n_retained == b.n_retained);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a.mean_params[i] == b.mean_params[i]);
  }

  ChainConfig other = config;
  other.rng_seed = 4321;
  const PosteriorEstimate c = mh_chain(target, 4, other);
  CHECK(a.mean_params[0] != c.mean_params[0]);
}

TEST_CASE("log-normal target: posterior mean matches the analytic value") {
  // The walk lives in theta = log x and accepts on the likelihood ratio
  // alone (no Jacobian), so with target density prod_i LN(x_i; mu_i, s_i^2)
  // the invariant law in theta is N(mu_i - s_i^2, s_i^2), i.e. x_i is
  // log-normal with mean exp(mu_i - s_i^2 / 2).
  const double mu0 = 0.0, s0 = 0.5;
  const double mu1 = 1.0, s1 = 0.3;
  const auto log_ln = [&](std::span<const double> p) {
    const double l0 = std::log(p[0]);
    const double l1 = std::log(p[1]);
    return -l0 - (l0 - mu0) * (l0 - mu0) / (2 * s0 * s0) - l1 -
           (l1 - mu1) * (l1 - mu1) / (2 * s1 * s1);
  };
  const double expected0 = std::exp(mu0 - s0 * s0 / 2);
  const double expected1 = std::exp(mu1 - s1 * s1 / 2);

  std::vector<double> est0, est1;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ChainConfig config;
    config.n_samples = 60'000;
    config.burn_in = 10'000;
    config.proposal_sigma = 0.4;
    config.thinning = 5;
    config.rng_seed = seed;
    const PosteriorEstimate est = mh_chain(log_ln, 2, config);
    est0.push_back(est.mean_params[0]);
    est1.push_back(est.mean_params[1]);
  }

  const auto mean_sd = [](const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - m) * (x - m);
    var /= static_cast<double>(xs.size() - 1);
    return std::pair{m, std::sqrt(var)};
  };
  const auto [m0, sd0] = mean_sd(est0);
  const auto [m1, sd1] = mean_sd(est1);

  int pass = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    const bool ok0 = std::abs(est0[i] - expected0) <= 3 * sd0;
    const bool ok1 = std::abs(est1[i] - expected1) <= 3 * sd1;
    if (ok0 && ok1) ++pass;
  }
  CHECK(pass >= 9);
  CHECK(m0 == doctest::Approx(expected0).epsilon(0.05));
  CHECK(m1 == doctest::Approx(expected1).epsilon(0.05));
}

TEST_CASE("sequence A,A,B: sampled ratio matches quadrature") {
  // Zero matrix: p(d|u) = (u_A/(u_A+u_B))^2 * u_B/(u_A+u_B). The sampler's
  // posterior mean of u_A/(u_A+u_B) lands near 2/3 (the induced prior on the
  // proportion is Haldane-like, so the posterior mean is the count
  // proportion).
  const auto zero_ll = [](double ua, double ub) {
    const double m = ua + ub;
    return 2 * std::log(ua / m) + std::log(ub / m);
  };
  // Identity matrix: draws A, A, B give u_A (u_A+1) u_B / (m (m+1) (m+2)).
  const auto dcm_ll = [](double ua, double ub) {
    const double m = ua + ub;
    return std::log(ua) + std::log(ua + 1) + std::log(ub) - std::log(m) -
           std::log(m + 1) - std::log(m + 2);
  };
  const auto ratio = [](double ua, double ub) { return ua / (ua + ub); };

  const double oracle_zero = quadrature_expectation(zero_ll, ratio);
  const double oracle_dcm = quadrature_expectation(dcm_ll, ratio);
  CHECK(oracle_zero == doctest::Approx(2.0 / 3.0).epsilon(0.02));
  CHECK(std::abs(oracle_zero - oracle_dcm) > 0.005);

  const auto run_ratio_mean = [&](const auto& ll) {
    ChainConfig config;
    config.n_samples = 400'000;
    config.burn_in = 40'000;
    config.proposal_sigma = 0.5;
    config.thinning = 10;
    config.rng_seed = 2024;
    double sum = 0.0;
    std::int64_t count = 0;
    mh_chain(
        [&](std::span<const double> p) { return ll(p[0], p[1]); }, 2, config,
        [&](std::span<const double> p) {
          sum += p[0] / (p[0] + p[1]);
          ++count;
        });
    return sum / static_cast<double>(count);
  };

  CHECK(run_ratio_mean(zero_ll) == doctest::Approx(oracle_zero).epsilon(0.03));
  CHECK(run_ratio_mean(dcm_ll) == doctest::Approx(oracle_dcm).epsilon(0.03));
}

namespace {

// Delegates to the incremental target and cross-checks every value against a
// direct evaluation.
class CrossCheckTarget final : public LogTarget {
 public:
  CrossCheckTarget(LogTarget& inner,
                   std::function<double(std::span<const double>)> naive)
      : inner_(inner), naive_(std::move(naive)) {}

  double log_density(std::span<const double> params) override {
    const double v = inner_.log_density(params);
    check(v, params);
    return v;
  }
  double propose(std::span<const double> params,
                 std::span<const std::uint32_t> changed) override {
    const double v = inner_.propose(params, changed);
    check(v, params);
    return v;
  }
  void accept() override { inner_.accept(); }
  void reject() override { inner_.reject(); }

  int checks = 0;

 private:
  void check(double value, std::span<const double> params) {
    ++checks;
    const double direct = naive_(params);
    CHECK(value == doctest::Approx(direct).epsilon(1e-8));
  }

  LogTarget& inner_;
  std::function<double(std::span<const double>)> naive_;
};

}  // namespace

TEST_CASE("incremental background targets match direct evaluation") {
  const Corpus corpus = synthetic_corpus(
      5, {2.0, 1.0, 0.5, 0.7, 1.3, 0.2, 0.8, 1.1, 0.4, 0.9, 0.6, 1.7},
      {1.0, 2.0, 4.0, 0.5, 1.5, 3.0, 1.0, 0.25, 2.5, 1.0, 0.75, 1.25}, 30, 25);
  const std::size_t v = corpus.vocabulary_size();
  const auto bs = corpus.burstiness_all();

  struct Case {
    BackgroundVariant variant;
    std::size_t dim;
  };
  const std::vector<Case> cases = {
      {BackgroundVariant::multinomial, v},
      {BackgroundVariant::dcm, v},
      {BackgroundVariant::gspud_fixed_m, v},
      {BackgroundVariant::gspud_estimate_m, 2 * v},
  };

  for (const Case& c : cases) {
    const auto naive = [&](std::span<const double> params) {
      std::vector<double> u0(params.begin(),
                             params.begin() + static_cast<std::ptrdiff_t>(v));
      ReplacementMatrix matrix = ReplacementMatrix::zero(v);
      switch (c.variant) {
        case BackgroundVariant::multinomial:
          break;
        case BackgroundVariant::dcm:
          matrix = ReplacementMatrix::identity(v);
          break;
        case BackgroundVariant::gspud_fixed_m:
          matrix = ReplacementMatrix::diagonal(bs);
          break;
        case BackgroundVariant::gspud_estimate_m:
          matrix = ReplacementMatrix::diagonal(std::vector<double>(
              params.begin() + static_cast<std::ptrdiff_t>(v), params.end()));
          break;
      }
      const UrnModel model(std::move(u0), std::move(matrix));
      double total = 0.0;
      for (const Document& doc : corpus.documents()) {
        total += log_likelihood(model, doc.tokens);
      }
      return total;
    };

    for (ProposalMode mode : {ProposalMode::blockwise, ProposalMode::joint}) {
      auto incremental = make_background_target(corpus, c.variant, bs);
      CrossCheckTarget checked(*incremental, naive);
      ChainConfig config;
      config.n_samples = 1500;
      config.burn_in = 100;
      config.proposal_sigma = 0.25;
      config.thinning = 50;
      config.rng_seed = 31 + static_cast<std::uint64_t>(c.variant);
      config.proposal_mode = mode;
      config.block_size = 5;  // straddles the u/m boundary when dim = 2v
      mh_chain(checked, c.dim, config);
      CHECK(checked.checks > 1000);
    }
  }
}

TEST_CASE("estimate_background returns the right model shapes") {
  const Corpus corpus = synthetic_corpus(11, {1.0, 2.0, 0.5}, {1.0, 1.0, 1.0},
                                         10, 12);
  ChainConfig config;
  config.n_samples = 2000;
  config.burn_in = 200;
  config.rng_seed = 5;

  EstimationReport report;
  const UrnModel mult = estimate_background(
      corpus, BackgroundVariant::multinomial, {}, config, &report);
  CHECK(mult.matrix().kind() == MatrixKind::zero);
  CHECK(report.acceptance_rate > 0.0);
  CHECK(report.acceptance_rate <= 1.0);
  for (double u : mult.u0()) CHECK(u > 0.0);

  const UrnModel dcm =
      estimate_background(corpus, BackgroundVariant::dcm, {}, config);
  CHECK(dcm.matrix().kind() == MatrixKind::identity);

  const auto bs = corpus.burstiness_all();
  const UrnModel fixed = estimate_background(
      corpus, BackgroundVariant::gspud_fixed_m, bs, config);
  REQUIRE(fixed.matrix().kind() == MatrixKind::diagonal);
  for (std::size_t t = 0; t < bs.size(); ++t) {
    CHECK(fixed.matrix().diag()[t] == bs[t]);
  }

  const UrnModel est = estimate_background(
      corpus, BackgroundVariant::gspud_estimate_m, {}, config);
  REQUIRE(est.matrix().kind() == MatrixKind::diagonal);
  for (double m : est.matrix().diag()) CHECK(m > 0.0);

  CHECK_THROWS_AS(estimate_background(corpus, BackgroundVariant::gspud_fixed_m,
                                      std::vector<double>{1.0}, config),
                  std::invalid_argument);
}

TEST_CASE("document estimation basics") {
  ChainConfig config;
  config.n_samples = 3000;
  config.burn_in = 300;
  config.proposal_sigma = 0.5;
  config.rng_seed = 17;

  SUBCASE("single unique term keeps the starting value") {
    Document doc{"d", {4, 4, 4}, 1};
    const auto weights =
        estimate_document(doc, ReplacementMatrix::zero(9), config);
    REQUIRE(weights.size() == 1);
    CHECK(weights[0].term == 4);
    CHECK(weights[0].weight == 1.0);
  }

  SUBCASE("empty document is an error") {
    Document doc{"d", {}, 0};
    CHECK_THROWS_AS(estimate_document(doc, ReplacementMatrix::zero(3), config),
                    std::invalid_argument);
  }

  SUBCASE("full dynamics are rejected") {
    Document doc{"d", {0, 1}, 2};
    CHECK_THROWS_AS(
        estimate_document(
            doc, ReplacementMatrix::full(2, {1.0, 0.0, 0.0, 1.0}), config),
        std::invalid_argument);
  }

  SUBCASE("weights cover the unique terms, sorted and positive") {
    Document doc{"d", {7, 2, 7, 5, 2, 7}, 3};
    const auto weights =
        estimate_document(doc, ReplacementMatrix::identity(8), config);
    REQUIRE(weights.size() == 3);
    CHECK(weights[0].term == 2);
    CHECK(weights[1].term == 5);
    CHECK(weights[2].term == 7);
    for (const TermWeight& tw : weights) CHECK(tw.weight > 0.0);

    const auto again =
        estimate_document(doc, ReplacementMatrix::identity(8), config);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(weights[i].weight == again[i].weight);
    }
  }
}

TEST_CASE("document estimation is independent of scheduling") {
  const Corpus corpus = synthetic_corpus(23, {1.0, 0.5, 2.0, 0.7},
                                         {2.0, 1.0, 3.0, 1.5}, 6, 15);
  ChainConfig config;
  config.n_samples = 2000;
  config.burn_in = 200;
  config.proposal_sigma = 0.5;
  config.rng_seed = 99;

  const auto matrix = ReplacementMatrix::diagonal({2.0, 1.0, 3.0, 1.5});
  const auto serial = estimate_documents(corpus, matrix, config, 1);
  const auto parallel = estimate_documents(corpus, matrix, config, 2);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t d = 0; d < serial.size(); ++d) {
    CHECK(serial[d].doc_id == parallel[d].doc_id);
    REQUIRE(serial[d].weights.size() == parallel[d].weights.size());
    for (std::size_t i = 0; i < serial[d].weights.size(); ++i) {
      CHECK(serial[d].weights[i].term == parallel[d].weights[i].term);
      CHECK(serial[d].weights[i].weight == parallel[d].weights[i].weight);
    }
  }
}

TEST_CASE("seed derivation separates stages and documents") {
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
  CHECK(derive_seed(7, "doc-1") == derive_seed(7, "doc-1"));
}

TEST_CASE("chain scaling keeps burn-in below the sample count") {
  ChainConfig config;
  config.n_samples = 1000;
  config.burn_in = 100;
  const ChainConfig tiny = config.scaled(0.0015);
  CHECK(tiny.n_samples >= 2);
  CHECK(tiny.burn_in < tiny.n_samples);
  CHECK_THROWS_AS(config.scaled(0.0), std::invalid_argument);

  const ChainConfig same = config.scaled(1.0);
  CHECK(same.n_samples == 1000);
  CHECK(same.burn_in == 100);
}

TEST_CASE("stopword-only documents get an empty model instead of an error") {
  std::vector<std::pair<std::string, std::vector<std::string>>> docs = {
      {"full", {"a", "b", "a"}}, {"empty", {}}};
  const Corpus corpus = Corpus::build(docs);
  ChainConfig config;
  config.n_samples = 500;
  config.burn_in = 50;
  config.rng_seed = 3;
  const auto models =
      estimate_documents(corpus, ReplacementMatrix::identity(2), config, 2);
  REQUIRE(models.size() == 2);
  CHECK(models[0].weights.size() == 2);
  CHECK(models[1].doc_id == "empty");
  CHECK(models[1].weights.empty());
}
