#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polya/corpus.hpp"
#include "polya/urn.hpp"

namespace polya {

enum class ProposalMode { joint, blockwise };

// Hyperparameters of one Metropolis-Hastings random walk. Defaults are the
// background-model settings; document models use 200k/20k with sigma 0.5.
struct ChainConfig {
  std::int64_t n_samples = 500'000;
  std::int64_t burn_in = 50'000;
  double proposal_sigma = 0.1;  // std-dev of the Gaussian step in log space
  std::uint64_t rng_seed = 1;
  std::int64_t thinning = 10;
  ProposalMode proposal_mode = ProposalMode::blockwise;
  std::size_t block_size = 64;

  // Shrinks n_samples and burn_in by `factor` (keeps burn_in < n_samples).
  ChainConfig scaled(double factor) const;

  bool operator==(const ChainConfig&) const = default;
};

struct PosteriorEstimate {
  std::vector<double> mean_params;  // running mean, exponentiated space
  double acceptance_rate = 0.0;
  std::int64_t n_retained = 0;
  double log_density_start = 0.0;
  double log_density_end = 0.0;
};

// Target log density for MH sampling. propose() may reuse cached sums from
// the current point when only `changed` coordinates differ; accept()/reject()
// report whether the proposal became the current point.
class LogTarget {
 public:
  virtual ~LogTarget() = default;
  virtual double log_density(std::span<const double> params) = 0;
  virtual double propose(std::span<const double> params,
                         std::span<const std::uint32_t> changed) {
    (void)changed;
    return log_density(params);
  }
  virtual void accept() {}
  virtual void reject() {}
};

// Called with every retained (post-burn-in, thinned) chain state.
using SampleObserver = std::function<void(std::span<const double>)>;

// Random-walk Metropolis in log-parameter space, started from all-ones.
// Proposals outside log-parameter bounds [-30, 30] are rejected, which makes
// the otherwise-uniform prior proper. Deterministic for a fixed config.
PosteriorEstimate mh_chain(LogTarget& target, std::size_t dim,
                           const ChainConfig& config,
                           const SampleObserver& on_retained = {});
PosteriorEstimate mh_chain(
    const std::function<double(std::span<const double>)>& log_posterior,
    std::size_t dim, const ChainConfig& config,
    const SampleObserver& on_retained = {});

// Closed-form multinomial MLE: u0[t] = cf[t] / total_tokens.
std::vector<double> mle_multinomial(const Corpus& corpus);

enum class BackgroundVariant {
  multinomial,       // zero matrix, u0 sampled (dim v)
  dcm,               // identity matrix, u0 sampled (dim v)
  gspud_fixed_m,     // diagonal fixed, u0 sampled (dim v)
  gspud_estimate_m,  // diagonal and u0 sampled jointly (dim 2v)
};

// Collection log likelihood as a function of the sampled parameters, with
// incremental evaluation of block proposals. Every document restarts the urn
// at u0. Exposed for testing against the direct per-document evaluation.
std::unique_ptr<LogTarget> make_background_target(
    const Corpus& corpus, BackgroundVariant variant,
    std::span<const double> fixed_diag = {});

struct EstimationReport {
  double acceptance_rate = 0.0;
  std::int64_t n_retained = 0;
  double log_likelihood_start = 0.0;
  double log_likelihood_end = 0.0;
};

UrnModel estimate_background(const Corpus& corpus, BackgroundVariant variant,
                             std::span<const double> fixed_diag,
                             const ChainConfig& config,
                             EstimationReport* report = nullptr);

// Posterior-mean document model over the document's unique terms (sorted by
// term id; absent terms are implicitly zero). The replacement matrix is the
// collection-wide dynamics and stays fixed. A single-colour urn draws with
// probability one, so single-unique-term documents keep the starting value.
std::vector<TermWeight> estimate_document(const Document& doc,
                                          const ReplacementMatrix& matrix,
                                          const ChainConfig& config,
                                          EstimationReport* report = nullptr);

struct DocumentModel {
  std::string doc_id;
  std::vector<TermWeight> weights;  // sorted by term id, all positive
};

// Per-document chains seeded with derive_seed(config.rng_seed, doc_id), so
// results do not depend on scheduling. threads = 0 means hardware_concurrency.
std::vector<DocumentModel> estimate_documents(const Corpus& corpus,
                                              const ReplacementMatrix& matrix,
                                              const ChainConfig& config,
                                              unsigned threads = 0);

// splitmix64-based combination of a base seed and a stage/document tag.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag);

}  // namespace polya
