#include "polya/estimation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

namespace polya {

namespace {

constexpr double kLogBound = 30.0;  // log-parameter box, keeps the walk proper
constexpr std::int64_t kReanchorAccepts = 4096;  // full re-eval cadence

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  return splitmix64(base ^ splitmix64(fnv1a(tag)));
}

ChainConfig ChainConfig::scaled(double factor) const {
  if (!(factor > 0.0)) {
    throw std::invalid_argument("chain scale factor must be > 0");
  }
  ChainConfig scaled = *this;
  scaled.n_samples = std::max<std::int64_t>(
      2, static_cast<std::int64_t>(static_cast<double>(n_samples) * factor));
  scaled.burn_in = std::min<std::int64_t>(
      scaled.n_samples - 1,
      static_cast<std::int64_t>(static_cast<double>(burn_in) * factor));
  return scaled;
}

PosteriorEstimate mh_chain(LogTarget& target, std::size_t dim,
                           const ChainConfig& config,
                           const SampleObserver& on_retained) {
  if (dim == 0) throw std::invalid_argument("mh_chain requires dim > 0");
  if (config.n_samples <= 0 || config.burn_in < 0 ||
      config.burn_in >= config.n_samples) {
    throw std::invalid_argument("require 0 <= burn_in < n_samples");
  }
  if (!(config.proposal_sigma > 0.0)) {
    throw std::invalid_argument("proposal_sigma must be > 0");
  }
  if (config.thinning < 1) throw std::invalid_argument("thinning must be >= 1");
  if (config.proposal_mode == ProposalMode::blockwise && config.block_size == 0) {
    throw std::invalid_argument("block_size must be >= 1");
  }

  std::mt19937_64 rng(config.rng_seed);
  std::normal_distribution<double> gauss(0.0, config.proposal_sigma);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const std::size_t block_size =
      config.proposal_mode == ProposalMode::joint ? dim : config.block_size;
  const std::size_t n_blocks = (dim + block_size - 1) / block_size;
  std::uniform_int_distribution<std::size_t> pick_block(0, n_blocks - 1);

  std::vector<double> theta(dim, 0.0);       // log-space position
  std::vector<double> params(dim, 1.0);      // exp(theta)
  std::vector<double> proposal(params);      // scratch, mirrors params
  std::vector<double> theta_prop(dim, 0.0);
  std::vector<std::uint32_t> changed;
  changed.reserve(block_size);

  PosteriorEstimate estimate;
  estimate.mean_params.assign(dim, 0.0);

  double current = target.log_density(params);
  if (!std::isfinite(current)) {
    throw std::invalid_argument(
        "log posterior is not finite at the all-ones starting point");
  }
  estimate.log_density_start = current;

  std::int64_t accepted = 0;
  for (std::int64_t step = 0; step < config.n_samples; ++step) {
    const std::size_t block = n_blocks > 1 ? pick_block(rng) : 0;
    const std::size_t lo = block * block_size;
    const std::size_t hi = std::min(dim, lo + block_size);

    changed.clear();
    bool in_bounds = true;
    for (std::size_t i = lo; i < hi; ++i) {
      const double t = theta[i] + gauss(rng);
      theta_prop[i] = t;
      if (t < -kLogBound || t > kLogBound) in_bounds = false;
      changed.push_back(static_cast<std::uint32_t>(i));
    }

    if (in_bounds) {
      for (std::uint32_t i : changed) proposal[i] = std::exp(theta_prop[i]);
      const double value = target.propose(proposal, changed);
      const double log_ratio = value - current;
      if (log_ratio >= 0.0 || unif(rng) < std::exp(log_ratio)) {
        for (std::uint32_t i : changed) {
          theta[i] = theta_prop[i];
          params[i] = proposal[i];
        }
        current = value;
        target.accept();
        ++accepted;
        if (accepted % kReanchorAccepts == 0) {
          current = target.log_density(params);  // shed accumulated drift
        }
      } else {
        for (std::uint32_t i : changed) proposal[i] = params[i];
        target.reject();
      }
    }

    if (step >= config.burn_in &&
        (step - config.burn_in) % config.thinning == 0) {
      estimate.n_retained += 1;
      const double w = 1.0 / static_cast<double>(estimate.n_retained);
      for (std::size_t i = 0; i < dim; ++i) {
        estimate.mean_params[i] += (params[i] - estimate.mean_params[i]) * w;
      }
      if (on_retained) on_retained(params);
    }
  }

  estimate.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(config.n_samples);
  estimate.log_density_end = current;
  return estimate;
}

namespace {

class FunctionTarget final : public LogTarget {
 public:
  explicit FunctionTarget(
      const std::function<double(std::span<const double>)>& f)
      : f_(f) {}
  double log_density(std::span<const double> params) override {
    return f_(params);
  }

 private:
  const std::function<double(std::span<const double>)>& f_;
};

}  // namespace

PosteriorEstimate mh_chain(
    const std::function<double(std::span<const double>)>& log_posterior,
    std::size_t dim, const ChainConfig& config,
    const SampleObserver& on_retained) {
  FunctionTarget target(log_posterior);
  return mh_chain(target, dim, config, on_retained);
}

std::vector<double> mle_multinomial(const Corpus& corpus) {
  if (corpus.total_tokens() <= 0) {
    throw std::invalid_argument("corpus has no tokens");
  }
  std::vector<double> u0(corpus.vocabulary_size());
  const double n = static_cast<double>(corpus.total_tokens());
  for (term_id t = 0; t < u0.size(); ++t) {
    u0[t] = static_cast<double>(corpus.cf(t)) / n;
  }
  return u0;
}

// ---------------------------------------------------------------------------
// Incremental collection-likelihood targets.
//
// All three share the same bookkeeping pattern: log_density() recomputes
// every cached sum from scratch and makes `params` the current point;
// propose() evaluates a candidate that differs only in `changed` coordinates
// by patching the cached sums; accept()/reject() commit or drop the patch.
// ---------------------------------------------------------------------------

namespace {

using DocSpans = std::vector<std::span<const term_id>>;

DocSpans corpus_doc_spans(const Corpus& corpus) {
  DocSpans spans;
  spans.reserve(corpus.doc_count());
  for (const Document& d : corpus.documents()) spans.push_back(d.tokens);
  return spans;
}

// Zero matrix: sum_t cf_t log(u_t) - N log(|u|).
class MultinomialTarget final : public LogTarget {
 public:
  MultinomialTarget(std::size_t vocab, const DocSpans& docs)
      : cf_(vocab, 0.0) {
    for (const auto& doc : docs) {
      for (term_id t : doc) {
        cf_[t] += 1.0;
        n_ += 1.0;
      }
    }
  }

  double log_density(std::span<const double> params) override {
    cur_.assign(params.begin(), params.end());
    contrib_.resize(cur_.size());
    sum_ = 0.0;
    mass_ = 0.0;
    for (std::size_t t = 0; t < cur_.size(); ++t) {
      contrib_[t] = cf_[t] > 0.0 ? cf_[t] * std::log(cur_[t]) : 0.0;
      sum_ += contrib_[t];
      mass_ += cur_[t];
    }
    pending_.clear();
    return sum_ - n_ * std::log(mass_);
  }

  double propose(std::span<const double> params,
                 std::span<const std::uint32_t> changed) override {
    pending_.clear();
    double dsum = 0.0;
    double dmass = 0.0;
    for (std::uint32_t i : changed) {
      const double c = cf_[i] > 0.0 ? cf_[i] * std::log(params[i]) : 0.0;
      dsum += c - contrib_[i];
      dmass += params[i] - cur_[i];
      pending_.push_back({i, params[i], c});
    }
    pend_sum_ = sum_ + dsum;
    pend_mass_ = mass_ + dmass;
    return pend_sum_ - n_ * std::log(pend_mass_);
  }

  void accept() override {
    for (const Pending& p : pending_) {
      cur_[p.index] = p.value;
      contrib_[p.index] = p.contrib;
    }
    sum_ = pend_sum_;
    mass_ = pend_mass_;
    pending_.clear();
  }

  void reject() override { pending_.clear(); }

 private:
  struct Pending {
    std::uint32_t index;
    double value;
    double contrib;
  };

  std::vector<double> cf_;
  double n_ = 0.0;

  std::vector<double> cur_;
  std::vector<double> contrib_;
  double sum_ = 0.0;
  double mass_ = 0.0;
  std::vector<Pending> pending_;
  double pend_sum_ = 0.0;
  double pend_mass_ = 0.0;
};

// Shared by the DCM and GSPUD targets: for each term, the histogram of its
// per-document counts, i.e. how many documents contain it exactly c times.
struct TermHistograms {
  struct Entry {
    std::uint32_t count;
    double multiplicity;
  };
  std::vector<std::uint32_t> offset;  // size vocab + 1
  std::vector<Entry> entries;
  std::vector<double> df;

  TermHistograms(std::size_t vocab, const DocSpans& docs) {
    std::vector<std::vector<Entry>> per_term(vocab);
    for (const auto& doc : docs) {
      for (const TermCount& tc : count_terms(doc)) {
        auto& hist = per_term[tc.term];
        auto it = std::find_if(hist.begin(), hist.end(), [&](const Entry& e) {
          return e.count == tc.count;
        });
        if (it == hist.end()) {
          hist.push_back({tc.count, 1.0});
        } else {
          it->multiplicity += 1.0;
        }
      }
    }
    offset.resize(vocab + 1, 0);
    df.resize(vocab, 0.0);
    for (std::size_t t = 0; t < vocab; ++t) {
      std::sort(per_term[t].begin(), per_term[t].end(),
                [](const Entry& a, const Entry& b) { return a.count < b.count; });
      offset[t + 1] = offset[t] + static_cast<std::uint32_t>(per_term[t].size());
      for (const Entry& e : per_term[t]) {
        entries.push_back(e);
        df[t] += e.multiplicity;
      }
    }
  }

  std::span<const Entry> of(std::size_t t) const {
    return std::span<const Entry>(entries).subspan(offset[t],
                                                   offset[t + 1] - offset[t]);
  }
};

// Identity matrix: per document, the DCM closed form; grouped by term-count
// histograms and a document-length histogram so block proposals are cheap.
class DcmTarget final : public LogTarget {
 public:
  DcmTarget(std::size_t vocab, const DocSpans& docs) : hist_(vocab, docs) {
    std::vector<std::pair<double, double>> lens;
    for (const auto& doc : docs) {
      if (doc.empty()) continue;
      const double len = static_cast<double>(doc.size());
      auto it = std::find_if(lens.begin(), lens.end(),
                             [&](const auto& p) { return p.first == len; });
      if (it == lens.end()) {
        lens.push_back({len, 1.0});
      } else {
        it->second += 1.0;
      }
      n_docs_ += 1.0;
    }
    std::sort(lens.begin(), lens.end());
    len_hist_ = std::move(lens);
  }

  double log_density(std::span<const double> params) override {
    cur_.assign(params.begin(), params.end());
    contrib_.resize(cur_.size());
    sum_ = 0.0;
    mass_ = 0.0;
    for (std::size_t t = 0; t < cur_.size(); ++t) {
      contrib_[t] = term_contrib(t, cur_[t]);
      sum_ += contrib_[t];
      mass_ += cur_[t];
    }
    pending_.clear();
    return sum_ - mass_part(mass_);
  }

  double propose(std::span<const double> params,
                 std::span<const std::uint32_t> changed) override {
    pending_.clear();
    double dsum = 0.0;
    double dmass = 0.0;
    for (std::uint32_t i : changed) {
      const double c = term_contrib(i, params[i]);
      dsum += c - contrib_[i];
      dmass += params[i] - cur_[i];
      pending_.push_back({i, params[i], c});
    }
    pend_sum_ = sum_ + dsum;
    pend_mass_ = mass_ + dmass;
    return pend_sum_ - mass_part(pend_mass_);
  }

  void accept() override {
    for (const Pending& p : pending_) {
      cur_[p.index] = p.value;
      contrib_[p.index] = p.contrib;
    }
    sum_ = pend_sum_;
    mass_ = pend_mass_;
    pending_.clear();
  }

  void reject() override { pending_.clear(); }

 private:
  struct Pending {
    std::uint32_t index;
    double value;
    double contrib;
  };

  double term_contrib(std::size_t t, double u) const {
    const auto entries = hist_.of(t);
    if (entries.empty()) return 0.0;
    double c = -hist_.df[t] * log_gamma(u);
    for (const auto& e : entries) {
      c += e.multiplicity * log_gamma(u + static_cast<double>(e.count));
    }
    return c;
  }

  // sum_d [lgamma(mass + n_d) - lgamma(mass)]
  double mass_part(double mass) const {
    double mp = -n_docs_ * log_gamma(mass);
    for (const auto& [len, cnt] : len_hist_) {
      mp += cnt * log_gamma(mass + len);
    }
    return mp;
  }

  TermHistograms hist_;
  std::vector<std::pair<double, double>> len_hist_;
  double n_docs_ = 0.0;

  std::vector<double> cur_;
  std::vector<double> contrib_;
  double sum_ = 0.0;
  double mass_ = 0.0;
  std::vector<Pending> pending_;
  double pend_sum_ = 0.0;
  double pend_mass_ = 0.0;
};

// Diagonal matrix. Numerators group by term as sum_k log(u_t + k m_t); the
// denominators depend on token order through prefix sums of m over each
// document, so those are cached per token and per document.
//
// Parameter layout: [u_0..u_{v-1}] and, when m is estimated, [m_0..m_{v-1}]
// appended (dim 2v).
class GspudTarget final : public LogTarget {
 public:
  GspudTarget(std::size_t vocab, DocSpans docs, bool estimate_m,
              std::span<const double> fixed_diag)
      : vocab_(vocab),
        estimate_m_(estimate_m),
        fixed_m_(fixed_diag.begin(), fixed_diag.end()),
        docs_(std::move(docs)),
        hist_(vocab, docs_) {
    if (!estimate_m_ && fixed_m_.size() != vocab_) {
      throw std::invalid_argument("fixed diagonal must have one entry per term");
    }
    doc_off_.resize(docs_.size() + 1, 0);
    for (std::size_t d = 0; d < docs_.size(); ++d) {
      doc_off_[d + 1] = doc_off_[d] + static_cast<std::uint32_t>(docs_[d].size());
    }
    prefix_.resize(doc_off_.back());
    denom_.resize(docs_.size(), 0.0);
    postings_.resize(vocab_);
    for (std::size_t d = 0; d < docs_.size(); ++d) {
      for (const TermCount& tc : count_terms(docs_[d])) {
        postings_[tc.term].push_back(static_cast<std::uint32_t>(d));
      }
    }
    doc_stamp_.resize(docs_.size(), 0);
  }

  std::size_t dim() const { return estimate_m_ ? 2 * vocab_ : vocab_; }

  double log_density(std::span<const double> params) override {
    cur_.assign(params.begin(), params.end());
    contrib_.resize(vocab_);
    sum_ = 0.0;
    mass0_ = 0.0;
    for (std::size_t t = 0; t < vocab_; ++t) {
      contrib_[t] = term_contrib(t, params[t], m_of(params, t));
      sum_ += contrib_[t];
      mass0_ += params[t];
    }
    denom_total_ = 0.0;
    for (std::size_t d = 0; d < docs_.size(); ++d) {
      double running = 0.0;
      double dd = 0.0;
      for (std::size_t i = 0; i < docs_[d].size(); ++i) {
        prefix_[doc_off_[d] + i] = running;
        dd += std::log(mass0_ + running);
        running += m_of(params, docs_[d][i]);
      }
      denom_[d] = dd;
      denom_total_ += dd;
    }
    clear_pending();
    return sum_ - denom_total_;
  }

  double propose(std::span<const double> params,
                 std::span<const std::uint32_t> changed) override {
    clear_pending();

    // `changed` is strictly increasing, with u coordinates before m ones.
    double dmass = 0.0;
    bool u_changed = false;
    bool m_changed = false;
    pend_u_terms_.clear();
    for (std::uint32_t i : changed) {
      pend_coords_.push_back({i, params[i]});
      if (i < vocab_) {
        dmass += params[i] - cur_[i];
        u_changed = true;
        pend_u_terms_.push_back(i);
      } else {
        m_changed = true;
        pend_m_terms_.push_back(i - vocab_);
      }
    }
    std::set_union(pend_u_terms_.begin(), pend_u_terms_.end(),
                   pend_m_terms_.begin(), pend_m_terms_.end(),
                   std::back_inserter(pend_terms_));
    pend_mass0_ = mass0_ + dmass;

    double dsum = 0.0;
    for (std::uint32_t t : pend_terms_) {
      const double c = term_contrib(t, params[t], m_of(params, t));
      dsum += c - contrib_[t];
      pend_contrib_.push_back({t, c});
    }
    pend_sum_ = sum_ + dsum;

    if (m_changed) {
      ++stamp_epoch_;
      for (std::uint32_t t : pend_m_terms_) {
        for (std::uint32_t d : postings_[t]) {
          if (doc_stamp_[d] != stamp_epoch_) {
            doc_stamp_[d] = stamp_epoch_;
            pend_docs_.push_back(d);
          }
        }
      }
      std::sort(pend_docs_.begin(), pend_docs_.end());
      pend_prefix_.clear();
      pend_denom_.clear();
      for (std::uint32_t d : pend_docs_) {
        double running = 0.0;
        double dd = 0.0;
        for (term_id tok : docs_[d]) {
          pend_prefix_.push_back(running);
          dd += std::log(pend_mass0_ + running);
          running += m_of(params, tok);
        }
        pend_denom_.push_back(dd);
      }
    }

    if (u_changed) {
      // Every denominator sees the new total mass.
      pend_all_denoms_.resize(docs_.size());
      pend_denom_total_ = 0.0;
      std::size_t pend_idx = 0;
      for (std::size_t d = 0; d < docs_.size(); ++d) {
        double dd;
        if (m_changed && doc_stamp_[d] == stamp_epoch_) {
          dd = pend_denom_[pend_idx++];
        } else {
          dd = 0.0;
          const std::uint32_t lo = doc_off_[d];
          const std::uint32_t hi = doc_off_[d + 1];
          for (std::uint32_t i = lo; i < hi; ++i) {
            dd += std::log(pend_mass0_ + prefix_[i]);
          }
        }
        pend_all_denoms_[d] = dd;
        pend_denom_total_ += dd;
      }
      pend_full_denoms_ = true;
    } else if (m_changed) {
      pend_denom_total_ = denom_total_;
      for (std::size_t k = 0; k < pend_docs_.size(); ++k) {
        pend_denom_total_ += pend_denom_[k] - denom_[pend_docs_[k]];
      }
    } else {
      pend_denom_total_ = denom_total_;
    }

    pend_m_changed_ = m_changed;
    return pend_sum_ - pend_denom_total_;
  }

  void accept() override {
    for (const auto& [t, c] : pend_contrib_) contrib_[t] = c;
    for (const auto& [i, value] : pend_coords_) cur_[i] = value;
    sum_ = pend_sum_;
    mass0_ = pend_mass0_;
    if (pend_m_changed_) {
      std::size_t off = 0;
      for (std::size_t k = 0; k < pend_docs_.size(); ++k) {
        const std::uint32_t d = pend_docs_[k];
        const std::uint32_t lo = doc_off_[d];
        const std::uint32_t len = doc_off_[d + 1] - lo;
        std::copy_n(pend_prefix_.begin() + static_cast<std::ptrdiff_t>(off),
                    len, prefix_.begin() + lo);
        off += len;
        denom_[d] = pend_denom_[k];
      }
    }
    if (pend_full_denoms_) {
      denom_.swap(pend_all_denoms_);
      denom_total_ = pend_denom_total_;
    } else {
      denom_total_ = pend_denom_total_;
    }
    clear_pending();
  }

  void reject() override { clear_pending(); }

 private:
  double m_of(std::span<const double> params, term_id t) const {
    return estimate_m_ ? params[vocab_ + t] : fixed_m_[t];
  }

  // sum over documents containing t of sum_{k=0}^{c-1} log(u + k m),
  // via the count histogram. Direct summation; c is a per-document term
  // frequency, so the inner loop is short and avoids the precision loss of
  // lgamma differences at extreme u/m ratios.
  double term_contrib(std::size_t t, double u, double m) const {
    const auto entries = hist_.of(t);
    if (entries.empty()) return 0.0;
    double total = 0.0;
    std::uint32_t k = 0;
    double partial = 0.0;  // sum_{j<k} log(u + j m), shared across entries
    for (const auto& e : entries) {
      while (k < e.count) {
        partial += std::log(u + static_cast<double>(k) * m);
        ++k;
      }
      total += e.multiplicity * partial;
    }
    return total;
  }

  void clear_pending() {
    pend_terms_.clear();
    pend_u_terms_.clear();
    pend_m_terms_.clear();
    pend_coords_.clear();
    pend_contrib_.clear();
    pend_docs_.clear();
    pend_prefix_.clear();
    pend_denom_.clear();
    pend_full_denoms_ = false;
    pend_m_changed_ = false;
  }

  std::size_t vocab_;
  bool estimate_m_;
  std::vector<double> fixed_m_;
  DocSpans docs_;
  TermHistograms hist_;

  std::vector<std::uint32_t> doc_off_;
  std::vector<double> prefix_;  // running m-mass before each draw
  std::vector<double> denom_;   // per-document sum of log(mass0 + prefix)
  std::vector<std::vector<std::uint32_t>> postings_;

  // current point
  std::vector<double> cur_;
  std::vector<double> contrib_;
  double sum_ = 0.0;
  double mass0_ = 0.0;
  double denom_total_ = 0.0;

  // proposal scratch
  std::vector<std::uint32_t> pend_terms_;
  std::vector<std::uint32_t> pend_u_terms_;
  std::vector<std::uint32_t> pend_m_terms_;
  std::vector<std::pair<std::uint32_t, double>> pend_coords_;
  std::vector<std::pair<std::uint32_t, double>> pend_contrib_;
  std::vector<std::uint32_t> pend_docs_;
  std::vector<double> pend_prefix_;
  std::vector<double> pend_denom_;
  std::vector<double> pend_all_denoms_;
  double pend_sum_ = 0.0;
  double pend_mass0_ = 0.0;
  double pend_denom_total_ = 0.0;
  bool pend_full_denoms_ = false;
  bool pend_m_changed_ = false;
  std::vector<std::uint32_t> doc_stamp_;
  std::uint32_t stamp_epoch_ = 0;
};

}  // namespace

std::unique_ptr<LogTarget> make_background_target(
    const Corpus& corpus, BackgroundVariant variant,
    std::span<const double> fixed_diag) {
  const std::size_t v = corpus.vocabulary_size();
  DocSpans docs = corpus_doc_spans(corpus);
  switch (variant) {
    case BackgroundVariant::multinomial:
      return std::make_unique<MultinomialTarget>(v, docs);
    case BackgroundVariant::dcm:
      return std::make_unique<DcmTarget>(v, docs);
    case BackgroundVariant::gspud_fixed_m:
      return std::make_unique<GspudTarget>(v, std::move(docs), false,
                                           fixed_diag);
    case BackgroundVariant::gspud_estimate_m:
      return std::make_unique<GspudTarget>(v, std::move(docs), true,
                                           std::span<const double>{});
  }
  throw std::invalid_argument("unknown background variant");
}

UrnModel estimate_background(const Corpus& corpus, BackgroundVariant variant,
                             std::span<const double> fixed_diag,
                             const ChainConfig& config,
                             EstimationReport* report) {
  const std::size_t v = corpus.vocabulary_size();
  if (variant == BackgroundVariant::gspud_fixed_m) {
    if (fixed_diag.size() != v) {
      throw std::invalid_argument(
          "gspud_fixed_m requires one diagonal entry per term");
    }
    for (double m : fixed_diag) {
      if (!(m > 0.0)) {
        throw std::invalid_argument("fixed diagonal entries must be > 0");
      }
    }
  }

  auto target = make_background_target(corpus, variant, fixed_diag);
  const std::size_t dim =
      variant == BackgroundVariant::gspud_estimate_m ? 2 * v : v;
  PosteriorEstimate estimate = mh_chain(*target, dim, config);

  if (report) {
    report->acceptance_rate = estimate.acceptance_rate;
    report->n_retained = estimate.n_retained;
    report->log_likelihood_start = estimate.log_density_start;
    report->log_likelihood_end = estimate.log_density_end;
  }

  switch (variant) {
    case BackgroundVariant::multinomial:
      return UrnModel(std::move(estimate.mean_params),
                      ReplacementMatrix::zero(v));
    case BackgroundVariant::dcm:
      return UrnModel(std::move(estimate.mean_params),
                      ReplacementMatrix::identity(v));
    case BackgroundVariant::gspud_fixed_m:
      return UrnModel(
          std::move(estimate.mean_params),
          ReplacementMatrix::diagonal(
              std::vector<double>(fixed_diag.begin(), fixed_diag.end())));
    case BackgroundVariant::gspud_estimate_m: {
      std::vector<double> u0(estimate.mean_params.begin(),
                             estimate.mean_params.begin() +
                                 static_cast<std::ptrdiff_t>(v));
      std::vector<double> diag(estimate.mean_params.begin() +
                                   static_cast<std::ptrdiff_t>(v),
                               estimate.mean_params.end());
      return UrnModel(std::move(u0),
                      ReplacementMatrix::diagonal(std::move(diag)));
    }
  }
  throw std::invalid_argument("unknown background variant");
}

std::vector<TermWeight> estimate_document(const Document& doc,
                                          const ReplacementMatrix& matrix,
                                          const ChainConfig& config,
                                          EstimationReport* report) {
  if (doc.tokens.empty()) {
    throw std::invalid_argument("cannot estimate a model for an empty document");
  }
  if (matrix.kind() == MatrixKind::full) {
    throw std::invalid_argument(
        "full replacement dynamics are not supported for document estimation");
  }

  const std::vector<TermCount> counts = count_terms(doc.tokens);
  std::vector<term_id> terms;
  terms.reserve(counts.size());
  for (const TermCount& tc : counts) terms.push_back(tc.term);

  if (terms.size() == 1) {
    // Single-colour urn: the likelihood is constantly one, keep the start.
    if (report) *report = EstimationReport{};
    return {{terms[0], 1.0}};
  }

  // Remap the document onto the compact vocabulary of its own terms.
  std::vector<term_id> compact;
  compact.reserve(doc.tokens.size());
  for (term_id t : doc.tokens) {
    const auto it = std::lower_bound(terms.begin(), terms.end(), t);
    compact.push_back(static_cast<term_id>(it - terms.begin()));
  }

  const std::size_t u = terms.size();
  std::vector<std::span<const term_id>> docs{compact};

  std::unique_ptr<LogTarget> target;
  std::vector<double> local_diag;
  switch (matrix.kind()) {
    case MatrixKind::zero:
      target = std::make_unique<MultinomialTarget>(u, docs);
      break;
    case MatrixKind::identity:
      target = std::make_unique<DcmTarget>(u, docs);
      break;
    case MatrixKind::diagonal: {
      local_diag.reserve(u);
      for (term_id t : terms) local_diag.push_back(matrix.diag()[t]);
      target = std::make_unique<GspudTarget>(u, std::move(docs), false,
                                             local_diag);
      break;
    }
    case MatrixKind::full:
      break;  // rejected above
  }

  PosteriorEstimate estimate = mh_chain(*target, u, config);
  if (report) {
    report->acceptance_rate = estimate.acceptance_rate;
    report->n_retained = estimate.n_retained;
    report->log_likelihood_start = estimate.log_density_start;
    report->log_likelihood_end = estimate.log_density_end;
  }

  std::vector<TermWeight> weights;
  weights.reserve(u);
  for (std::size_t i = 0; i < u; ++i) {
    weights.push_back({terms[i], estimate.mean_params[i]});
  }
  return weights;
}

std::vector<DocumentModel> estimate_documents(const Corpus& corpus,
                                              const ReplacementMatrix& matrix,
                                              const ChainConfig& config,
                                              unsigned threads) {
  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  const std::size_t n = corpus.doc_count();
  std::vector<DocumentModel> models(n);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) break;
      const Document& doc = corpus.document(i);
      try {
        models[i].doc_id = doc.doc_id;
        if (doc.tokens.empty()) continue;  // stopword-only body: no model
        ChainConfig doc_config = config;
        doc_config.rng_seed = derive_seed(config.rng_seed, doc.doc_id);
        models[i].weights = estimate_document(doc, matrix, doc_config);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed.store(true);
        if (error.empty()) {
          error = "document " + doc.doc_id + ": " + e.what();
        }
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  if (failed.load()) throw std::runtime_error(error);
  return models;
}

}  // namespace polya
