#include "polya/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "polya/evaluation.hpp"
#include "polya/model_io.hpp"

namespace polya {

RetrievalModel::RetrievalModel(std::vector<double> background_u0,
                               std::vector<DocumentModel> doc_models,
                               double mu)
    : background_(std::move(background_u0)), mu_(mu) {
  if (!(mu_ > 0.0)) throw std::invalid_argument("mu must be > 0");
  if (background_.empty()) {
    throw std::invalid_argument("background model must not be empty");
  }
  for (double u : background_) {
    if (!(u > 0.0)) {
      throw std::invalid_argument("background entries must be > 0");
    }
    background_mass_ += u;
  }

  docs_.reserve(doc_models.size());
  for (DocumentModel& dm : doc_models) {
    Doc doc;
    doc.doc_id = std::move(dm.doc_id);
    doc.weights = std::move(dm.weights);
    double total = 0.0;
    for (const TermWeight& tw : doc.weights) {
      if (tw.term >= background_.size()) {
        throw std::invalid_argument("document model term outside vocabulary");
      }
      if (!(tw.weight > 0.0)) {
        throw std::invalid_argument("document model weights must be > 0");
      }
      total += tw.weight;
    }
    // mu_d: the initial mass of the document model is its unique term count.
    doc.mass = static_cast<double>(doc.weights.size());
    if (total > 0.0) {
      const double rescale = doc.mass / total;
      for (TermWeight& tw : doc.weights) tw.weight *= rescale;
    }
    std::sort(doc.weights.begin(), doc.weights.end(),
              [](const TermWeight& a, const TermWeight& b) {
                return a.term < b.term;
              });
    docs_.push_back(std::move(doc));
  }
}

double RetrievalModel::score(std::size_t doc_index,
                             std::span<const term_id> query_terms,
                             double mu) const {
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be > 0");
  const Doc& doc = docs_.at(doc_index);
  const double denom = doc.mass + mu;
  double total = 0.0;
  for (term_id t : query_terms) {
    double w = 0.0;
    const auto it = std::lower_bound(
        doc.weights.begin(), doc.weights.end(), t,
        [](const TermWeight& tw, term_id id) { return tw.term < id; });
    if (it != doc.weights.end() && it->term == t) w = it->weight;
    const double background_p = background_[t] / background_mass_;
    total += std::log((w + mu * background_p) / denom);
  }
  return total;
}

std::vector<QueryRun> run_queries(const RetrievalModel& model,
                                  std::span<const Query> queries, int top_k,
                                  std::optional<double> mu,
                                  bool unique_terms) {
  if (top_k < 1) throw std::invalid_argument("top_k must be >= 1");
  const double mu_value = mu.value_or(model.mu());

  std::vector<QueryRun> runs;
  runs.reserve(queries.size());

  std::vector<term_id> terms;
  std::vector<std::size_t> order(model.doc_count());

  for (const Query& query : queries) {
    QueryRun run;
    run.query_id = query.query_id;
    terms.assign(query.tokens.begin(), query.tokens.end());
    if (unique_terms) {
      std::sort(terms.begin(), terms.end());
      terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    }
    if (terms.empty()) {
      run.empty_query = true;
      runs.push_back(std::move(run));
      continue;
    }

    std::vector<double> scores(model.doc_count());
    for (std::size_t d = 0; d < model.doc_count(); ++d) {
      scores[d] = model.score(d, terms, mu_value);
    }

    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t k =
        std::min<std::size_t>(static_cast<std::size_t>(top_k), order.size());
    auto better = [&](std::size_t a, std::size_t b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return model.doc_id(a) < model.doc_id(b);
    };
    std::partial_sort(order.begin(),
                      order.begin() + static_cast<std::ptrdiff_t>(k),
                      order.end(), better);

    run.ranked.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
      run.ranked.push_back({model.doc_id(order[i]), scores[order[i]]});
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

MuSweepResult sweep_mu(std::span<const double> mu_values,
                       const RetrievalModel& model,
                       std::span<const Query> queries, const Qrels& qrels,
                       int top_k, bool unique_terms) {
  if (mu_values.empty()) {
    throw std::invalid_argument("sweep requires at least one mu value");
  }
  MuSweepResult result;
  result.rows.reserve(mu_values.size());
  for (double mu : mu_values) {
    const auto runs = run_queries(model, queries, top_k, mu, unique_terms);
    const MapResult map = mean_average_precision(runs, qrels);
    result.rows.push_back({mu, map.value});
  }
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    if (result.rows[i].map > result.rows[result.best_index].map) {
      result.best_index = i;
    }
  }
  return result;
}

void write_trec_run(std::ostream& out, std::span<const QueryRun> runs,
                    const std::string& run_tag) {
  for (const QueryRun& run : runs) {
    int rank = 1;
    for (const ScoredDoc& sd : run.ranked) {
      out << run.query_id << " Q0 " << sd.doc_id << " " << rank << " "
          << format_double(sd.score) << " " << run_tag << "\n";
      ++rank;
    }
  }
}

}  // namespace polya
