#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polya/corpus.hpp"
#include "polya/estimation.hpp"

namespace polya {

struct Qrels;  // evaluation.hpp

struct ScoredDoc {
  std::string doc_id;
  double score;
};

struct QueryRun {
  std::string query_id;
  std::vector<ScoredDoc> ranked;  // descending score; ties by doc_id ascending
  bool empty_query = false;       // query had no in-vocabulary terms
};

// Query-likelihood retrieval with zero query dynamics: a background model
// plus per-document models, linearly combined with weight mu_d/(mu_d + mu)
// where mu_d is the document's unique term count. Document models are
// L1-rescaled at construction so their mass equals mu_d exactly.
class RetrievalModel {
 public:
  RetrievalModel(std::vector<double> background_u0,
                 std::vector<DocumentModel> doc_models, double mu);

  double mu() const { return mu_; }
  std::size_t doc_count() const { return docs_.size(); }
  const std::string& doc_id(std::size_t i) const { return docs_[i].doc_id; }

  // log p(q | d) = sum over query token instances of
  //   log( w_t/(mu_d + mu) + mu/(mu_d + mu) * bg_t/|bg| )
  // with w_t = 0 for terms absent from the document.
  double score(std::size_t doc_index, std::span<const term_id> query_terms,
               double mu) const;
  double score(std::size_t doc_index,
               std::span<const term_id> query_terms) const {
    return score(doc_index, query_terms, mu_);
  }

 private:
  struct Doc {
    std::string doc_id;
    std::vector<TermWeight> weights;  // sorted by term, rescaled to mass
    double mass;                      // mu_d = unique term count
  };

  std::vector<double> background_;
  double background_mass_ = 0.0;
  std::vector<Doc> docs_;
  double mu_;
};

// Scores every document per query and keeps the top k (ties broken by doc_id
// ascending). Queries without in-vocabulary terms yield an empty, flagged
// run. unique_terms switches the query-term sum from multiset to set
// semantics.
std::vector<QueryRun> run_queries(const RetrievalModel& model,
                                  std::span<const Query> queries, int top_k,
                                  std::optional<double> mu = std::nullopt,
                                  bool unique_terms = false);

struct MuSweepRow {
  double mu;
  double map;
};
struct MuSweepResult {
  std::vector<MuSweepRow> rows;
  std::size_t best_index = 0;  // argmax MAP (first on ties)
};

// Evaluates run_queries + MAP for each mu value.
MuSweepResult sweep_mu(std::span<const double> mu_values,
                       const RetrievalModel& model,
                       std::span<const Query> queries, const Qrels& qrels,
                       int top_k, bool unique_terms = false);

// One "query_id Q0 doc_id rank score run_tag" line per ranked document.
void write_trec_run(std::ostream& out, std::span<const QueryRun> runs,
                    const std::string& run_tag);

}  // namespace polya
