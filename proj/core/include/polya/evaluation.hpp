#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "polya/corpus.hpp"
#include "polya/retrieval.hpp"
#include "polya/urn.hpp"

namespace polya {

struct Qrels {
  // Queries judged with zero relevant documents keep an empty set and are
  // excluded from MAP.
  std::unordered_map<std::string, std::unordered_set<std::string>> relevant;
};

// Accepts "query_id doc_id", "query_id doc_id rel" and the TREC layout
// "query_id 0 doc_id rel" (four columns whose second column is 0); a fourth
// layout "query_id doc_id x y" (as shipped with CISI) treats every listed
// pair as relevant. rel > 0 means relevant.
Qrels load_qrels(std::istream& in);

// exp( - sum_d log_likelihood(model, d) / total_tokens ), natural logs; each
// document restarts the urn at u0. Returns +infinity when any token has zero
// probability.
double perplexity(const UrnModel& model, const Corpus& corpus);

// (1/|relevant|) * sum over ranks r holding a relevant document of
// precision@r. Throws if the ranking has duplicates or `relevant` is empty.
double average_precision(std::span<const std::string> ranking,
                         const std::unordered_set<std::string>& relevant);

struct MapResult {
  double value = 0.0;
  std::size_t evaluated_queries = 0;
  std::vector<std::string> skipped_queries;  // absent from qrels or unjudged
};

// Mean of average_precision over queries with non-empty qrels. Throws when no
// query is evaluable.
MapResult mean_average_precision(std::span<const QueryRun> runs,
                                 const Qrels& qrels);

// Per-query APs for two runs, paired over the queries evaluable in both.
struct PairedAps {
  std::vector<std::string> query_ids;
  std::vector<double> a;
  std::vector<double> b;
};
PairedAps paired_average_precisions(std::span<const QueryRun> run_a,
                                    std::span<const QueryRun> run_b,
                                    const Qrels& qrels);

// Two-sided paired sign-flip randomization test on the mean difference, with
// add-one smoothing: p = (#{|perm| >= |observed|} + 1) / (n_permutations + 1).
double permutation_test(std::span<const double> ap_a,
                        std::span<const double> ap_b,
                        std::int64_t n_permutations, std::uint64_t seed);

std::vector<QueryRun> load_trec_run(std::istream& in);

}  // namespace polya
