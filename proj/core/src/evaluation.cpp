#include "polya/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace polya {

Qrels load_qrels(std::istream& in) {
  Qrels qrels;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::vector<std::string> cols;
    std::string col;
    while (fields >> col) cols.push_back(col);
    if (cols.empty()) continue;

    std::string query_id, doc_id;
    double rel = 1.0;
    if (cols.size() == 2) {
      query_id = cols[0];
      doc_id = cols[1];
    } else if (cols.size() == 3) {
      query_id = cols[0];
      doc_id = cols[1];
      rel = std::stod(cols[2]);
    } else if (cols.size() == 4 && cols[1] == "0") {
      // TREC layout: query_id 0 doc_id rel
      query_id = cols[0];
      doc_id = cols[2];
      rel = std::stod(cols[3]);
    } else if (cols.size() == 4) {
      // CISI layout: query_id doc_id x y, every listed pair is relevant
      query_id = cols[0];
      doc_id = cols[1];
    } else {
      throw std::runtime_error("malformed qrels line: " + line);
    }

    // keeps judged-but-empty queries
    auto& set = qrels.relevant[normalize_id(std::move(query_id))];
    if (rel > 0.0) set.insert(normalize_id(std::move(doc_id)));
  }
  return qrels;
}

double perplexity(const UrnModel& model, const Corpus& corpus) {
  if (model.size() != corpus.vocabulary_size()) {
    throw std::invalid_argument(
        "model vocabulary does not cover the corpus vocabulary");
  }
  if (corpus.total_tokens() <= 0) {
    throw std::invalid_argument("corpus has no tokens");
  }
  double total = 0.0;
  for (const Document& doc : corpus.documents()) {
    const double ll = log_likelihood(model, doc.tokens);
    if (!std::isfinite(ll)) {
      return std::numeric_limits<double>::infinity();
    }
    total += ll;
  }
  return std::exp(-total / static_cast<double>(corpus.total_tokens()));
}

double average_precision(std::span<const std::string> ranking,
                         const std::unordered_set<std::string>& relevant) {
  if (relevant.empty()) {
    throw std::invalid_argument(
        "average precision undefined for an empty relevant set");
  }
  std::unordered_set<std::string> seen;
  seen.reserve(ranking.size());
  double hits = 0.0;
  double sum = 0.0;
  for (std::size_t r = 0; r < ranking.size(); ++r) {
    if (!seen.insert(ranking[r]).second) {
      throw std::invalid_argument("duplicate document in ranking: " +
                                  ranking[r]);
    }
    if (relevant.contains(ranking[r])) {
      hits += 1.0;
      sum += hits / static_cast<double>(r + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

namespace {

std::vector<std::string> ranked_ids(const QueryRun& run) {
  std::vector<std::string> ids;
  ids.reserve(run.ranked.size());
  for (const ScoredDoc& sd : run.ranked) ids.push_back(sd.doc_id);
  return ids;
}

}  // namespace

MapResult mean_average_precision(std::span<const QueryRun> runs,
                                 const Qrels& qrels) {
  MapResult result;
  double total = 0.0;
  for (const QueryRun& run : runs) {
    const auto it = qrels.relevant.find(run.query_id);
    if (it == qrels.relevant.end() || it->second.empty()) {
      result.skipped_queries.push_back(run.query_id);
      continue;
    }
    total += average_precision(ranked_ids(run), it->second);
    result.evaluated_queries += 1;
  }
  if (result.evaluated_queries == 0) {
    throw std::runtime_error("no evaluable query: nothing overlaps the qrels");
  }
  result.value = total / static_cast<double>(result.evaluated_queries);
  return result;
}

PairedAps paired_average_precisions(std::span<const QueryRun> run_a,
                                    std::span<const QueryRun> run_b,
                                    const Qrels& qrels) {
  std::unordered_map<std::string, const QueryRun*> b_by_id;
  for (const QueryRun& run : run_b) b_by_id[run.query_id] = &run;

  PairedAps out;
  for (const QueryRun& a : run_a) {
    const auto rel = qrels.relevant.find(a.query_id);
    if (rel == qrels.relevant.end() || rel->second.empty()) continue;
    const auto b = b_by_id.find(a.query_id);
    if (b == b_by_id.end()) continue;
    out.query_ids.push_back(a.query_id);
    out.a.push_back(average_precision(ranked_ids(a), rel->second));
    out.b.push_back(average_precision(ranked_ids(*b->second), rel->second));
  }
  return out;
}

double permutation_test(std::span<const double> ap_a,
                        std::span<const double> ap_b,
                        std::int64_t n_permutations, std::uint64_t seed) {
  if (ap_a.size() != ap_b.size()) {
    throw std::invalid_argument("paired AP vectors must have equal length");
  }
  if (ap_a.empty()) {
    throw std::invalid_argument("permutation test requires at least one pair");
  }
  if (n_permutations < 1) {
    throw std::invalid_argument("n_permutations must be >= 1");
  }

  const std::size_t n = ap_a.size();
  std::vector<double> diff(n);
  double observed = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = ap_a[i] - ap_b[i];
    observed += diff[i];
  }
  observed = std::abs(observed / static_cast<double>(n));

  // Slack of a few ulps so sign patterns that reproduce the observed
  // magnitude are counted despite floating-point reassociation.
  const double threshold = observed - 4e-15;

  std::mt19937_64 rng(seed);
  std::int64_t at_least = 0;
  for (std::int64_t it = 0; it < n_permutations; ++it) {
    double sum = 0.0;
    std::uint64_t bits = 0;
    int left = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (left == 0) {
        bits = rng();
        left = 64;
      }
      sum += (bits & 1) ? -diff[i] : diff[i];
      bits >>= 1;
      --left;
    }
    if (std::abs(sum / static_cast<double>(n)) >= threshold) ++at_least;
  }
  return static_cast<double>(at_least + 1) /
         static_cast<double>(n_permutations + 1);
}

std::vector<QueryRun> load_trec_run(std::istream& in) {
  std::vector<QueryRun> runs;
  std::unordered_map<std::string, std::size_t> index;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string query_id, q0, doc_id, rank, score, tag;
    if (!(fields >> query_id >> q0 >> doc_id >> rank >> score >> tag)) {
      throw std::runtime_error("malformed run line: " + line);
    }
    auto [it, fresh] = index.try_emplace(query_id, runs.size());
    if (fresh) runs.push_back(QueryRun{query_id, {}, false});
    runs[it->second].ranked.push_back({doc_id, std::stod(score)});
  }
  return runs;
}

}  // namespace polya
