#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "polya/estimation.hpp"

namespace polya {

// Everything one experiment needs, loadable from a flat key=value file and
// overridable by CLI flags. All randomness flows from `seed` through
// derive_seed(seed, "<stage>/<variant>") and per-document hashing.
struct ExperimentConfig {
  // inputs and identity
  std::string docs_path;
  std::string queries_path;
  std::string qrels_path;
  std::string output_dir = "out";
  std::string collection = "collection";
  bool include_titles = false;
  // Replace query ids with their 1-based position in the query file. The
  // Cranfield qrels are numbered by position while cran.qry skips ids, so
  // resolve_collection_paths turns this on for that collection.
  bool renumber_queries = false;
  std::string stopwords_path;  // empty = built-in SMART list

  // estimation
  std::string variant = "gspud-mc";
  std::uint64_t seed = 42;
  double scale = 1.0;  // multiplies chain lengths; 1.0 = paper settings
  ChainConfig background_chain{};
  ChainConfig document_chain{200'000, 20'000, 0.5, 1, 10,
                             ProposalMode::blockwise, 64};
  unsigned threads = 0;  // document-model workers; 0 = hardware

  // retrieval
  double mu = 1000.0;
  std::vector<double> mu_values = {10,   50,  100, 200,  300,
                                   400, 500, 1000, 10000};
  int top_k = 1000;
  std::string run_tag = "polya";
  bool query_set_semantics = false;

  // evaluation
  std::string run_path;
  std::string compare_path;
  std::int64_t n_permutations = 100'000;
  std::vector<std::string> stat_terms;  // term-statistics table rows

  bool operator==(const ExperimentConfig&) const = default;
};

extern const std::vector<std::string> kVariants;  // the five model variants

void save_config(std::ostream& out, const ExperimentConfig& config);
ExperimentConfig load_config(std::istream& in);
void apply_config_line(ExperimentConfig& config, const std::string& key,
                       const std::string& value);

// Content hash of the ingestion inputs (document/query bytes and
// preprocessing flags); embedded in every downstream artifact so stale
// artifacts are refused.
std::uint64_t ingest_hash(const ExperimentConfig& config);

// Stage entry points. Each writes its artifacts under config.output_dir and
// throws std::runtime_error with a useful message on missing or stale inputs.
// Stages that have something to say (statistics, warnings, results) write it
// to `report` when given.
void cmd_ingest(const ExperimentConfig& config, std::ostream* report = nullptr);
void cmd_estimate(const ExperimentConfig& config);
void cmd_retrieve(const ExperimentConfig& config, std::ostream* report = nullptr);
void cmd_evaluate(const ExperimentConfig& config, std::ostream& report);
void cmd_sweep(const ExperimentConfig& config, std::ostream& report);
void cmd_reproduce(const ExperimentConfig& config, std::ostream& report);

// $POLYA_DATA_DIR/<collection> conventions for the three paper collections;
// returns false when the files cannot be found.
bool resolve_collection_paths(ExperimentConfig& config);

}  // namespace polya
