// Command-line driver for the generalised Polya urn retrieval toolkit.
//
//   polya ingest    parse + preprocess a collection into snapshots
//   polya estimate  fit background and per-document models
//   polya retrieve  rank documents for the ingested queries
//   polya evaluate  MAP (and paired significance) for run files
//   polya sweep     MAP across a list of smoothing values
//   polya reproduce run the whole pipeline for one collection
//
// Options may come from a key=value config file (--config) with command-line
// flags taking precedence. POLYA_DATA_DIR locates the standard collections.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "polya/pipeline.hpp"

namespace {

void add_common_options(CLI::App* cmd, polya::ExperimentConfig& config) {
  cmd->add_option("--docs", config.docs_path, "Cranfield-format document file");
  cmd->add_option("--queries", config.queries_path, "query file, same markup");
  cmd->add_option("--qrels", config.qrels_path, "relevance judgments");
  cmd->add_option("--out", config.output_dir, "artifact directory");
  cmd->add_option("--collection", config.collection, "collection name");
  cmd->add_flag("--include-titles", config.include_titles,
                "index .T title fields in addition to .W bodies");
  cmd->add_flag("--renumber-queries", config.renumber_queries,
                "replace query ids with their position in the query file");
  cmd->add_option("--stopwords", config.stopwords_path,
                  "stopword list file (default: built-in SMART list)");
  cmd->add_option("--variant", config.variant,
                  "mult-mle | mult-mc | dcm-mc | gspud-bs | gspud-mc");
  cmd->add_option("--seed", config.seed, "master RNG seed");
  cmd->add_option("--scale", config.scale,
                  "chain-length multiplier (1.0 = paper settings)");
  cmd->add_option("--threads", config.threads,
                  "document-model workers (0 = hardware)");

  cmd->add_option("--samples", config.background_chain.n_samples,
                  "background chain length");
  cmd->add_option("--burn-in", config.background_chain.burn_in,
                  "background burn-in");
  cmd->add_option("--sigma", config.background_chain.proposal_sigma,
                  "background proposal std-dev (log space)");
  cmd->add_option("--thin", config.background_chain.thinning,
                  "background thinning factor");
  cmd->add_option("--block-size", config.background_chain.block_size,
                  "background proposal block size");
  cmd->add_option_function<std::string>(
         "--mode",
         [&config](const std::string& mode) {
           config.background_chain.proposal_mode =
               mode == "joint" ? polya::ProposalMode::joint
                               : polya::ProposalMode::blockwise;
         },
         "background proposal mode: joint | blockwise")
      ->check(CLI::IsMember({"joint", "blockwise"}));

  cmd->add_option("--doc-samples", config.document_chain.n_samples,
                  "document chain length");
  cmd->add_option("--doc-burn-in", config.document_chain.burn_in,
                  "document burn-in");
  cmd->add_option("--doc-sigma", config.document_chain.proposal_sigma,
                  "document proposal std-dev (log space)");
  cmd->add_option("--doc-thin", config.document_chain.thinning,
                  "document thinning factor");
  cmd->add_option("--doc-block-size", config.document_chain.block_size,
                  "document proposal block size");
  cmd->add_option_function<std::string>(
         "--doc-mode",
         [&config](const std::string& mode) {
           config.document_chain.proposal_mode =
               mode == "joint" ? polya::ProposalMode::joint
                               : polya::ProposalMode::blockwise;
         },
         "document proposal mode: joint | blockwise")
      ->check(CLI::IsMember({"joint", "blockwise"}));

  cmd->add_option("--mu", config.mu, "smoothing hyperparameter");
  cmd->add_option_function<std::string>(
      "--mu-sweep",
      [&config](const std::string& list) {
        config.mu_values.clear();
        std::size_t pos = 0;
        while (pos <= list.size()) {
          const std::size_t comma = list.find(',', pos);
          const std::string item =
              list.substr(pos, comma == std::string::npos ? std::string::npos
                                                          : comma - pos);
          if (!item.empty()) config.mu_values.push_back(std::stod(item));
          if (comma == std::string::npos) break;
          pos = comma + 1;
        }
      },
      "comma-separated smoothing values for sweeps");
  cmd->add_option("--top-k", config.top_k, "ranked documents kept per query");
  cmd->add_option("--run-tag", config.run_tag, "tag column of TREC run lines");
  cmd->add_flag("--query-set-semantics", config.query_set_semantics,
                "score each distinct query term once");

  cmd->add_option("--run", config.run_path, "run file to evaluate");
  cmd->add_option("--compare", config.compare_path,
                  "second run file for the paired permutation test");
  cmd->add_option("--permutations", config.n_permutations,
                  "permutation-test iterations");
  cmd->add_option("--terms", config.stat_terms,
                  "terms for the statistics table")
      ->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  polya::ExperimentConfig config;

  // The config file seeds the defaults; explicit flags override it.
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    std::string path;
    if (arg == "--config" && i + 1 < argc) {
      path = argv[i + 1];
    } else if (arg.rfind("--config=", 0) == 0) {
      path = arg.substr(9);
    } else {
      continue;
    }
    std::ifstream in(path);
    if (!in) {
      std::cerr << "error: config file not readable: " << path << "\n";
      return 1;
    }
    try {
      config = polya::load_config(in);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }

  CLI::App app{"generalised Polya urn document language models"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key=value config file")
      ->expected(1);
  std::string save_config_path;
  app.add_option("--save-config", save_config_path,
                 "write the effective config before running");

  CLI::App* ingest = app.add_subcommand("ingest", "build corpus snapshots");
  CLI::App* estimate = app.add_subcommand("estimate", "fit model parameters");
  CLI::App* retrieve = app.add_subcommand("retrieve", "rank documents");
  CLI::App* evaluate = app.add_subcommand("evaluate", "score run files");
  CLI::App* sweep = app.add_subcommand("sweep", "MAP across smoothing values");
  CLI::App* reproduce =
      app.add_subcommand("reproduce", "full pipeline for one collection");
  for (CLI::App* cmd : {ingest, estimate, retrieve, evaluate, sweep, reproduce}) {
    add_common_options(cmd, config);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (!save_config_path.empty()) {
      std::ofstream out(save_config_path);
      polya::save_config(out, config);
    }
    if (ingest->parsed()) {
      polya::cmd_ingest(config, &std::cout);
    } else if (estimate->parsed()) {
      polya::cmd_estimate(config);
    } else if (retrieve->parsed()) {
      polya::cmd_retrieve(config, &std::cerr);
    } else if (evaluate->parsed()) {
      polya::cmd_evaluate(config, std::cout);
    } else if (sweep->parsed()) {
      polya::cmd_sweep(config, std::cout);
    } else if (reproduce->parsed()) {
      polya::cmd_reproduce(config, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
