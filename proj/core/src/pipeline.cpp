#include "polya/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "polya/evaluation.hpp"
#include "polya/model_io.hpp"
#include "polya/retrieval.hpp"
#include "polya/stopwords.hpp"

namespace polya {

namespace fs = std::filesystem;

const std::vector<std::string> kVariants = {"mult-mle", "mult-mc", "dcm-mc",
                                            "gspud-bs", "gspud-mc"};

namespace {

std::uint64_t fnv1a_bytes(std::string_view s, std::uint64_t h) {
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error(std::string(what) + " not readable: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::ifstream open_artifact(const fs::path& path, const char* produced_by) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("missing artifact " + path.string() +
                             "; produce it with `polya " + produced_by + "`");
  }
  return in;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string format_int(std::int64_t v) { return std::to_string(v); }

std::string bool_name(bool b) { return b ? "true" : "false"; }

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::runtime_error("expected boolean, got: " + s);
}

std::string mode_name(ProposalMode mode) {
  return mode == ProposalMode::joint ? "joint" : "blockwise";
}

ProposalMode parse_mode(const std::string& s) {
  if (s == "joint") return ProposalMode::joint;
  if (s == "blockwise") return ProposalMode::blockwise;
  throw std::runtime_error("unknown proposal mode: " + s);
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += format_double(values[i]);
  }
  return out;
}

std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> values;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) values.push_back(std::stod(item));
  }
  return values;
}

std::string join_strings(const std::vector<std::string>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += values[i];
  }
  return out;
}

std::vector<std::string> split_strings(const std::string& s) {
  std::vector<std::string> values;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) values.push_back(item);
  }
  return values;
}

struct VariantSpec {
  bool mcmc_background;
  BackgroundVariant background;
  MatrixKind doc_matrix;
};

VariantSpec variant_spec(const std::string& name) {
  if (name == "mult-mle") {
    return {false, BackgroundVariant::multinomial, MatrixKind::zero};
  }
  if (name == "mult-mc") {
    return {true, BackgroundVariant::multinomial, MatrixKind::zero};
  }
  if (name == "dcm-mc") {
    return {true, BackgroundVariant::dcm, MatrixKind::identity};
  }
  if (name == "gspud-bs") {
    return {true, BackgroundVariant::gspud_fixed_m, MatrixKind::diagonal};
  }
  if (name == "gspud-mc") {
    return {true, BackgroundVariant::gspud_estimate_m, MatrixKind::diagonal};
  }
  throw std::runtime_error(
      "unknown variant '" + name +
      "' (expected mult-mle, mult-mc, dcm-mc, gspud-bs or gspud-mc)");
}

struct LoadedCorpus {
  Corpus corpus;
  std::uint64_t hash;
};

LoadedCorpus load_corpus_artifact(const ExperimentConfig& config) {
  const fs::path path = fs::path(config.output_dir) / "corpus.snapshot";
  auto in = open_artifact(path, "ingest");
  CorpusSnapshot snapshot = load_corpus(in);
  return {std::move(snapshot.corpus), snapshot.config_hash};
}

std::vector<Query> load_query_artifact(const ExperimentConfig& config,
                                       std::uint64_t corpus_hash) {
  const fs::path path = fs::path(config.output_dir) / "queries.snapshot";
  auto in = open_artifact(path, "ingest");
  QuerySnapshot snapshot = load_queries(in);
  if (snapshot.corpus_hash != corpus_hash) {
    throw std::runtime_error("stale artifact " + path.string() +
                             ": built from a different corpus; re-run ingest");
  }
  return std::move(snapshot.queries);
}

NamedModel load_model_artifact(const ExperimentConfig& config,
                               std::uint64_t corpus_hash) {
  const fs::path path =
      fs::path(config.output_dir) / (config.variant + ".model");
  auto in = open_artifact(path, "estimate");
  NamedModel model = load_model(in);
  if (model.corpus_hash != corpus_hash) {
    throw std::runtime_error("stale artifact " + path.string() +
                             ": built from a different corpus; re-run estimate");
  }
  return model;
}

std::vector<DocumentModel> load_docmodel_artifact(
    const ExperimentConfig& config, const Corpus& corpus,
    std::uint64_t corpus_hash) {
  const fs::path path =
      fs::path(config.output_dir) / (config.variant + ".docmodels");
  auto in = open_artifact(path, "estimate");
  DocModelFile file = load_doc_models(in, corpus);
  if (file.corpus_hash != corpus_hash) {
    throw std::runtime_error("stale artifact " + path.string() +
                             ": built from a different corpus; re-run estimate");
  }
  return std::move(file.models);
}

std::unordered_set<std::string> effective_stopwords(
    const ExperimentConfig& config) {
  if (config.stopwords_path.empty()) return smart_stopwords();
  const std::string content = read_file(config.stopwords_path, "stopword list");
  std::istringstream in(content);
  return load_stopwords(in);
}

std::vector<Query> ingest_queries(
    const ExperimentConfig& config, const Corpus& corpus,
    const std::unordered_set<std::string>& stopwords,
    const std::string& content) {
  CranfieldOptions options{config.include_titles};
  std::vector<Query> queries;
  for (const RawRecord& record : parse_cranfield(content, options)) {
    const auto tokens = preprocess(record.body, stopwords);
    std::string id = config.renumber_queries
                         ? std::to_string(queries.size() + 1)
                         : normalize_id(record.id);
    queries.push_back(map_query(corpus, std::move(id), tokens));
  }
  return queries;
}

}  // namespace

std::uint64_t ingest_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a_bytes(read_file(config.docs_path, "document file"), h);
  if (!config.queries_path.empty()) {
    h = fnv1a_bytes(read_file(config.queries_path, "query file"), h);
  }
  h = fnv1a_bytes(config.include_titles ? "titles" : "body-only", h);
  h = fnv1a_bytes(config.renumber_queries ? "renumbered" : "file-ids", h);
  if (!config.stopwords_path.empty()) {
    h = fnv1a_bytes(read_file(config.stopwords_path, "stopword list"), h);
  } else {
    h = fnv1a_bytes("smart-builtin", h);
  }
  return h;
}

void cmd_ingest(const ExperimentConfig& config, std::ostream* report) {
  if (config.docs_path.empty()) {
    throw std::runtime_error("no document file configured (docs=...)");
  }
  const std::string content = read_file(config.docs_path, "document file");
  const auto stopwords = effective_stopwords(config);

  CranfieldOptions options{config.include_titles};
  const auto records = parse_cranfield(content, options);
  if (records.empty()) {
    throw std::runtime_error("document file contains no records: " +
                             config.docs_path);
  }

  std::vector<std::pair<std::string, std::vector<std::string>>> docs;
  docs.reserve(records.size());
  for (const RawRecord& record : records) {
    docs.emplace_back(normalize_id(record.id),
                      preprocess(record.body, stopwords));
  }
  const Corpus corpus = Corpus::build(docs);
  const std::uint64_t hash = ingest_hash(config);

  fs::create_directories(config.output_dir);
  {
    std::ofstream out(fs::path(config.output_dir) / "corpus.snapshot");
    save_corpus(out, corpus, hash);
  }

  std::size_t n_queries = 0;
  if (!config.queries_path.empty()) {
    const std::string query_content =
        read_file(config.queries_path, "query file");
    const auto queries = ingest_queries(config, corpus, stopwords,
                                        query_content);
    n_queries = queries.size();
    std::ofstream out(fs::path(config.output_dir) / "queries.snapshot");
    save_queries(out, queries, hash);
  }

  std::ostringstream stats;
  stats << "collection\t" << config.collection << "\n";
  stats << "docs\t" << corpus.doc_count() << "\n";
  stats << "vocab\t" << corpus.vocabulary_size() << "\n";
  stats << "tokens\t" << corpus.total_tokens() << "\n";
  stats << "queries\t" << n_queries << "\n";
  {
    std::ofstream out(fs::path(config.output_dir) / "stats.tsv");
    out << stats.str();
  }
  if (report) *report << stats.str();
}

void cmd_estimate(const ExperimentConfig& config) {
  const VariantSpec spec = variant_spec(config.variant);
  LoadedCorpus loaded = load_corpus_artifact(config);
  const Corpus& corpus = loaded.corpus;
  const std::size_t v = corpus.vocabulary_size();

  const auto t0 = std::chrono::steady_clock::now();

  // Background model.
  EstimationReport report;
  ChainConfig bg_chain = config.background_chain.scaled(config.scale);
  bg_chain.rng_seed = derive_seed(config.seed, "background/" + config.variant);

  std::vector<double> fixed_diag;
  if (spec.background == BackgroundVariant::gspud_fixed_m) {
    fixed_diag = corpus.burstiness_all();
  }

  NamedModel named{{}, UrnModel({1.0}, ReplacementMatrix::zero(1)), 0};
  named.corpus_hash = loaded.hash;
  for (term_id t = 0; t < v; ++t) named.terms.push_back(corpus.term(t));

  if (!spec.mcmc_background) {
    named.model = UrnModel(mle_multinomial(corpus), ReplacementMatrix::zero(v));
  } else {
    named.model =
        estimate_background(corpus, spec.background, fixed_diag, bg_chain,
                            &report);
  }

  // Document models, with the collection dynamics held fixed.
  ReplacementMatrix doc_matrix = ReplacementMatrix::zero(v);
  switch (spec.doc_matrix) {
    case MatrixKind::zero:
      break;
    case MatrixKind::identity:
      doc_matrix = ReplacementMatrix::identity(v);
      break;
    case MatrixKind::diagonal: {
      const auto diag = named.model.matrix().diag();
      doc_matrix =
          ReplacementMatrix::diagonal(std::vector<double>(diag.begin(),
                                                          diag.end()));
      break;
    }
    case MatrixKind::full:
      throw std::logic_error("full dynamics have no estimation support");
  }

  std::vector<DocumentModel> doc_models;
  if (!spec.mcmc_background) {
    // Closed-form per-document MLE: weights proportional to counts.
    doc_models.reserve(corpus.doc_count());
    for (const Document& doc : corpus.documents()) {
      DocumentModel dm;
      dm.doc_id = doc.doc_id;
      for (const TermCount& tc : count_terms(doc.tokens)) {
        dm.weights.push_back({tc.term, static_cast<double>(tc.count)});
      }
      doc_models.push_back(std::move(dm));
    }
  } else {
    ChainConfig doc_chain = config.document_chain.scaled(config.scale);
    doc_chain.rng_seed = derive_seed(config.seed, "documents/" + config.variant);
    doc_models = estimate_documents(corpus, doc_matrix, doc_chain,
                                    config.threads);
  }

  const auto t1 = std::chrono::steady_clock::now();
  const auto wall_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();

  fs::create_directories(config.output_dir);
  {
    std::ofstream out(fs::path(config.output_dir) /
                      (config.variant + ".model"));
    save_model(out, named);
  }
  {
    std::ofstream out(fs::path(config.output_dir) /
                      (config.variant + ".docmodels"));
    save_doc_models(out, corpus, doc_models, loaded.hash);
  }
  {
    Metadata meta;
    meta.emplace_back("variant", config.variant);
    meta.emplace_back("seed", std::to_string(config.seed));
    meta.emplace_back("scale", format_double(config.scale));
    const ChainConfig bg = config.background_chain.scaled(config.scale);
    meta.emplace_back("bg_samples", format_int(bg.n_samples));
    meta.emplace_back("bg_burnin", format_int(bg.burn_in));
    meta.emplace_back("bg_sigma", format_double(bg.proposal_sigma));
    meta.emplace_back("bg_mode", mode_name(bg.proposal_mode));
    meta.emplace_back("bg_block", std::to_string(bg.block_size));
    const ChainConfig dc = config.document_chain.scaled(config.scale);
    meta.emplace_back("doc_samples", format_int(dc.n_samples));
    meta.emplace_back("doc_burnin", format_int(dc.burn_in));
    meta.emplace_back("doc_sigma", format_double(dc.proposal_sigma));
    meta.emplace_back("doc_mode", mode_name(dc.proposal_mode));
    meta.emplace_back("doc_block", std::to_string(dc.block_size));
    if (spec.mcmc_background) {
      meta.emplace_back("bg_acceptance", format_double(report.acceptance_rate));
      meta.emplace_back("bg_retained", format_int(report.n_retained));
      meta.emplace_back("bg_loglik_start",
                        format_double(report.log_likelihood_start));
      meta.emplace_back("bg_loglik_end",
                        format_double(report.log_likelihood_end));
    } else {
      meta.emplace_back("bg_method", "mle");
    }
    meta.emplace_back("wall_clock_ms", std::to_string(wall_ms));
    std::ofstream out(fs::path(config.output_dir) / (config.variant + ".meta"));
    save_metadata(out, meta);
  }
}

namespace {

struct RetrievalArtifacts {
  Corpus corpus;
  std::uint64_t hash;
  std::vector<Query> queries;
  RetrievalModel model;
};

RetrievalArtifacts load_retrieval_artifacts(const ExperimentConfig& config) {
  LoadedCorpus loaded = load_corpus_artifact(config);
  std::vector<Query> queries = load_query_artifact(config, loaded.hash);
  NamedModel named = load_model_artifact(config, loaded.hash);
  UrnModel background = align_model(named, loaded.corpus);
  std::vector<DocumentModel> doc_models =
      load_docmodel_artifact(config, loaded.corpus, loaded.hash);
  std::vector<double> u0(background.u0().begin(), background.u0().end());
  RetrievalModel model(std::move(u0), std::move(doc_models), config.mu);
  return {std::move(loaded.corpus), loaded.hash, std::move(queries),
          std::move(model)};
}

void warn_empty_queries(std::span<const QueryRun> runs, std::ostream& report) {
  for (const QueryRun& run : runs) {
    if (run.empty_query) {
      report << "# query " << run.query_id
             << " has no in-vocabulary terms: empty ranking\n";
    }
  }
}

}  // namespace

void cmd_retrieve(const ExperimentConfig& config, std::ostream* report) {
  RetrievalArtifacts art = load_retrieval_artifacts(config);
  const auto runs = run_queries(art.model, art.queries, config.top_k,
                                config.mu, config.query_set_semantics);
  if (report) warn_empty_queries(runs, *report);
  fs::create_directories(config.output_dir);
  std::ofstream out(fs::path(config.output_dir) / (config.variant + ".run"));
  write_trec_run(out, runs, config.run_tag);
}

void cmd_evaluate(const ExperimentConfig& config, std::ostream& report) {
  if (config.qrels_path.empty()) {
    throw std::runtime_error("no qrels file configured (qrels=...)");
  }
  std::ifstream qrels_in(config.qrels_path);
  if (!qrels_in) {
    throw std::runtime_error("qrels not readable: " + config.qrels_path);
  }
  const Qrels qrels = load_qrels(qrels_in);

  std::string run_path = config.run_path;
  if (run_path.empty()) {
    run_path =
        (fs::path(config.output_dir) / (config.variant + ".run")).string();
  }
  auto run_in = open_artifact(run_path, "retrieve");
  const auto runs = load_trec_run(run_in);

  const MapResult map = mean_average_precision(runs, qrels);
  report << "run\t" << run_path << "\n";
  report << "queries\t" << map.evaluated_queries << "\n";
  for (const std::string& q : map.skipped_queries) {
    report << "# skipped query without judgments: " << q << "\n";
  }
  report << "map\t" << fixed6(map.value) << "\n";

  if (!config.compare_path.empty()) {
    auto cmp_in = open_artifact(config.compare_path, "retrieve");
    const auto cmp_runs = load_trec_run(cmp_in);
    const PairedAps paired = paired_average_precisions(runs, cmp_runs, qrels);
    const MapResult cmp_map = mean_average_precision(cmp_runs, qrels);
    const double p =
        permutation_test(paired.a, paired.b, config.n_permutations,
                         derive_seed(config.seed, "permutation-test"));
    report << "compare\t" << config.compare_path << "\n";
    report << "compare_map\t" << fixed6(cmp_map.value) << "\n";
    report << "paired_queries\t" << paired.a.size() << "\n";
    report << "p_value\t" << fixed6(p) << "\n";
  }
}

void cmd_sweep(const ExperimentConfig& config, std::ostream& report) {
  if (config.qrels_path.empty()) {
    throw std::runtime_error("no qrels file configured (qrels=...)");
  }
  std::ifstream qrels_in(config.qrels_path);
  if (!qrels_in) {
    throw std::runtime_error("qrels not readable: " + config.qrels_path);
  }
  const Qrels qrels = load_qrels(qrels_in);

  RetrievalArtifacts art = load_retrieval_artifacts(config);
  const MuSweepResult sweep =
      sweep_mu(config.mu_values, art.model, art.queries, qrels, config.top_k,
               config.query_set_semantics);

  fs::create_directories(config.output_dir);
  std::ofstream out(fs::path(config.output_dir) /
                    ("sweep_" + config.variant + ".csv"));
  out << "mu,map\n";
  for (const MuSweepRow& row : sweep.rows) {
    out << format_double(row.mu) << "," << fixed6(row.map) << "\n";
  }

  const MuSweepRow& best = sweep.rows[sweep.best_index];
  report << "variant\t" << config.variant << "\n";
  report << "best_mu\t" << format_double(best.mu) << "\n";
  report << "best_map\t" << fixed6(best.map) << "\n";
}

bool resolve_collection_paths(ExperimentConfig& config) {
  struct Files {
    const char* name;
    const char* docs;
    const char* queries;
    const char* qrels;
  };
  static const Files kFiles[] = {
      {"medline", "MED.ALL", "MED.QRY", "MED.REL"},
      {"cranfield", "cran.all.1400", "cran.qry", "cranqrel"},
      {"cisi", "CISI.ALL", "CISI.QRY", "CISI.REL"},
  };

  const char* env = std::getenv("POLYA_DATA_DIR");
  const fs::path base = env ? fs::path(env) : fs::path(".");

  for (const Files& f : kFiles) {
    if (config.collection != f.name) continue;
    for (const fs::path& dir : {base / f.name, base}) {
      if (fs::exists(dir / f.docs)) {
        config.docs_path = (dir / f.docs).string();
        config.queries_path = (dir / f.queries).string();
        config.qrels_path = (dir / f.qrels).string();
        if (config.collection == "cranfield") {
          // cranqrel numbers queries by position; cran.qry skips ids.
          config.renumber_queries = true;
        }
        return true;
      }
    }
    return false;
  }
  return !config.docs_path.empty();
}

void cmd_reproduce(const ExperimentConfig& config, std::ostream& report) {
  ExperimentConfig base = config;
  if (base.docs_path.empty() && !resolve_collection_paths(base)) {
    throw std::runtime_error(
        "collection '" + base.collection +
        "' not found; set POLYA_DATA_DIR or pass --docs/--queries/--qrels");
  }

  report << "# reproduce " << base.collection << " scale "
         << format_double(base.scale) << "\n";
  cmd_ingest(base);

  std::ifstream qrels_in(base.qrels_path);
  if (!qrels_in) {
    throw std::runtime_error("qrels not readable: " + base.qrels_path);
  }
  const Qrels qrels = load_qrels(qrels_in);

  LoadedCorpus loaded = load_corpus_artifact(base);
  const Corpus& corpus = loaded.corpus;

  struct VariantResult {
    std::string variant;
    double perplexity = 0.0;
    double best_mu = 0.0;
    double best_map = 0.0;
    std::vector<MuSweepRow> sweep;
    std::vector<QueryRun> best_run;
  };
  std::vector<VariantResult> results;

  for (const std::string& variant : kVariants) {
    ExperimentConfig vc = base;
    vc.variant = variant;
    report << "# estimating " << variant << "\n" << std::flush;
    cmd_estimate(vc);

    VariantResult r;
    r.variant = variant;

    NamedModel named = load_model_artifact(vc, loaded.hash);
    UrnModel background = align_model(named, corpus);
    r.perplexity = perplexity(background, corpus);

    std::vector<Query> queries = load_query_artifact(vc, loaded.hash);
    std::vector<DocumentModel> doc_models =
        load_docmodel_artifact(vc, corpus, loaded.hash);
    std::vector<double> u0(background.u0().begin(), background.u0().end());
    RetrievalModel model(std::move(u0), std::move(doc_models), vc.mu);

    const MuSweepResult sweep =
        sweep_mu(vc.mu_values, model, queries, qrels, vc.top_k,
                 vc.query_set_semantics);
    r.sweep = sweep.rows;
    r.best_mu = sweep.rows[sweep.best_index].mu;
    r.best_map = sweep.rows[sweep.best_index].map;
    r.best_run = run_queries(model, queries, vc.top_k, r.best_mu,
                             vc.query_set_semantics);
    warn_empty_queries(r.best_run, report);

    {
      std::ofstream out(fs::path(vc.output_dir) / (variant + ".run"));
      write_trec_run(out, r.best_run, vc.run_tag + "-" + variant);
    }
    {
      std::ofstream out(fs::path(vc.output_dir) /
                        ("sweep_" + variant + ".csv"));
      out << "mu,map\n";
      for (const MuSweepRow& row : r.sweep) {
        out << format_double(row.mu) << "," << fixed6(row.map) << "\n";
      }
    }

    report << "# " << variant << " perplexity " << fixed6(r.perplexity)
           << " best-mu " << format_double(r.best_mu) << " map "
           << fixed6(r.best_map) << "\n"
           << std::flush;
    results.push_back(std::move(r));
  }

  const fs::path out_dir(base.output_dir);
  {
    std::ofstream out(out_dir / "perplexity.tsv");
    out << "model\tperplexity\n";
    for (const VariantResult& r : results) {
      out << r.variant << "\t" << fixed6(r.perplexity) << "\n";
    }
  }
  {
    std::ofstream out(out_dir / "map.tsv");
    out << "model\tbest_mu\tmap\n";
    for (const VariantResult& r : results) {
      out << r.variant << "\t" << format_double(r.best_mu) << "\t"
          << fixed6(r.best_map) << "\n";
    }
  }
  {
    std::ofstream out(out_dir / "sweep.csv");
    out << "mu";
    for (const VariantResult& r : results) out << "," << r.variant;
    out << "\n";
    for (std::size_t i = 0; i < base.mu_values.size(); ++i) {
      out << format_double(base.mu_values[i]);
      for (const VariantResult& r : results) out << "," << fixed6(r.sweep[i].map);
      out << "\n";
    }
  }
  {
    std::ofstream out(out_dir / "significance.tsv");
    out << "model";
    for (const VariantResult& r : results) out << "\t" << r.variant;
    out << "\n";
    for (const VariantResult& a : results) {
      out << a.variant;
      for (const VariantResult& b : results) {
        const PairedAps paired =
            paired_average_precisions(a.best_run, b.best_run, qrels);
        const double p = permutation_test(
            paired.a, paired.b, base.n_permutations,
            derive_seed(base.seed, "permtest/" + a.variant + "/" + b.variant));
        out << "\t" << fixed6(p);
      }
      out << "\n";
    }
  }
  {
    // Per-term statistics under the gspud-mc model.
    std::vector<std::string> terms = base.stat_terms;
    if (terms.empty()) {
      for (const char* t : {"also", "dna", "refer"}) {
        if (corpus.find_term(t)) terms.push_back(t);
      }
    }
    ExperimentConfig vc = base;
    vc.variant = "gspud-mc";
    const NamedModel gspud = load_model_artifact(vc, loaded.hash);
    UrnModel model = align_model(gspud, corpus);
    std::ofstream out(out_dir / "term_stats.tsv");
    out << "term\tcf\tdf\tbs\tu0_hat\tm_hat\n";
    for (const std::string& term : terms) {
      const auto id = corpus.find_term(term);
      if (!id) {
        out << term << "\t-\t-\t-\t-\t-\n";
        continue;
      }
      out << term << "\t" << corpus.cf(*id) << "\t" << corpus.df(*id) << "\t"
          << fixed6(corpus.burstiness(*id)) << "\t"
          << fixed6(model.u0()[*id]) << "\t"
          << fixed6(model.matrix().diag()[*id]) << "\n";
    }
  }

  report << "# tables written to " << base.output_dir << "\n";
}

// --- configuration ---------------------------------------------------------

void save_config(std::ostream& out, const ExperimentConfig& c) {
  out << "docs=" << c.docs_path << "\n";
  out << "queries=" << c.queries_path << "\n";
  out << "qrels=" << c.qrels_path << "\n";
  out << "output_dir=" << c.output_dir << "\n";
  out << "collection=" << c.collection << "\n";
  out << "include_titles=" << bool_name(c.include_titles) << "\n";
  out << "renumber_queries=" << bool_name(c.renumber_queries) << "\n";
  out << "stopwords=" << c.stopwords_path << "\n";
  out << "variant=" << c.variant << "\n";
  out << "seed=" << c.seed << "\n";
  out << "scale=" << format_double(c.scale) << "\n";
  out << "bg_samples=" << c.background_chain.n_samples << "\n";
  out << "bg_burnin=" << c.background_chain.burn_in << "\n";
  out << "bg_sigma=" << format_double(c.background_chain.proposal_sigma) << "\n";
  out << "bg_thin=" << c.background_chain.thinning << "\n";
  out << "bg_mode=" << mode_name(c.background_chain.proposal_mode) << "\n";
  out << "bg_block=" << c.background_chain.block_size << "\n";
  out << "doc_samples=" << c.document_chain.n_samples << "\n";
  out << "doc_burnin=" << c.document_chain.burn_in << "\n";
  out << "doc_sigma=" << format_double(c.document_chain.proposal_sigma) << "\n";
  out << "doc_thin=" << c.document_chain.thinning << "\n";
  out << "doc_mode=" << mode_name(c.document_chain.proposal_mode) << "\n";
  out << "doc_block=" << c.document_chain.block_size << "\n";
  out << "threads=" << c.threads << "\n";
  out << "mu=" << format_double(c.mu) << "\n";
  out << "mu_values=" << join_doubles(c.mu_values) << "\n";
  out << "top_k=" << c.top_k << "\n";
  out << "run_tag=" << c.run_tag << "\n";
  out << "query_set_semantics=" << bool_name(c.query_set_semantics) << "\n";
  out << "run=" << c.run_path << "\n";
  out << "compare=" << c.compare_path << "\n";
  out << "n_permutations=" << c.n_permutations << "\n";
  out << "terms=" << join_strings(c.stat_terms) << "\n";
}

void apply_config_line(ExperimentConfig& c, const std::string& key,
                       const std::string& value) {
  if (key == "docs") c.docs_path = value;
  else if (key == "queries") c.queries_path = value;
  else if (key == "qrels") c.qrels_path = value;
  else if (key == "output_dir") c.output_dir = value;
  else if (key == "collection") c.collection = value;
  else if (key == "include_titles") c.include_titles = parse_bool(value);
  else if (key == "renumber_queries") c.renumber_queries = parse_bool(value);
  else if (key == "stopwords") c.stopwords_path = value;
  else if (key == "variant") c.variant = value;
  else if (key == "seed") c.seed = std::stoull(value);
  else if (key == "scale") c.scale = std::stod(value);
  else if (key == "bg_samples") c.background_chain.n_samples = std::stoll(value);
  else if (key == "bg_burnin") c.background_chain.burn_in = std::stoll(value);
  else if (key == "bg_sigma") c.background_chain.proposal_sigma = std::stod(value);
  else if (key == "bg_thin") c.background_chain.thinning = std::stoll(value);
  else if (key == "bg_mode") c.background_chain.proposal_mode = parse_mode(value);
  else if (key == "bg_block") c.background_chain.block_size = std::stoull(value);
  else if (key == "doc_samples") c.document_chain.n_samples = std::stoll(value);
  else if (key == "doc_burnin") c.document_chain.burn_in = std::stoll(value);
  else if (key == "doc_sigma") c.document_chain.proposal_sigma = std::stod(value);
  else if (key == "doc_thin") c.document_chain.thinning = std::stoll(value);
  else if (key == "doc_mode") c.document_chain.proposal_mode = parse_mode(value);
  else if (key == "doc_block") c.document_chain.block_size = std::stoull(value);
  else if (key == "threads") c.threads = static_cast<unsigned>(std::stoul(value));
  else if (key == "mu") c.mu = std::stod(value);
  else if (key == "mu_values") c.mu_values = split_doubles(value);
  else if (key == "top_k") c.top_k = std::stoi(value);
  else if (key == "run_tag") c.run_tag = value;
  else if (key == "query_set_semantics") c.query_set_semantics = parse_bool(value);
  else if (key == "run") c.run_path = value;
  else if (key == "compare") c.compare_path = value;
  else if (key == "n_permutations") c.n_permutations = std::stoll(value);
  else if (key == "terms") c.stat_terms = split_strings(value);
  else throw std::runtime_error("unknown config key: " + key);
}

ExperimentConfig load_config(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("malformed config line: " + line);
    }
    apply_config_line(config, line.substr(0, eq), line.substr(eq + 1));
  }
  return config;
}

}  // namespace polya
