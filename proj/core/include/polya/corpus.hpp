#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "polya/types.hpp"

namespace polya {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t byte_offset);
  std::size_t byte_offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// One record of a Cranfield-format file: ".I <id>" opens a record, ".W"
// starts the body text. Field markers are ".<uppercase letter>" at the start
// of a line.
struct RawRecord {
  std::string id;
  std::string body;
};

struct CranfieldOptions {
  bool include_titles = false;  // fold ".T" sections into the body
};

std::vector<RawRecord> parse_cranfield(std::string_view text,
                                       const CranfieldOptions& options = {});

// Canonical form for document/query identifiers: purely numeric ids lose
// their leading zeros ("001" and "1" denote the same record across the
// classic collection files). Non-numeric ids pass through.
std::string normalize_id(std::string id);

// Lowercase, split on non-alphanumeric runs, drop pure-numeric tokens and
// stopwords, Porter-stem the survivors. Token order is preserved.
std::vector<std::string> preprocess(
    std::string_view raw_body, const std::unordered_set<std::string>& stopwords);

struct Document {
  std::string doc_id;
  std::vector<term_id> tokens;         // post-preprocessing, in observed order
  std::uint32_t unique_term_count = 0;
};

// A query after preprocessing, mapped onto a corpus vocabulary.
// Out-of-vocabulary tokens are dropped and counted.
struct Query {
  std::string query_id;
  std::vector<term_id> tokens;
  std::uint32_t dropped_tokens = 0;
};

class Corpus {
 public:
  // Assigns dense term ids in first-occurrence order and computes cf/df.
  // Requires at least one document.
  static Corpus build(
      std::span<const std::pair<std::string, std::vector<std::string>>> docs);

  std::size_t vocabulary_size() const { return terms_.size(); }
  std::size_t doc_count() const { return documents_.size(); }
  std::int64_t total_tokens() const { return total_tokens_; }

  const std::vector<Document>& documents() const { return documents_; }
  const Document& document(std::size_t i) const { return documents_.at(i); }

  const std::string& term(term_id t) const { return terms_.at(t); }
  std::optional<term_id> find_term(std::string_view term) const;

  std::int64_t cf(term_id t) const { return cf_.at(t); }
  std::int64_t df(term_id t) const { return df_.at(t); }

  // bs_t = cf_t / df_t, the average frequency of a term in the documents
  // that contain it. Always >= 1.
  double burstiness(term_id t) const;
  std::vector<double> burstiness_all() const;

 private:
  Corpus() = default;

  std::vector<Document> documents_;
  std::vector<std::string> terms_;
  std::unordered_map<std::string, term_id> ids_;
  std::vector<std::int64_t> cf_;
  std::vector<std::int64_t> df_;
  std::int64_t total_tokens_ = 0;
};

Query map_query(const Corpus& corpus, std::string query_id,
                std::span<const std::string> tokens);

// Snapshot persistence (line-oriented text, format-versioned). The config
// hash identifies the ingestion settings that produced the snapshot.
void save_corpus(std::ostream& out, const Corpus& corpus,
                 std::uint64_t config_hash);

struct CorpusSnapshot {
  Corpus corpus;
  std::uint64_t config_hash = 0;
};
CorpusSnapshot load_corpus(std::istream& in);

void save_queries(std::ostream& out, std::span<const Query> queries,
                  std::uint64_t corpus_hash);

struct QuerySnapshot {
  std::vector<Query> queries;
  std::uint64_t corpus_hash = 0;
};
QuerySnapshot load_queries(std::istream& in);

}  // namespace polya
