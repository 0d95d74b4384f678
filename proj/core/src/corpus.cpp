#include "polya/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>

#include "polya/stemmer.hpp"

namespace polya {

namespace {

bool is_marker_line(std::string_view line) {
  return line.size() >= 2 && line[0] == '.' && line[1] >= 'A' &&
         line[1] <= 'Z' &&
         (line.size() == 2 || line[2] == ' ' || line[2] == '\t');
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9');
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t byte_offset)
    : std::runtime_error(message + " (byte offset " +
                         std::to_string(byte_offset) + ")"),
      offset_(byte_offset) {}

std::string normalize_id(std::string id) {
  bool numeric = !id.empty();
  for (char c : id) {
    if (c < '0' || c > '9') {
      numeric = false;
      break;
    }
  }
  if (!numeric) return id;
  std::size_t first = 0;
  while (first + 1 < id.size() && id[first] == '0') ++first;
  return id.substr(first);
}

std::vector<RawRecord> parse_cranfield(std::string_view text,
                                       const CranfieldOptions& options) {
  std::vector<RawRecord> records;
  bool capturing = false;

  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (is_marker_line(line)) {
      const char marker = line[1];
      if (marker == 'I') {
        std::string_view id = trim(line.substr(2));
        if (id.empty()) throw ParseError("missing document id after .I", pos);
        records.push_back({std::string(id), {}});
        capturing = false;
      } else if (marker == 'W' || (marker == 'T' && options.include_titles)) {
        if (records.empty()) {
          throw ParseError(std::string(".") + marker + " field before any .I",
                           pos);
        }
        capturing = true;
      } else {
        capturing = false;
      }
    } else if (capturing) {
      std::string& body = records.back().body;
      if (!body.empty()) body.push_back('\n');
      body.append(line);
    }
    pos = eol + 1;
  }
  return records;
}

std::vector<std::string> preprocess(
    std::string_view raw_body,
    const std::unordered_set<std::string>& stopwords) {
  std::vector<std::string> out;
  std::string token;
  bool has_alpha = false;

  auto flush = [&] {
    if (!token.empty() && has_alpha && !stopwords.contains(token)) {
      out.push_back(porter_stem(token));
    }
    token.clear();
    has_alpha = false;
  };

  for (char c : raw_body) {
    if (is_ascii_alnum(c)) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      if (c < '0' || c > '9') has_alpha = true;
      token.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

Corpus Corpus::build(
    std::span<const std::pair<std::string, std::vector<std::string>>> docs) {
  if (docs.empty()) {
    throw std::invalid_argument("corpus requires at least one document");
  }

  Corpus corpus;
  corpus.documents_.reserve(docs.size());

  std::vector<term_id> doc_seen;  // touched ids, for df updates
  for (const auto& [doc_id, tokens] : docs) {
    Document doc;
    doc.doc_id = doc_id;
    doc.tokens.reserve(tokens.size());
    doc_seen.clear();

    for (const std::string& token : tokens) {
      term_id id;
      if (auto it = corpus.ids_.find(token); it != corpus.ids_.end()) {
        id = it->second;
      } else {
        id = static_cast<term_id>(corpus.terms_.size());
        corpus.ids_.emplace(token, id);
        corpus.terms_.push_back(token);
        corpus.cf_.push_back(0);
        corpus.df_.push_back(0);
      }
      doc.tokens.push_back(id);
      corpus.cf_[id] += 1;
      doc_seen.push_back(id);
    }
    corpus.total_tokens_ += static_cast<std::int64_t>(doc.tokens.size());

    std::sort(doc_seen.begin(), doc_seen.end());
    doc_seen.erase(std::unique(doc_seen.begin(), doc_seen.end()),
                   doc_seen.end());
    for (term_id id : doc_seen) corpus.df_[id] += 1;
    doc.unique_term_count = static_cast<std::uint32_t>(doc_seen.size());

    corpus.documents_.push_back(std::move(doc));
  }
  return corpus;
}

std::optional<term_id> Corpus::find_term(std::string_view term) const {
  auto it = ids_.find(std::string(term));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

double Corpus::burstiness(term_id t) const {
  if (t >= terms_.size()) {
    throw std::out_of_range("unknown term id " + std::to_string(t));
  }
  return static_cast<double>(cf_[t]) / static_cast<double>(df_[t]);
}

std::vector<double> Corpus::burstiness_all() const {
  std::vector<double> bs(terms_.size());
  for (term_id t = 0; t < terms_.size(); ++t) bs[t] = burstiness(t);
  return bs;
}

Query map_query(const Corpus& corpus, std::string query_id,
                std::span<const std::string> tokens) {
  Query q;
  q.query_id = std::move(query_id);
  for (const std::string& token : tokens) {
    if (auto id = corpus.find_term(token)) {
      q.tokens.push_back(*id);
    } else {
      q.dropped_tokens += 1;
    }
  }
  return q;
}

std::vector<TermCount> count_terms(std::span<const term_id> tokens) {
  std::vector<term_id> sorted(tokens.begin(), tokens.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<TermCount> counts;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    counts.push_back({sorted[i], static_cast<std::uint32_t>(j - i)});
    i = j;
  }
  return counts;
}

namespace {

constexpr char kCorpusMagic[] = "polya-corpus";
constexpr char kQueryMagic[] = "polya-queries";

std::uint64_t parse_hex64(std::string_view s, const char* what) {
  std::uint64_t value = 0;
  if (s.empty() || s.size() > 16) {
    throw std::runtime_error(std::string("bad hex value for ") + what);
  }
  for (char c : s) {
    value <<= 4;
    if (c >= '0' && c <= '9') {
      value |= static_cast<std::uint64_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      value |= static_cast<std::uint64_t>(c - 'a' + 10);
    } else {
      throw std::runtime_error(std::string("bad hex value for ") + what);
    }
  }
  return value;
}

std::string hex64(std::uint64_t value) {
  static const char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return s;
}

}  // namespace

void save_corpus(std::ostream& out, const Corpus& corpus,
                 std::uint64_t config_hash) {
  out << kCorpusMagic << " v1 config=" << hex64(config_hash) << "\n";
  out << "stats docs=" << corpus.doc_count()
      << " vocab=" << corpus.vocabulary_size()
      << " tokens=" << corpus.total_tokens() << "\n";
  for (term_id t = 0; t < corpus.vocabulary_size(); ++t) {
    out << "t " << corpus.term(t) << "\t" << corpus.cf(t) << "\t"
        << corpus.df(t) << "\n";
  }
  for (const Document& doc : corpus.documents()) {
    out << "d " << doc.doc_id << "\t" << doc.tokens.size() << "\t";
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      if (i) out << ' ';
      out << doc.tokens[i];
    }
    out << "\n";
  }
}

CorpusSnapshot load_corpus(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty corpus snapshot");
  }
  std::istringstream header(line);
  std::string magic, version, config;
  header >> magic >> version >> config;
  if (magic != kCorpusMagic || version != "v1" ||
      config.rfind("config=", 0) != 0) {
    throw std::runtime_error("not a polya-corpus v1 snapshot");
  }
  const std::uint64_t hash = parse_hex64(config.substr(7), "config hash");

  if (!std::getline(in, line)) {
    throw std::runtime_error("corpus snapshot missing stats line");
  }

  std::vector<std::pair<std::string, std::vector<std::string>>> docs;
  std::vector<std::string> terms;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == 't') {
      const auto tab = line.find('\t');
      terms.push_back(line.substr(2, tab - 2));
    } else if (line[0] == 'd') {
      const auto tab1 = line.find('\t');
      const auto tab2 = line.find('\t', tab1 + 1);
      if (tab1 == std::string::npos || tab2 == std::string::npos) {
        throw std::runtime_error("malformed document line in snapshot");
      }
      std::string doc_id = line.substr(2, tab1 - 2);
      std::istringstream ids(line.substr(tab2 + 1));
      std::vector<std::string> tokens;
      std::uint64_t id = 0;
      while (ids >> id) {
        if (id >= terms.size()) {
          throw std::runtime_error("token id out of range in snapshot");
        }
        tokens.push_back(terms[id]);
      }
      docs.emplace_back(std::move(doc_id), std::move(tokens));
    } else {
      throw std::runtime_error("unexpected snapshot line: " + line);
    }
  }

  CorpusSnapshot snapshot{Corpus::build(docs), hash};
  // Snapshots store the vocabulary in id order, so rebuilding must
  // reproduce it exactly; cf/df columns are redundant and re-derived.
  if (snapshot.corpus.vocabulary_size() != terms.size()) {
    throw std::runtime_error("snapshot vocabulary inconsistent with tokens");
  }
  return snapshot;
}

void save_queries(std::ostream& out, std::span<const Query> queries,
                  std::uint64_t corpus_hash) {
  out << kQueryMagic << " v1 corpus=" << hex64(corpus_hash) << "\n";
  for (const Query& q : queries) {
    out << "q " << q.query_id << "\t" << q.dropped_tokens << "\t";
    for (std::size_t i = 0; i < q.tokens.size(); ++i) {
      if (i) out << ' ';
      out << q.tokens[i];
    }
    out << "\n";
  }
}

QuerySnapshot load_queries(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty query snapshot");
  }
  std::istringstream header(line);
  std::string magic, version, corpus;
  header >> magic >> version >> corpus;
  if (magic != kQueryMagic || version != "v1" ||
      corpus.rfind("corpus=", 0) != 0) {
    throw std::runtime_error("not a polya-queries v1 snapshot");
  }

  QuerySnapshot snapshot;
  snapshot.corpus_hash = parse_hex64(corpus.substr(7), "corpus hash");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] != 'q') {
      throw std::runtime_error("unexpected query snapshot line: " + line);
    }
    const auto tab1 = line.find('\t');
    const auto tab2 = line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos) {
      throw std::runtime_error("malformed query line in snapshot");
    }
    Query q;
    q.query_id = line.substr(2, tab1 - 2);
    q.dropped_tokens = static_cast<std::uint32_t>(
        std::stoul(line.substr(tab1 + 1, tab2 - tab1 - 1)));
    std::istringstream ids(line.substr(tab2 + 1));
    std::uint64_t id = 0;
    while (ids >> id) q.tokens.push_back(static_cast<term_id>(id));
    snapshot.queries.push_back(std::move(q));
  }
  return snapshot;
}

}  // namespace polya
