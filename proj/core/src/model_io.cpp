#include "polya/model_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace polya {

namespace {

constexpr char kModelMagic[] = "polya-model";
constexpr char kDocModelMagic[] = "polya-docmodels";

const char* variant_name(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::zero:
      return "zero";
    case MatrixKind::identity:
      return "identity";
    case MatrixKind::diagonal:
      return "diagonal";
    case MatrixKind::full:
      return "full";
  }
  return "?";
}

MatrixKind variant_from_name(const std::string& name) {
  if (name == "zero") return MatrixKind::zero;
  if (name == "identity") return MatrixKind::identity;
  if (name == "diagonal") return MatrixKind::diagonal;
  if (name == "full") return MatrixKind::full;
  throw std::runtime_error("unknown model variant: " + name);
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double value = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw std::runtime_error("malformed number in model file: " + s);
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

std::uint64_t parse_hex64(const std::string& s) {
  std::uint64_t value = 0;
  for (char c : s) {
    value <<= 4;
    if (c >= '0' && c <= '9') {
      value |= static_cast<std::uint64_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      value |= static_cast<std::uint64_t>(c - 'a' + 10);
    } else {
      throw std::runtime_error("bad hex value: " + s);
    }
  }
  return value;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    if (next == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  return fields;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void save_model(std::ostream& out, const NamedModel& named) {
  const UrnModel& model = named.model;
  if (named.terms.size() != model.size()) {
    throw std::invalid_argument("term list does not match model size");
  }
  out << kModelMagic << " v=" << model.size()
      << " variant=" << variant_name(model.matrix().kind())
      << " corpus=" << hex64(named.corpus_hash) << "\n";
  const bool diagonal = model.matrix().kind() == MatrixKind::diagonal;
  for (std::size_t t = 0; t < model.size(); ++t) {
    out << named.terms[t] << "\t" << format_double(model.u0()[t]);
    if (diagonal) {
      out << "\t" << format_double(model.matrix().diag()[t]);
    }
    out << "\n";
  }
  if (model.matrix().kind() == MatrixKind::full) {
    for (std::size_t k = 0; k < model.size(); ++k) {
      out << "row " << k;
      for (double e : model.matrix().row(static_cast<term_id>(k))) {
        out << "\t" << format_double(e);
      }
      out << "\n";
    }
  }
}

NamedModel load_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty model file");
  std::istringstream header(line);
  std::string magic;
  header >> magic;
  if (magic != kModelMagic) {
    throw std::runtime_error("not a polya-model file");
  }
  std::size_t vocab = 0;
  std::string variant;
  std::uint64_t corpus_hash = 0;
  std::string field;
  while (header >> field) {
    if (field.rfind("v=", 0) == 0) {
      vocab = static_cast<std::size_t>(std::stoull(field.substr(2)));
    } else if (field.rfind("variant=", 0) == 0) {
      variant = field.substr(8);
    } else if (field.rfind("corpus=", 0) == 0) {
      corpus_hash = parse_hex64(field.substr(7));
    }
  }
  const MatrixKind kind = variant_from_name(variant);

  std::vector<std::string> terms;
  std::vector<double> u0;
  std::vector<double> diag;
  terms.reserve(vocab);
  u0.reserve(vocab);
  while (terms.size() < vocab && std::getline(in, line)) {
    const auto fields = split(line, '\t');
    if (kind == MatrixKind::diagonal ? fields.size() != 3 : fields.size() != 2) {
      throw std::runtime_error("malformed term line: " + line);
    }
    terms.push_back(fields[0]);
    u0.push_back(parse_double(fields[1]));
    if (kind == MatrixKind::diagonal) diag.push_back(parse_double(fields[2]));
  }
  if (terms.size() != vocab) {
    throw std::runtime_error("model file truncated: expected " +
                             std::to_string(vocab) + " terms");
  }

  ReplacementMatrix matrix = ReplacementMatrix::zero(vocab);
  switch (kind) {
    case MatrixKind::zero:
      break;
    case MatrixKind::identity:
      matrix = ReplacementMatrix::identity(vocab);
      break;
    case MatrixKind::diagonal:
      matrix = ReplacementMatrix::diagonal(std::move(diag));
      break;
    case MatrixKind::full: {
      std::vector<double> rows(vocab * vocab, 0.0);
      for (std::size_t k = 0; k < vocab; ++k) {
        if (!std::getline(in, line)) {
          throw std::runtime_error("model file truncated in full-matrix rows");
        }
        const auto fields = split(line, '\t');
        if (fields.size() != vocab + 1 || fields[0].rfind("row ", 0) != 0) {
          throw std::runtime_error("malformed full-matrix row: " + line);
        }
        for (std::size_t j = 0; j < vocab; ++j) {
          rows[k * vocab + j] = parse_double(fields[j + 1]);
        }
      }
      matrix = ReplacementMatrix::full(vocab, std::move(rows));
      break;
    }
  }

  return NamedModel{std::move(terms), UrnModel(std::move(u0), std::move(matrix)),
                    corpus_hash};
}

UrnModel align_model(const NamedModel& named, const Corpus& corpus) {
  const std::size_t v = corpus.vocabulary_size();
  std::vector<double> u0(v, 0.0);
  std::vector<double> diag;
  const MatrixKind kind = named.model.matrix().kind();
  if (kind == MatrixKind::full) {
    throw std::invalid_argument("full models cannot be realigned by term");
  }
  if (kind == MatrixKind::diagonal) diag.resize(v, 0.0);

  std::vector<bool> seen(v, false);
  for (std::size_t i = 0; i < named.terms.size(); ++i) {
    const auto id = corpus.find_term(named.terms[i]);
    if (!id) continue;  // model may cover more terms than this corpus
    u0[*id] = named.model.u0()[i];
    if (kind == MatrixKind::diagonal) {
      diag[*id] = named.model.matrix().diag()[i];
    }
    seen[*id] = true;
  }
  for (term_id t = 0; t < v; ++t) {
    if (!seen[t]) {
      throw std::runtime_error("model does not cover corpus term '" +
                               corpus.term(t) + "'");
    }
  }

  switch (kind) {
    case MatrixKind::zero:
      return UrnModel(std::move(u0), ReplacementMatrix::zero(v));
    case MatrixKind::identity:
      return UrnModel(std::move(u0), ReplacementMatrix::identity(v));
    default:
      return UrnModel(std::move(u0), ReplacementMatrix::diagonal(std::move(diag)));
  }
}

void save_doc_models(std::ostream& out, const Corpus& corpus,
                     std::span<const DocumentModel> models,
                     std::uint64_t corpus_hash) {
  out << kDocModelMagic << " v=1 count=" << models.size()
      << " corpus=" << hex64(corpus_hash) << "\n";
  for (const DocumentModel& dm : models) {
    out << "doc " << dm.doc_id << "\t" << dm.weights.size() << "\n";
    for (const TermWeight& tw : dm.weights) {
      out << corpus.term(tw.term) << "\t" << format_double(tw.weight) << "\n";
    }
  }
}

DocModelFile load_doc_models(std::istream& in, const Corpus& corpus) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty document-model file");
  }
  std::istringstream header(line);
  std::string magic, field;
  header >> magic;
  if (magic != kDocModelMagic) {
    throw std::runtime_error("not a polya-docmodels file");
  }
  std::size_t count = 0;
  DocModelFile file;
  while (header >> field) {
    if (field.rfind("count=", 0) == 0) {
      count = static_cast<std::size_t>(std::stoull(field.substr(6)));
    } else if (field.rfind("corpus=", 0) == 0) {
      file.corpus_hash = parse_hex64(field.substr(7));
    }
  }

  file.models.reserve(count);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("doc ", 0) != 0) {
      throw std::runtime_error("expected 'doc' line, got: " + line);
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error("malformed doc line: " + line);
    }
    DocumentModel dm;
    dm.doc_id = line.substr(4, tab - 4);
    const std::size_t n_terms = std::stoull(line.substr(tab + 1));
    dm.weights.reserve(n_terms);
    for (std::size_t i = 0; i < n_terms; ++i) {
      if (!std::getline(in, line)) {
        throw std::runtime_error("document-model file truncated");
      }
      const auto fields = split(line, '\t');
      if (fields.size() != 2) {
        throw std::runtime_error("malformed weight line: " + line);
      }
      const auto id = corpus.find_term(fields[0]);
      if (!id) {
        throw std::runtime_error("document model term '" + fields[0] +
                                 "' not in corpus vocabulary");
      }
      dm.weights.push_back({*id, parse_double(fields[1])});
    }
    file.models.push_back(std::move(dm));
  }
  if (file.models.size() != count) {
    throw std::runtime_error("document-model count mismatch");
  }
  return file;
}

void save_metadata(std::ostream& out, const Metadata& metadata) {
  for (const auto& [key, value] : metadata) {
    out << key << "=" << value << "\n";
  }
}

Metadata load_metadata(std::istream& in) {
  Metadata metadata;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    metadata.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return metadata;
}

}  // namespace polya
