#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "polya/corpus.hpp"
#include "polya/estimation.hpp"
#include "polya/urn.hpp"

namespace polya {

// An urn model together with the term string for each row, so files are
// meaningful independent of any particular corpus load order.
struct NamedModel {
  std::vector<std::string> terms;
  UrnModel model;
  std::uint64_t corpus_hash = 0;
};

// Line-oriented text format:
//   polya-model v=<vocab> variant=<zero|identity|diagonal|full> [corpus=<hex>]
//   <term>\t<u0>[\t<m>]          one line per term; m column for diagonal
//   row <k>\t<v values>          full matrices only, one block per row
// Values are written with 17 significant digits so a round trip is
// value-exact.
void save_model(std::ostream& out, const NamedModel& model);
NamedModel load_model(std::istream& in);

// Aligns a named model against a corpus vocabulary (by term string).
// Throws if the model does not cover the corpus vocabulary.
UrnModel align_model(const NamedModel& named, const Corpus& corpus);

void save_doc_models(std::ostream& out, const Corpus& corpus,
                     std::span<const DocumentModel> models,
                     std::uint64_t corpus_hash);
struct DocModelFile {
  std::vector<DocumentModel> models;
  std::uint64_t corpus_hash = 0;
};
DocModelFile load_doc_models(std::istream& in, const Corpus& corpus);

// Run metadata as "key=value" lines, in insertion order.
using Metadata = std::vector<std::pair<std::string, std::string>>;
void save_metadata(std::ostream& out, const Metadata& metadata);
Metadata load_metadata(std::istream& in);

// 17-significant-digit decimal rendering used by all persisted artifacts.
std::string format_double(double value);

}  // namespace polya
