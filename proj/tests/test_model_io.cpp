#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "polya/corpus.hpp"
#include "polya/model_io.hpp"

using namespace polya;

namespace {

NamedModel diagonal_model() {
  std::vector<double> u0 = {0.1234567890123456789, 3.0, 1e-12};
  std::vector<double> diag = {1.0, 2.7182818284590452, 42.5};
  return NamedModel{{"alpha", "beta", "gamma"},
                    UrnModel(std::move(u0),
                             ReplacementMatrix::diagonal(std::move(diag))),
                    0xdeadbeefULL};
}

}  // namespace

TEST_CASE("diagonal model round trip is value-exact") {
  const NamedModel original = diagonal_model();
  std::stringstream buffer;
  save_model(buffer, original);

  const std::string first_line = buffer.str().substr(0, buffer.str().find('\n'));
  CHECK(first_line.find("polya-model v=3 variant=diagonal") == 0);

  const NamedModel loaded = load_model(buffer);
  CHECK(loaded.terms == original.terms);
  CHECK(loaded.corpus_hash == original.corpus_hash);
  REQUIRE(loaded.model.size() == 3);
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(loaded.model.u0()[t] == original.model.u0()[t]);  // bit-exact
    CHECK(loaded.model.matrix().diag()[t] == original.model.matrix().diag()[t]);
  }
}

TEST_CASE("zero model has no m column") {
  NamedModel model{{"x", "y"},
                   UrnModel({1.5, 2.5}, ReplacementMatrix::zero(2)),
                   0};
  std::stringstream buffer;
  save_model(buffer, model);
  std::string line;
  std::getline(buffer, line);  // header
  std::getline(buffer, line);
  CHECK(line == "x\t1.5");

  buffer.clear();
  buffer.seekg(0);
  const NamedModel loaded = load_model(buffer);
  CHECK(loaded.model.matrix().kind() == MatrixKind::zero);
  CHECK(loaded.model.u0()[1] == 2.5);
}

TEST_CASE("full model round trips its rows") {
  NamedModel model{{"a", "b"},
                   UrnModel({1.0, 2.0},
                            ReplacementMatrix::full(2, {1.0, 0.5, 0.25, 3.0})),
                   9};
  std::stringstream buffer;
  save_model(buffer, model);
  const NamedModel loaded = load_model(buffer);
  REQUIRE(loaded.model.matrix().kind() == MatrixKind::full);
  CHECK(loaded.model.matrix().row(0)[1] == 0.5);
  CHECK(loaded.model.matrix().row(1)[0] == 0.25);
  CHECK(loaded.model.matrix().row(1)[1] == 3.0);
}

TEST_CASE("model alignment maps terms onto a corpus") {
  const std::vector<std::pair<std::string, std::vector<std::string>>> docs = {
      {"1", {"beta", "alpha"}}, {"2", {"alpha"}}};
  const Corpus corpus = Corpus::build(docs);
  // corpus ids: beta=0, alpha=1; the model lists them in another order.
  NamedModel named{{"alpha", "beta"},
                   UrnModel({10.0, 20.0}, ReplacementMatrix::diagonal({3.0, 4.0})),
                   0};
  const UrnModel aligned = align_model(named, corpus);
  CHECK(aligned.u0()[corpus.find_term("alpha").value()] == 10.0);
  CHECK(aligned.u0()[corpus.find_term("beta").value()] == 20.0);
  CHECK(aligned.matrix().diag()[corpus.find_term("beta").value()] == 4.0);

  NamedModel incomplete{{"alpha"},
                        UrnModel({1.0}, ReplacementMatrix::zero(1)),
                        0};
  CHECK_THROWS_WITH_AS(align_model(incomplete, corpus),
                       doctest::Contains("beta"), std::runtime_error);
}

TEST_CASE("document models round trip") {
  const std::vector<std::pair<std::string, std::vector<std::string>>> docs = {
      {"d1", {"u", "v", "u"}}, {"d2", {"w"}}};
  const Corpus corpus = Corpus::build(docs);

  std::vector<DocumentModel> models(2);
  models[0].doc_id = "d1";
  models[0].weights = {{corpus.find_term("u").value(), 1.75},
                       {corpus.find_term("v").value(), 0.25}};
  models[1].doc_id = "d2";
  models[1].weights = {{corpus.find_term("w").value(), 1.0}};

  std::stringstream buffer;
  save_doc_models(buffer, corpus, models, 123);
  const DocModelFile loaded = load_doc_models(buffer, corpus);
  CHECK(loaded.corpus_hash == 123);
  REQUIRE(loaded.models.size() == 2);
  CHECK(loaded.models[0].doc_id == "d1");
  REQUIRE(loaded.models[0].weights.size() == 2);
  CHECK(loaded.models[0].weights[0].weight == 1.75);
  CHECK(loaded.models[1].weights[0].weight == 1.0);
}

TEST_CASE("metadata round trips in order") {
  Metadata meta = {{"variant", "gspud-mc"}, {"seed", "42"}, {"note", "a=b"}};
  std::stringstream buffer;
  save_metadata(buffer, meta);
  const Metadata loaded = load_metadata(buffer);
  REQUIRE(loaded.size() == 3);
  CHECK(loaded[0].first == "variant");
  CHECK(loaded[2].second == "a=b");
}

TEST_CASE("format_double survives a parse round trip") {
  for (double v : {1.0, -0.3333333333333333, 1e-300, 6.02214076e23,
                   0.1234567890123456789}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}
