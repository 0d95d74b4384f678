#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "polya/corpus.hpp"
#include "polya/stopwords.hpp"

using namespace polya;

namespace {

Corpus toy_corpus(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& docs) {
  return Corpus::build(docs);
}

}  // namespace

TEST_CASE("cranfield single record") {
  const auto records = parse_cranfield(".I 1\n.W\nhello world\n");
  REQUIRE(records.size() == 1);
  CHECK(records[0].id == "1");
  CHECK(records[0].body == "hello world");
}

TEST_CASE("cranfield two records") {
  const auto records = parse_cranfield(".I 1\n.W\na\n.I 2\n.W\nb\n");
  REQUIRE(records.size() == 2);
  CHECK(records[0].id == "1");
  CHECK(records[0].body == "a");
  CHECK(records[1].id == "2");
  CHECK(records[1].body == "b");
}

TEST_CASE("cranfield empty input") {
  CHECK(parse_cranfield("").empty());
}

TEST_CASE("cranfield multi-line bodies and other fields") {
  const std::string text =
      ".I 7\n.T\nsome title\n.A\nauthor\n.W\nline one\nline two\n.I 8\n.W\nx\n";
  const auto records = parse_cranfield(text);
  REQUIRE(records.size() == 2);
  CHECK(records[0].body == "line one\nline two");

  CranfieldOptions with_titles{true};
  const auto titled = parse_cranfield(text, with_titles);
  CHECK(titled[0].body == "some title\nline one\nline two");
}

TEST_CASE("cranfield trailing field markers end the body") {
  // CISI-style .X cross-reference blocks after .W must not leak into text.
  const auto records =
      parse_cranfield(".I 1\n.W\nreal text\n.X\n1 5 1\n2 4 1\n");
  REQUIRE(records.size() == 1);
  CHECK(records[0].body == "real text");
}

TEST_CASE("cranfield .W before .I reports the byte offset") {
  const std::string text = "junk\n.W\nbody\n";
  try {
    parse_cranfield(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.byte_offset() == 5);  // ".W" line starts after "junk\n"
    CHECK(std::string(e.what()).find("5") != std::string::npos);
  }
}

TEST_CASE("preprocess removes stopwords and stems") {
  const auto tokens = preprocess("The DNA of cells", smart_stopwords());
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0] == "dna");
  CHECK(tokens[1] == "cell");
}

TEST_CASE("preprocess empty input") {
  CHECK(preprocess("", smart_stopwords()).empty());
}

TEST_CASE("preprocess stems and keeps order") {
  const auto tokens = preprocess("running runs run", smart_stopwords());
  REQUIRE(tokens.size() == 3);
  for (const auto& t : tokens) CHECK(t == "run");
}

TEST_CASE("preprocess drops numbers, keeps mixed alphanumerics") {
  const auto tokens = preprocess("1962 report x15 445", smart_stopwords());
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0] == "report");
  CHECK(tokens[1] == "x15");
}

TEST_CASE("preprocess splits on punctuation and lowercases") {
  const auto tokens = preprocess("Boundary-Layer's effects!", smart_stopwords());
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[0] == "boundari");
  CHECK(tokens[1] == "layer");
  CHECK(tokens[2] == "effect");
}

TEST_CASE("build_corpus counts") {
  const Corpus corpus = toy_corpus({{"1", {"a", "b", "a"}}});
  CHECK(corpus.vocabulary_size() == 2);
  CHECK(corpus.cf(0) == 2);
  CHECK(corpus.cf(1) == 1);
  CHECK(corpus.df(0) == 1);
  CHECK(corpus.df(1) == 1);
  CHECK(corpus.total_tokens() == 3);
  CHECK(corpus.document(0).unique_term_count == 2);
}

TEST_CASE("build_corpus document frequency across documents") {
  const Corpus corpus = toy_corpus({{"1", {"a"}}, {"2", {"a"}}});
  CHECK(corpus.cf(0) == 2);
  CHECK(corpus.df(0) == 2);
}

TEST_CASE("build_corpus assigns ids in first-occurrence order") {
  const Corpus corpus = toy_corpus({{"1", {"x", "y"}}, {"2", {"z", "x"}}});
  CHECK(corpus.term(0) == "x");
  CHECK(corpus.term(1) == "y");
  CHECK(corpus.term(2) == "z");
  CHECK(corpus.find_term("z").value() == 2);
  CHECK(!corpus.find_term("w").has_value());
}

TEST_CASE("build_corpus rejects empty input") {
  std::vector<std::pair<std::string, std::vector<std::string>>> none;
  CHECK_THROWS_AS(Corpus::build(none), std::invalid_argument);
}

TEST_CASE("burstiness table values") {
  // cf/df pairs for the terms "also", "dna" and "refer" in Medline.
  const Corpus corpus = toy_corpus({{"1", {"w"}}});
  (void)corpus;
  CHECK(216.0 / 180.0 == doctest::Approx(1.20).epsilon(1e-12));
  CHECK(214.0 / 47.0 == doctest::Approx(4.553191489).epsilon(1e-9));
  CHECK(51.0 / 47.0 == doctest::Approx(1.085106383).epsilon(1e-9));
}

TEST_CASE("burstiness of a constructed corpus") {
  const Corpus corpus =
      toy_corpus({{"1", {"a", "a", "b"}}, {"2", {"a", "b"}}, {"3", {"b"}}});
  CHECK(corpus.burstiness(0) == doctest::Approx(3.0 / 2.0));
  CHECK(corpus.burstiness(1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(corpus.burstiness(99), std::out_of_range);
}

TEST_CASE("burstiness is at least one for every term") {
  const Corpus corpus = toy_corpus(
      {{"1", {"a", "a", "a", "b", "c"}}, {"2", {"b", "c", "c", "a"}}});
  for (term_id t = 0; t < corpus.vocabulary_size(); ++t) {
    CHECK(corpus.burstiness(t) >= 1.0);
  }
}

TEST_CASE("per-document term counts sum to the token count") {
  const Corpus corpus = toy_corpus(
      {{"1", {"a", "b", "a", "c", "a"}}, {"2", {"c", "c", "b"}}});
  for (const Document& doc : corpus.documents()) {
    std::uint64_t total = 0;
    const auto counts = count_terms(doc.tokens);
    for (const TermCount& tc : counts) total += tc.count;
    CHECK(total == doc.tokens.size());
    CHECK(counts.size() == doc.unique_term_count);
  }
}

TEST_CASE("rebuilding a corpus is deterministic") {
  const std::vector<std::pair<std::string, std::vector<std::string>>> docs = {
      {"1", {"m", "n", "m", "o"}}, {"2", {"o", "p"}}};
  const Corpus a = Corpus::build(docs);
  const Corpus b = Corpus::build(docs);
  REQUIRE(a.vocabulary_size() == b.vocabulary_size());
  for (term_id t = 0; t < a.vocabulary_size(); ++t) {
    CHECK(a.term(t) == b.term(t));
    CHECK(a.cf(t) == b.cf(t));
    CHECK(a.df(t) == b.df(t));
  }
}

TEST_CASE("corpus snapshot round trip") {
  const Corpus corpus = toy_corpus(
      {{"d1", {"alpha", "beta", "alpha"}}, {"d2", {"beta", "gamma"}}});
  std::stringstream buffer;
  save_corpus(buffer, corpus, 0x1234abcdULL);

  const CorpusSnapshot loaded = load_corpus(buffer);
  CHECK(loaded.config_hash == 0x1234abcdULL);
  REQUIRE(loaded.corpus.vocabulary_size() == corpus.vocabulary_size());
  CHECK(loaded.corpus.total_tokens() == corpus.total_tokens());
  for (term_id t = 0; t < corpus.vocabulary_size(); ++t) {
    CHECK(loaded.corpus.term(t) == corpus.term(t));
    CHECK(loaded.corpus.cf(t) == corpus.cf(t));
    CHECK(loaded.corpus.df(t) == corpus.df(t));
  }

  // Re-saving yields identical bytes.
  std::stringstream second;
  save_corpus(second, loaded.corpus, loaded.config_hash);
  std::stringstream expected;
  save_corpus(expected, corpus, 0x1234abcdULL);
  CHECK(second.str() == expected.str());
}

TEST_CASE("query mapping drops out-of-vocabulary tokens") {
  const Corpus corpus = toy_corpus({{"1", {"alpha", "beta"}}});
  const std::vector<std::string> tokens = {"alpha", "missing", "beta"};
  const Query q = map_query(corpus, "q1", tokens);
  CHECK(q.query_id == "q1");
  REQUIRE(q.tokens.size() == 2);
  CHECK(q.dropped_tokens == 1);
}

TEST_CASE("query snapshot round trip") {
  const Corpus corpus = toy_corpus({{"1", {"alpha", "beta"}}});
  std::vector<Query> queries;
  const std::vector<std::string> tokens = {"beta", "beta", "gone"};
  queries.push_back(map_query(corpus, "q9", tokens));

  std::stringstream buffer;
  save_queries(buffer, queries, 77);
  const QuerySnapshot loaded = load_queries(buffer);
  CHECK(loaded.corpus_hash == 77);
  REQUIRE(loaded.queries.size() == 1);
  CHECK(loaded.queries[0].query_id == "q9");
  CHECK(loaded.queries[0].tokens == std::vector<term_id>{1, 1});
  CHECK(loaded.queries[0].dropped_tokens == 1);
}

TEST_CASE("embedded stopword list matches the shipped data file") {
  std::ifstream in(std::string(POLYA_SOURCE_DIR) +
                   "/core/data/smart_stopwords.txt");
  REQUIRE(in.good());
  const auto from_file = load_stopwords(in);
  CHECK(from_file == smart_stopwords());
  CHECK(smart_stopwords().contains("the"));
  CHECK(smart_stopwords().contains("of"));
  CHECK(!smart_stopwords().contains("dna"));
}

TEST_CASE("cranfield record without an id is rejected") {
  CHECK_THROWS_AS(parse_cranfield(".I\n.W\nbody\n"), ParseError);
  CHECK_THROWS_AS(parse_cranfield(".I   \n.W\nbody\n"), ParseError);
}

TEST_CASE("numeric ids lose their leading zeros") {
  CHECK(normalize_id("001") == "1");
  CHECK(normalize_id("0") == "0");
  CHECK(normalize_id("000") == "0");
  CHECK(normalize_id("42") == "42");
  CHECK(normalize_id("I-07") == "I-07");
  CHECK(normalize_id("") == "");
}

TEST_CASE("corpus statistics invariants hold on random inputs") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> n_docs(1, 12);
  std::uniform_int_distribution<int> n_tokens(0, 30);
  std::uniform_int_distribution<int> word(0, 9);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<std::pair<std::string, std::vector<std::string>>> docs;
    const int d = n_docs(rng);
    bool any_token = false;
    for (int i = 0; i < d; ++i) {
      std::vector<std::string> tokens;
      const int n = n_tokens(rng);
      for (int j = 0; j < n; ++j) {
        tokens.push_back("w" + std::to_string(word(rng)));
        any_token = true;
      }
      docs.emplace_back("d" + std::to_string(i), std::move(tokens));
    }
    if (!any_token) continue;
    const Corpus corpus = Corpus::build(docs);
    std::int64_t cf_sum = 0;
    for (term_id t = 0; t < corpus.vocabulary_size(); ++t) {
      CHECK(corpus.df(t) >= 1);
      CHECK(corpus.df(t) <= corpus.cf(t));
      CHECK(corpus.cf(t) <= corpus.total_tokens());
      CHECK(corpus.df(t) <= static_cast<std::int64_t>(corpus.doc_count()));
      cf_sum += corpus.cf(t);
    }
    CHECK(cf_sum == corpus.total_tokens());
  }
}
