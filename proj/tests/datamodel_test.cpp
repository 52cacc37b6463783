#include <doctest.h>

#include <fstream>

#include "nel/corpus.hpp"
#include "nel/dictionary.hpp"
#include "nel/knowledge_graph.hpp"
#include "support/tmpdir.hpp"

using namespace nel;
using nel::testing::TmpDir;

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("corpus: one sentence, two mentions, distinct mids") {
  TmpDir dir;
  auto path = dir.file("c.tsv");
  write_file(path, "d1\t0\tBerlin|NNP lies|VBZ in|IN Germany|NNP\t0,1,Berlin;3,4,Germany\n");
  auto corpus = load_corpus(path);
  REQUIRE(corpus.sentences.size() == 1);
  REQUIRE(corpus.tuples.size() == 2);
  CHECK(corpus.tuples[0].span.mid != corpus.tuples[1].span.mid);
  CHECK(corpus.tuples[0].span.surface == "Berlin");
  CHECK(corpus.tuples[1].span.surface == "Germany");
  CHECK(corpus.tuples[1].gold_entity == "Germany");
  CHECK(corpus.sentences[0].tokens[0].pos == "NNP");
  CHECK(!corpus.sentences[0].tokens[0].brown_cluster);
}

TEST_CASE("corpus: empty file loads as empty corpus") {
  TmpDir dir;
  auto path = dir.file("empty.tsv");
  write_file(path, "");
  auto corpus = load_corpus(path);
  CHECK(corpus.sentences.empty());
  CHECK(corpus.tuples.empty());
}

TEST_CASE("corpus: span past sentence end names the sentence") {
  TmpDir dir;
  auto path = dir.file("c.tsv");
  write_file(path, "docX\t3\tone|CD token|NN\t0,5,Thing\n");
  try {
    load_corpus(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    std::string msg = e.what();
    CHECK(msg.find("docX") != std::string::npos);
    CHECK(msg.find("3") != std::string::npos);
  }
}

TEST_CASE("corpus: malformed line reports its number") {
  TmpDir dir;
  auto path = dir.file("c.tsv");
  write_file(path, "d1\t0\tok|NN\t\nnot-enough-fields\n");
  try {
    load_corpus(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("corpus: duplicate (doc, index) rejected") {
  TmpDir dir;
  auto path = dir.file("c.tsv");
  write_file(path, "d1\t0\ta|DT\t\nd1\t0\tb|DT\t\n");
  CHECK_THROWS_AS(load_corpus(path), ParseError);
}

TEST_CASE("corpus: round trip preserves content") {
  TmpDir dir;
  auto path = dir.file("c.tsv");
  write_file(path,
             "d1\t0\tGerman|JJ|11101 is|VBZ spoken|VBN here|RB\t0,1,German_language\n"
             "d1\t1\tPlain words\t\n"
             "d2\t0\tParis|NNP and|CC Berlin|NNP\t0,1,Paris;2,3,Berlin\n");
  auto corpus = load_corpus(path);
  auto copy = dir.file("copy.tsv");
  save_corpus(corpus, copy);
  auto again = load_corpus(copy);
  REQUIRE(again.sentences.size() == corpus.sentences.size());
  REQUIRE(again.tuples.size() == corpus.tuples.size());
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    CHECK(again.sentences[i].ref == corpus.sentences[i].ref);
    REQUIRE(again.sentences[i].tokens.size() == corpus.sentences[i].tokens.size());
    for (std::size_t j = 0; j < corpus.sentences[i].tokens.size(); ++j) {
      CHECK(again.sentences[i].tokens[j].surface == corpus.sentences[i].tokens[j].surface);
      CHECK(again.sentences[i].tokens[j].pos == corpus.sentences[i].tokens[j].pos);
      CHECK(again.sentences[i].tokens[j].brown_cluster ==
            corpus.sentences[i].tokens[j].brown_cluster);
    }
  }
  for (std::size_t i = 0; i < corpus.tuples.size(); ++i) {
    CHECK(again.tuples[i].span.surface == corpus.tuples[i].span.surface);
    CHECK(again.tuples[i].gold_entity == corpus.tuples[i].gold_entity);
    CHECK(again.tuples[i].span.start == corpus.tuples[i].span.start);
  }
}

TEST_CASE("corpus: drop_unlinkable removes and counts") {
  TmpDir dir;
  auto path = dir.file("c.tsv");
  write_file(path, "d1\t0\tGerman|JJ words|NNS\t0,1,Germany;0,1,Nowhere\n");
  auto corpus = load_corpus(path);
  CandidateDictionary dict;
  dict.add("German", "Germany", 3);
  CHECK(drop_unlinkable(corpus, dict) == 1);
  REQUIRE(corpus.tuples.size() == 1);
  CHECK(corpus.tuples[0].gold_entity == "Germany");
  renumber_mids(corpus.tuples);
  CHECK(corpus.tuples[0].span.mid == 0);
}

TEST_CASE("dictionary: grouping and ordering inputs") {
  TmpDir dir;
  auto path = dir.file("d.tsv");
  write_file(path, "German\tGermany\t3\nGerman\tGerman_language\t1\n");
  auto dict = load_dictionary(path);
  const auto* cands = dict.find("German");
  REQUIRE(cands);
  CHECK(cands->size() == 2);
  CHECK(dict.has_pair("German", "Germany"));
  CHECK(!dict.has_pair("German", "France"));
}

TEST_CASE("dictionary: duplicate rows sum counts") {
  TmpDir dir;
  auto path = dir.file("d.tsv");
  write_file(path, "m\tE\t2\nm\tE\t3\n");
  auto dict = load_dictionary(path);
  const auto* cands = dict.find("m");
  REQUIRE(cands);
  REQUIRE(cands->size() == 1);
  CHECK((*cands)[0].anchor_count == 5.0);
}

TEST_CASE("dictionary: zero count rejected with line number") {
  TmpDir dir;
  auto path = dir.file("d.tsv");
  write_file(path, "m\tE\t1\nm\tF\t0\n");
  try {
    load_dictionary(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("knowledge graph: reciprocal triples merge into one undirected edge") {
  TmpDir dir;
  auto path = dir.file("kg.tsv");
  write_file(path, "A\trelated\tB\t1\nB\trelated\tA\t1\n");
  auto kg = load_knowledge_graph(path);
  REQUIRE(kg.ee_edges().size() == 1);
  CHECK(kg.ee_edges()[0].weight == 2.0);
  CHECK(kg.has_ee_edge("A", "B"));
  CHECK(kg.has_ee_edge("B", "A"));
}

TEST_CASE("knowledge graph: empty file, is-a routing, role disjointness") {
  TmpDir dir;
  auto empty = dir.file("e.tsv");
  write_file(empty, "");
  auto kg0 = load_knowledge_graph(empty);
  CHECK(kg0.ee_edges().empty());
  CHECK(kg0.et_edges().empty());

  auto path = dir.file("kg.tsv");
  write_file(path, "A\tis-a\tCity\t1\n");
  auto kg = load_knowledge_graph(path);
  CHECK(kg.ee_edges().empty());
  REQUIRE(kg.et_edges().size() == 1);
  CHECK(kg.types().name(kg.et_edges()[0].type) == "City");
  CHECK(kg.et_edges()[0].weight == 1.0);

  auto bad = dir.file("bad.tsv");
  write_file(bad, "A\tis-a\tCity\t1\nB\trelated\tCity\t1\n");
  CHECK_THROWS(load_knowledge_graph(bad));
}

TEST_CASE("knowledge graph: round trip") {
  TmpDir dir;
  KnowledgeGraph kg;
  kg.add_ee("A", "B", 1.5);
  kg.add_et("A", "City", 2.0);
  auto path = dir.file("kg.tsv");
  save_knowledge_graph(kg, path);
  auto again = load_knowledge_graph(path);
  REQUIRE(again.ee_edges().size() == 1);
  CHECK(again.ee_edges()[0].weight == 1.5);
  REQUIRE(again.et_edges().size() == 1);
  CHECK(again.has_ee_edge("B", "A"));
}
