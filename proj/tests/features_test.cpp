#include <doctest.h>

#include <algorithm>
#include <set>

#include "nel/features.hpp"
#include "support/tmpdir.hpp"

#include <fstream>

using namespace nel;

namespace {

Token tok(std::string surface, const char* pos = nullptr, const char* cluster = nullptr) {
  Token t;
  t.surface = std::move(surface);
  if (pos) t.pos = pos;
  if (cluster) t.brown_cluster = cluster;
  return t;
}

// "German be the mother tongue of a substantial majority of ethnic Germans ."
// with the copula already lemmatized in the token stream.
Sentence mother_tongue_sentence() {
  Sentence s;
  s.ref = {"doc", 0};
  s.tokens = {tok("German", "NN", "111011001010"),
              tok("be", "VBZ"),
              tok("the", "DT"),
              tok("mother", "NN"),
              tok("tongue", "NN"),
              tok("of", "IN"),
              tok("a", "DT"),
              tok("substantial", "JJ"),
              tok("majority", "NN"),
              tok("of", "IN"),
              tok("ethnic", "JJ"),
              tok("Germans", "NNS"),
              tok(".", ".")};
  return s;
}

MentionSpan first_token_span(const Sentence& s, std::string surface) {
  MentionSpan span;
  span.mid = 0;
  span.sentence = s.ref;
  span.start = 0;
  span.end = 1;
  span.surface = std::move(surface);
  return span;
}

std::set<std::string> keys(const std::vector<Feature>& fs) {
  std::set<std::string> out;
  for (const auto& f : fs) out.insert(feature_key(f));
  return out;
}

}  // namespace

TEST_CASE("extract_features: the mother-tongue sentence") {
  auto s = mother_tongue_sentence();
  auto span = first_token_span(s, "German");
  FeatureConfig cfg;
  auto got = keys(extract_features(s, span, cfg));
  std::set<std::string> want = {
      "HEAD:German",        "TOKEN:German",
      "UNIGRAM:mother",     "UNIGRAM:tongue",
      "BIGRAM:German mother", "BIGRAM:mother tongue",
      "POS:NN",             "SHAPE:Aa",
      "LENGTH:1",           "CHARSEQ:Ger",
      "CHARSEQ:erm",        "CHARSEQ:rma",
      "CHARSEQ:man",        "BROWN:8_11101100",
      "VERB:be",
  };
  CHECK(got == want);
}

TEST_CASE("extract_features: single-token sentence has no context features") {
  Sentence s;
  s.ref = {"doc", 0};
  s.tokens = {tok("Germany", "NNP")};
  auto span = first_token_span(s, "Germany");
  FeatureConfig cfg;
  for (const auto& f : extract_features(s, span, cfg)) {
    CHECK(f.kind != FeatureKind::kUnigram);
    CHECK(f.kind != FeatureKind::kBigram);
    CHECK(f.kind != FeatureKind::kVerb);
  }
}

TEST_CASE("extract_features: deterministic and duplicate-free") {
  auto s = mother_tongue_sentence();
  auto span = first_token_span(s, "German");
  FeatureConfig cfg;
  auto a = extract_features(s, span, cfg);
  auto b = extract_features(s, span, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  CHECK(keys(a).size() == a.size());
}

TEST_CASE("word_shape collapses runs, keeping caps distinct") {
  CHECK(word_shape("German") == "Aa");
  CHECK(word_shape("USA") == "AA");
  CHECK(word_shape("a") == "a");
  CHECK(word_shape("iPhone7") == "aAa0");
  CHECK(word_shape("A1-b") == "A0-a");
}

TEST_CASE("char_sequences") {
  CHECK(char_sequences("German", 3) ==
        std::vector<std::string>{"Ger", "erm", "rma", "man"});
  CHECK(char_sequences("ab", 3) == std::vector<std::string>{"ab"});
  CHECK(char_sequences("abc", 3) == std::vector<std::string>{"abc"});
  CHECK_THROWS(char_sequences("abc", 0));
  CHECK(char_sequences("abcd", 2).size() == 3);
}

TEST_CASE("nearest_verb prefers the left on ties") {
  Sentence s;
  s.ref = {"d", 0};
  s.tokens = {tok("ran", "VBD"), tok("the", "DT"), tok("dog", "NN"), tok("x", "DT"),
              tok("barks", "VBZ")};
  auto v = nearest_verb(s, 2, 3);
  REQUIRE(v);
  CHECK(*v == 0);  // both verbs at distance 2

  Sentence noverb;
  noverb.ref = {"d", 1};
  noverb.tokens = {tok("a", "DT"), tok("b", "NN")};
  CHECK(!nearest_verb(noverb, 1, 2));
}

TEST_CASE("feature keys round trip") {
  Feature f{FeatureKind::kBigram, "mother tongue"};
  CHECK(feature_from_key(feature_key(f)) == f);
  CHECK_THROWS(feature_from_key("NOCOLON"));
  CHECK_THROWS(feature_from_key("BOGUS:x"));
}

TEST_CASE("build_feature_vocab counts co-occurrences per gold entity") {
  Corpus corpus;
  auto s1 = mother_tongue_sentence();
  auto s2 = mother_tongue_sentence();
  s2.ref = {"doc", 1};
  corpus.sentences = {s1, s2};
  TrainingTuple t1{first_token_span(s1, "German"), "German_language"};
  TrainingTuple t2{first_token_span(s2, "German"), "German_language"};
  t2.span.sentence = s2.ref;
  t2.span.mid = 1;
  corpus.tuples = {t1, t2};

  FeatureConfig cfg;
  auto vocab = build_feature_vocab(corpus, cfg);
  CHECK(vocab.size() == 15);
  auto id = vocab.find({FeatureKind::kUnigram, "mother"});
  REQUIRE(id);
  CHECK(vocab.pair_count(*id, "German_language") == 2.0);
  CHECK(vocab.entity_total("German_language") == 30.0);

  // fractional weights scale the mass
  auto weighted = build_feature_vocab(corpus, cfg, {1.0, 0.25});
  auto wid = weighted.find({FeatureKind::kUnigram, "mother"});
  REQUIRE(wid);
  CHECK(weighted.pair_count(*wid, "German_language") == 1.25);
}

TEST_CASE("feature config file parsing") {
  nel::testing::TmpDir dir;
  auto stop = dir.file("stop.txt");
  {
    std::ofstream out(stop);
    out << "foo\nBar\n";
  }
  auto cfgp = dir.file("f.cfg");
  {
    std::ofstream out(cfgp);
    out << "# comment\nwindow = 3\ncharseq_k=4\nbrown_bits = 6\nstopwords = " << stop
        << "\n";
  }
  auto cfg = load_feature_config(cfgp);
  CHECK(cfg.window == 3);
  CHECK(cfg.charseq_k == 4);
  CHECK(cfg.brown_bits == 6);
  CHECK(cfg.stopwords.count("foo") == 1);
  CHECK(cfg.stopwords.count("bar") == 1);
  CHECK(cfg.stopwords.count("the") == 0);
  CHECK(is_stopword(cfg, "BAR"));

  auto badp = dir.file("bad.cfg");
  {
    std::ofstream out(badp);
    out << "mystery = 1\n";
  }
  CHECK_THROWS(load_feature_config(badp));
}
