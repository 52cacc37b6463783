#include <doctest.h>

#include <cmath>
#include <fstream>

#include "nel/candidates.hpp"
#include "support/tmpdir.hpp"

using namespace nel;
using nel::testing::TmpDir;

TEST_CASE("candidates_for orders by count then name") {
  CandidateDictionary dict;
  dict.add("German", "German_language", 1);
  dict.add("German", "Germany", 3);
  auto cands = candidates_for("German", dict);
  REQUIRE(cands.size() == 2);
  CHECK(cands[0].entity == "Germany");
  CHECK(cands[1].entity == "German_language");

  CHECK(candidates_for("unknown", dict).empty());

  CandidateDictionary tied;
  tied.add("m", "Zeta", 2);
  tied.add("m", "Alpha", 2);
  auto t = candidates_for("m", tied);
  CHECK(t[0].entity == "Alpha");
  CHECK(t[1].entity == "Zeta");
}

TEST_CASE("prior probability from anchor statistics") {
  AnchorStats stats;
  stats.add("German", "Germany", 3);
  stats.add("German", "German_language", 1);
  CHECK(prior_probability(stats, "German", "Germany") == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(prior_probability(stats, "German", "German_language") ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(prior_probability(stats, "German", "France") == 0.0);
  CHECK_THROWS(prior_probability(stats, "unseen", "Germany"));

  AnchorStats single;
  single.add("Paris", "Paris", 7);
  CHECK(prior_probability(single, "Paris", "Paris") == 1.0);
}

TEST_CASE("priors over a surface sum to one") {
  AnchorStats stats;
  stats.add("m", "A", 2);
  stats.add("m", "B", 5);
  stats.add("m", "C", 13);
  double sum = prior_probability(stats, "m", "A") + prior_probability(stats, "m", "B") +
               prior_probability(stats, "m", "C");
  CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("anchor stats from tuples, augmentation down-weighted") {
  Corpus corpus;
  TrainingTuple t;
  t.span = {0, {"d", 0}, 0, 1, "German"};
  t.gold_entity = "Germany";
  std::vector<TrainingTuple> tuples = {t};
  TrainingTuple aug = t;
  aug.gold_entity = "German_language";
  auto stats = build_anchor_stats(tuples, {aug}, 0.5);
  CHECK(stats.count("German") == 1.5);
  CHECK(stats.count("German", "German_language") == 0.5);
  CHECK(prior_probability(stats, "German", "Germany") == doctest::Approx(1.0 / 1.5));
}

TEST_CASE("anchor stats from the dictionary counts") {
  CandidateDictionary dict;
  dict.add("German", "Germany", 3);
  dict.add("German", "German_language", 1);
  auto stats = anchor_stats_from_dictionary(dict);
  CHECK(prior_probability(stats, "German", "Germany") == 0.75);
}

TEST_CASE("anchored article selection thresholds") {
  CandidateDictionary dict;
  dict.add("Berlin", "Berlin", 1);

  AnchoredArticle with_mention;
  with_mention.article_id = "a1";
  with_mention.inlinks = 6;
  with_mention.outlinks = 4;
  Sentence s;
  s.ref = {"a1", 0};
  s.tokens = {Token{"Berlin", "NNP", {}}};
  with_mention.sentences = {s};
  TrainingTuple anchor;
  anchor.span = {0, s.ref, 0, 1, "Berlin"};
  anchor.gold_entity = "Berlin";
  with_mention.anchors = {anchor};

  AnchoredArticle no_mention = with_mention;
  no_mention.article_id = "a2";
  no_mention.anchors.clear();

  AnchoredArticle low_links = with_mention;
  low_links.article_id = "a3";
  low_links.inlinks = 0;
  low_links.outlinks = 0;

  std::vector<AnchoredArticle> articles = {with_mention, no_mention, low_links};
  auto kept = select_articles(articles, dict, 5);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0]->article_id == "a1");

  // strictly-greater boundary: links sum 0 fails even at min_links 0
  auto kept0 = select_articles({low_links}, dict, 0);
  CHECK(kept0.empty());

  // idempotence
  std::vector<AnchoredArticle> once;
  for (const auto* a : kept) once.push_back(*a);
  auto twice = select_articles(once, dict, 5);
  CHECK(twice.size() == once.size());
}

TEST_CASE("filter_sentences keeps anchored sentences in order") {
  CandidateDictionary dict;
  dict.add("Berlin", "Berlin", 1);
  AnchoredArticle art;
  art.article_id = "a";
  for (int i = 0; i < 5; ++i) {
    Sentence s;
    s.ref = {"a", i};
    s.tokens = {Token{"Berlin", "NNP", {}}, Token{"word", "NN", {}}};
    art.sentences.push_back(s);
  }
  for (int i : {1, 3}) {
    TrainingTuple anchor;
    anchor.span = {0, {"a", i}, 0, 1, "Berlin"};
    anchor.gold_entity = "Berlin";
    art.anchors.push_back(anchor);
  }
  auto kept = filter_sentences(art, dict);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0]->ref.sent_index == 1);
  CHECK(kept[1]->ref.sent_index == 3);
}

TEST_CASE("anchored article file round trip") {
  TmpDir dir;
  auto path = dir.file("articles.tsv");
  {
    std::ofstream out(path);
    out << "#article\tart1\t7\t3\n"
        << "art1\t0\tBerlin|NNP is|VBZ nice|JJ\t0,1,Berlin\n"
        << "art1\t1\tno anchors here\t\n";
  }
  auto articles = load_anchored_articles(path);
  REQUIRE(articles.size() == 1);
  CHECK(articles[0].inlinks == 7);
  CHECK(articles[0].outlinks == 3);
  CHECK(articles[0].sentences.size() == 2);
  REQUIRE(articles[0].anchors.size() == 1);
  CHECK(articles[0].anchors[0].gold_entity == "Berlin");

  auto copy = dir.file("copy.tsv");
  save_anchored_articles(articles, copy);
  auto again = load_anchored_articles(copy);
  REQUIRE(again.size() == 1);
  CHECK(again[0].article_id == articles[0].article_id);
  CHECK(again[0].sentences.size() == 2);
  CHECK(again[0].anchors.size() == 1);

  auto bad = dir.file("bad.tsv");
  {
    std::ofstream out(bad);
    out << "art1\t0\torphan|NN sentence|NN\t\n";
  }
  CHECK_THROWS(load_anchored_articles(bad));
}
