#include <doctest.h>

#include <cmath>

#include "nel/embedding.hpp"
#include "support/tmpdir.hpp"

using namespace nel;

TEST_CASE("init_params is seed-deterministic and norm-bounded") {
  TableCounts counts;
  counts.features = 3;
  counts.mentions = 2;
  counts.entities = 4;
  counts.types = 1;
  TrainConfig cfg;
  cfg.dim = 4;
  cfg.seed = 99;
  auto a = init_params(counts, cfg);
  auto b = init_params(counts, cfg);
  CHECK(a.features.data == b.features.data);
  CHECK(a.types.data == b.types.data);

  cfg.seed = 100;
  auto c = init_params(counts, cfg);
  CHECK(a.features.data != c.features.data);

  for (int r = 0; r < a.entity_targets.rows; ++r) {
    CHECK(norm2(a.entity_targets.row(r)) <= 0.25);
  }

  TableCounts none;
  TrainConfig d1;
  d1.dim = 1;
  auto empty = init_params(none, d1);
  CHECK(empty.entity_targets.rows == 0);

  TrainConfig bad;
  bad.dim = 0;
  CHECK_THROWS(init_params(counts, bad));
}

TEST_CASE("sigmoid identities and stability") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(3.0) + sigmoid(-3.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sigmoid(50.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::isfinite(sigmoid(750.0)));
  CHECK(std::isfinite(sigmoid(-750.0)));
  CHECK(std::isfinite(log_sigmoid(-750.0)));
  CHECK(log_sigmoid(0.0) == doctest::Approx(-std::log(2.0)));
}

TEST_CASE("project_norm scales long vectors only") {
  std::vector<double> v = {2.0, 0.0};
  project_norm(v, 1.0);
  CHECK(norm2(v) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(v[0] == doctest::Approx(1.0));

  std::vector<double> short_v = {0.3, 0.0};
  project_norm(short_v, 1.0);
  CHECK(short_v[0] == 0.3);

  std::vector<double> zero = {0.0, 0.0};
  project_norm(zero, 1.0);
  CHECK(zero[0] == 0.0);

  // idempotent and direction-preserving
  std::vector<double> w = {3.0, 4.0};
  project_norm(w, 1.0);
  auto once = w;
  project_norm(w, 1.0);
  CHECK(w == once);
  CHECK(w[0] / w[1] == doctest::Approx(3.0 / 4.0).epsilon(1e-12));
}

TEST_CASE("mention vector sums known feature rows") {
  FeatureVocab vocab;
  int fa = vocab.add({FeatureKind::kToken, "alpha"});
  int fb = vocab.add({FeatureKind::kToken, "beta"});
  ParamStore store;
  store.dim = 2;
  store.features.resize(2, 2);
  store.features.row(fa)[0] = 1.0;
  store.features.row(fa)[1] = 2.0;
  store.features.row(fb)[0] = 10.0;
  store.features.row(fb)[1] = 20.0;

  auto m = mention_vector_from_features(
      {{FeatureKind::kToken, "alpha"}, {FeatureKind::kToken, "beta"}}, vocab, store);
  CHECK(m == std::vector<double>{11.0, 22.0});

  auto unknown = mention_vector_from_features({{FeatureKind::kToken, "nope"}}, vocab, store);
  CHECK(unknown == std::vector<double>{0.0, 0.0});

  auto single = mention_vector_from_features({{FeatureKind::kToken, "alpha"}}, vocab, store);
  CHECK(single == std::vector<double>{1.0, 2.0});
}

TEST_CASE("labels with spaces and percents survive encoding") {
  CHECK(encode_label("mother tongue") == "mother%20tongue");
  CHECK(decode_label("mother%20tongue") == "mother tongue");
  for (const std::string raw : {"plain", "a b", "100%", "tab\there", "nl\nthere", "%20"}) {
    CHECK(decode_label(encode_label(raw)) == raw);
  }
  CHECK_THROWS(decode_label("bad%2"));
  CHECK_THROWS(decode_label("bad%zz"));
}

TEST_CASE("embedding text round trip") {
  nel::testing::TmpDir dir;
  EmbeddingTable t;
  t.resize(2, 3);
  t.row(0)[0] = 0.125;
  t.row(0)[1] = -1.0 / 3.0;
  t.row(0)[2] = 1e-17;
  t.row(1)[0] = 4.0;
  auto path = dir.file("emb.vec");
  write_embedding_text(path, t, {"first label", "second"});
  auto [labels, again] = read_embedding_text(path);
  REQUIRE(labels.size() == 2);
  CHECK(labels[0] == "first label");
  CHECK(again.rows == 2);
  CHECK(again.dim == 3);
  CHECK(again.data == t.data);
}
