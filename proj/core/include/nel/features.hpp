#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "nel/corpus.hpp"

namespace nel {

enum class FeatureKind {
  kHead,
  kToken,
  kUnigram,
  kBigram,
  kPos,
  kShape,
  kLength,
  kCharSeq,
  kBrown,
  kVerb,
};

std::string_view feature_kind_tag(FeatureKind kind);
std::optional<FeatureKind> feature_kind_from_tag(std::string_view tag);

struct Feature {
  FeatureKind kind = FeatureKind::kToken;
  std::string value;
  bool operator==(const Feature&) const = default;
};

// Stable identity "KIND:value", used for vocab keys and serialization.
std::string feature_key(const Feature& f);
Feature feature_from_key(std::string_view key);

const std::unordered_set<std::string>& default_stopwords();

struct FeatureConfig {
  int window = 2;       // non-stopword context tokens kept per side
  int charseq_k = 3;    // character n-gram length
  int brown_bits = 8;   // cluster bitstring prefix length
  std::unordered_set<std::string> stopwords = default_stopwords();
};

// Plain key=value file: window, charseq_k, brown_bits, stopwords (path to a
// word-per-line list). Unknown keys are an error.
FeatureConfig load_feature_config(const std::string& path);

bool is_stopword(const FeatureConfig& cfg, std::string_view token);

// Character-class runs: uppercase 'A', lowercase 'a', digit '0', other '-'.
// An uppercase run keeps up to two symbols (capitalized vs all-caps stay
// distinct); any other run collapses to one.
std::string word_shape(std::string_view token);

// All contiguous substrings of length k; the whole surface when shorter.
std::vector<std::string> char_sequences(std::string_view surface, int k);

// Index of the verb-tagged token nearest to the span boundary, ties toward
// the left, skipping the span itself.
std::optional<int> nearest_verb(const Sentence& sentence, int start, int end);

// Deduplicated feature list for one mention, deterministic order.
std::vector<Feature> extract_features(const Sentence& sentence, const MentionSpan& span,
                                      const FeatureConfig& cfg);

// Feature index plus feature/entity co-occurrence mass. A feature fires at
// most once per tuple; augmentation tuples may carry fractional weight.
class FeatureVocab {
 public:
  int add(const Feature& f);
  std::optional<int> find(const Feature& f) const;
  const Feature& feature(int id) const;
  int size() const { return static_cast<int>(features_.size()); }
  const std::vector<Feature>& features() const { return features_; }

  void count_pair(int feature_id, const std::string& entity, double w);
  double pair_count(int feature_id, const std::string& entity) const;
  double entity_total(const std::string& entity) const;  // mass of e over all features
  const std::map<std::pair<int, std::string>, double>& pair_counts() const {
    return pair_counts_;
  }
  const std::map<std::string, double>& entity_totals() const { return entity_totals_; }

 private:
  std::vector<Feature> features_;
  std::unordered_map<std::string, int> index_;
  std::map<std::pair<int, std::string>, double> pair_counts_;
  std::map<std::string, double> entity_totals_;
};

// tuple_weights: parallel to corpus.tuples, empty means all 1.0.
FeatureVocab build_feature_vocab(const Corpus& corpus, const FeatureConfig& cfg,
                                 const std::vector<double>& tuple_weights = {});

}  // namespace nel
