#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nel/corpus.hpp"
#include "nel/dictionary.hpp"

namespace nel {

// Candidate list ordered by anchor count descending, then entity name.
// Unknown surfaces yield an empty list.
std::vector<Candidate> candidates_for(std::string_view surface, const CandidateDictionary& dict);

// Mention/entity anchor counts backing the prior p(e|m).
class AnchorStats {
 public:
  void add(std::string_view surface, std::string_view entity, double w);
  double count(std::string_view surface) const;
  double count(std::string_view surface, std::string_view entity) const;
  bool has(std::string_view surface) const;

 private:
  std::unordered_map<std::string, std::unordered_map<std::string, double>> counts_;
  std::unordered_map<std::string, double> totals_;
};

// Union of corpus tuples and augmentation anchors; anchors scaled by
// aug_weight (default 1.0).
AnchorStats build_anchor_stats(const std::vector<TrainingTuple>& tuples,
                               const std::vector<TrainingTuple>& aug_anchors = {},
                               double aug_weight = 1.0);
AnchorStats anchor_stats_from_dictionary(const CandidateDictionary& dict);

// count(m,e)/count(m); unseen pairs are 0; no statistics for m is an error.
double prior_probability(const AnchorStats& stats, std::string_view surface,
                         std::string_view entity);

struct AnchoredArticle {
  std::string article_id;
  long inlinks = 0;
  long outlinks = 0;
  std::vector<Sentence> sentences;
  std::vector<TrainingTuple> anchors;
};

// Article header "#article <TAB> id <TAB> inlinks <TAB> outlinks" followed by
// corpus-format sentence records whose mention column holds the anchors.
std::vector<AnchoredArticle> load_anchored_articles(const std::string& path);
void save_anchored_articles(const std::vector<AnchoredArticle>& articles,
                            const std::string& path);

// Keeps articles with at least one dictionary surface among their anchors and
// inlinks+outlinks strictly greater than min_links.
std::vector<const AnchoredArticle*> select_articles(
    const std::vector<AnchoredArticle>& articles, const CandidateDictionary& dict,
    long min_links);

// Sentences of the article carrying at least one dictionary-surface anchor,
// in article order.
std::vector<const Sentence*> filter_sentences(const AnchoredArticle& article,
                                              const CandidateDictionary& dict);

}  // namespace nel
