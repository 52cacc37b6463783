#include "nel/candidates.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "internal/record.hpp"
#include "internal/text.hpp"

namespace nel {

std::vector<Candidate> candidates_for(std::string_view surface,
                                      const CandidateDictionary& dict) {
  const auto* list = dict.find(surface);
  if (!list) return {};
  std::vector<Candidate> out = *list;
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.anchor_count != b.anchor_count) return a.anchor_count > b.anchor_count;
    return a.entity < b.entity;
  });
  return out;
}

void AnchorStats::add(std::string_view surface, std::string_view entity, double w) {
  if (!(w > 0.0)) throw std::invalid_argument("anchor weight must be positive");
  counts_[std::string(surface)][std::string(entity)] += w;
  totals_[std::string(surface)] += w;
}

double AnchorStats::count(std::string_view surface) const {
  auto it = totals_.find(std::string(surface));
  return it == totals_.end() ? 0.0 : it->second;
}

double AnchorStats::count(std::string_view surface, std::string_view entity) const {
  auto it = counts_.find(std::string(surface));
  if (it == counts_.end()) return 0.0;
  auto jt = it->second.find(std::string(entity));
  return jt == it->second.end() ? 0.0 : jt->second;
}

bool AnchorStats::has(std::string_view surface) const {
  return totals_.count(std::string(surface)) != 0;
}

AnchorStats build_anchor_stats(const std::vector<TrainingTuple>& tuples,
                               const std::vector<TrainingTuple>& aug_anchors,
                               double aug_weight) {
  if (!(aug_weight > 0.0)) throw std::invalid_argument("augmentation weight must be positive");
  AnchorStats stats;
  for (const auto& t : tuples) stats.add(t.span.surface, t.gold_entity, 1.0);
  for (const auto& t : aug_anchors) stats.add(t.span.surface, t.gold_entity, aug_weight);
  return stats;
}

AnchorStats anchor_stats_from_dictionary(const CandidateDictionary& dict) {
  AnchorStats stats;
  for (const auto& surface : dict.surfaces_sorted()) {
    for (const auto& c : *dict.find(surface)) stats.add(surface, c.entity, c.anchor_count);
  }
  return stats;
}

double prior_probability(const AnchorStats& stats, std::string_view surface,
                         std::string_view entity) {
  double total = stats.count(surface);
  if (total <= 0.0) {
    throw std::runtime_error("no anchor statistics for surface '" + std::string(surface) +
                             "'");
  }
  return stats.count(surface, entity) / total;
}

std::vector<AnchoredArticle> load_anchored_articles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open article file: " + path);
  std::vector<AnchoredArticle> articles;
  std::string line;
  long line_no = 0;
  std::int64_t next_mid = 0;
  std::unordered_set<std::string> seen;  // sentence refs within the current article
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("#article\t", 0) == 0) {
      auto fields = detail::split(line, '\t');
      if (fields.size() != 4) {
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": expected #article<TAB>id<TAB>inlinks<TAB>outlinks");
      }
      AnchoredArticle art;
      art.article_id = std::string(fields[1]);
      if (art.article_id.empty() || !detail::parse_long(fields[2], art.inlinks) ||
          !detail::parse_long(fields[3], art.outlinks) || art.inlinks < 0 ||
          art.outlinks < 0) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": bad article header");
      }
      articles.push_back(std::move(art));
      seen.clear();
      continue;
    }
    if (articles.empty()) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": sentence record before any #article header");
    }
    auto rec = detail::parse_sentence_record(line, path, line_no, next_mid);
    if (!seen.insert(sentence_key(rec.sentence.ref)).second) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": duplicate sentence in article " +
                       articles.back().article_id);
    }
    articles.back().sentences.push_back(std::move(rec.sentence));
    for (auto& t : rec.tuples) articles.back().anchors.push_back(std::move(t));
  }
  return articles;
}

void save_anchored_articles(const std::vector<AnchoredArticle>& articles,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write article file: " + path);
  for (const auto& art : articles) {
    out << "#article\t" << art.article_id << '\t' << art.inlinks << '\t' << art.outlinks
        << '\n';
    std::unordered_map<std::string, std::vector<const TrainingTuple*>> by_sentence;
    for (const auto& a : art.anchors) by_sentence[sentence_key(a.span.sentence)].push_back(&a);
    for (const auto& sent : art.sentences) {
      auto it = by_sentence.find(sentence_key(sent.ref));
      static const std::vector<const TrainingTuple*> kNone;
      out << detail::format_sentence_record(sent, it == by_sentence.end() ? kNone : it->second)
          << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<const AnchoredArticle*> select_articles(
    const std::vector<AnchoredArticle>& articles, const CandidateDictionary& dict,
    long min_links) {
  std::vector<const AnchoredArticle*> out;
  for (const auto& art : articles) {
    if (art.inlinks + art.outlinks <= min_links) continue;
    bool has_surface = std::any_of(art.anchors.begin(), art.anchors.end(),
                                   [&](const TrainingTuple& a) {
                                     return dict.contains(a.span.surface);
                                   });
    if (has_surface) out.push_back(&art);
  }
  return out;
}

std::vector<const Sentence*> filter_sentences(const AnchoredArticle& article,
                                              const CandidateDictionary& dict) {
  std::unordered_set<std::string> keep;
  for (const auto& a : article.anchors) {
    if (dict.contains(a.span.surface)) keep.insert(sentence_key(a.span.sentence));
  }
  std::vector<const Sentence*> out;
  for (const auto& s : article.sentences) {
    if (keep.count(sentence_key(s.ref))) out.push_back(&s);
  }
  return out;
}

}  // namespace nel
