#include "nel/linker.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <tuple>

#include "internal/text.hpp"

namespace nel {

namespace {

std::string doc_of(const Prediction& p) { return p.span.sentence.doc_id; }

std::string group_key(const Prediction& p, EvalLevel level) {
  if (level == EvalLevel::kDocument) return doc_of(p);
  return sentence_key(p.span.sentence);
}

const std::string& gold_for(const std::unordered_map<std::int64_t, std::string>& gold,
                            const Prediction& p) {
  auto it = gold.find(p.span.mid);
  if (it == gold.end()) {
    throw std::invalid_argument("prediction for unknown mention id " +
                                std::to_string(p.span.mid));
  }
  return it->second;
}

}  // namespace

Prediction link_mention(const Sentence& sentence, const MentionSpan& span,
                        const CandidateDictionary& dict, const Model& model) {
  auto cands = candidates_for(span.surface, dict);
  if (cands.empty()) {
    throw std::runtime_error("no candidates for surface '" + span.surface + "'");
  }
  auto features = extract_features(sentence, span, model.feature_cfg);
  auto m = model.mention_vector(features);

  Prediction pred;
  pred.span = span;
  bool first = true;
  double best = 0.0;
  // cands arrive ordered by anchor count then name, so a strictly-greater
  // keep realizes both tie-break rules.
  for (const auto& c : cands) {
    auto id = model.entities.find(c.entity);
    double score = id ? dot({m.data(), m.size()}, model.params.entity_targets.row(*id))
                      : 0.0;
    pred.candidate_scores.emplace_back(c.entity, score);
    if (first || score > best) {
      first = false;
      best = score;
      pred.predicted = c.entity;
      pred.score = score;
    }
  }
  return pred;
}

std::pair<std::vector<Prediction>, std::size_t> link_corpus(const Corpus& corpus,
                                                            const CandidateDictionary& dict,
                                                            const Model& model) {
  SentenceLookup lookup(corpus.sentences);
  std::vector<Prediction> preds;
  std::size_t skipped = 0;
  for (const auto& t : corpus.tuples) {
    if (!dict.find(t.span.surface)) {
      ++skipped;
      continue;
    }
    const Sentence* sentence = lookup.find(t.span.sentence);
    if (!sentence) {
      throw std::invalid_argument("mention references a missing sentence: " +
                                  sentence_key(t.span.sentence));
    }
    preds.push_back(link_mention(*sentence, t.span, dict, model));
  }
  return {std::move(preds), skipped};
}

Prediction baseline_prior_link(const MentionSpan& span, const CandidateDictionary& dict,
                               const AnchorStats& stats) {
  auto cands = candidates_for(span.surface, dict);
  if (cands.empty()) {
    throw std::runtime_error("no candidates for surface '" + span.surface + "'");
  }
  Prediction pred;
  pred.span = span;
  bool first = true;
  double best = 0.0;
  std::vector<std::pair<std::string, double>> scored;
  for (const auto& c : cands) scored.emplace_back(c.entity, 0.0);
  std::sort(scored.begin(), scored.end());  // prior ties break lexicographically
  for (auto& [entity, score] : scored) {
    score = prior_probability(stats, span.surface, entity);
    pred.candidate_scores.emplace_back(entity, score);
    if (first || score > best) {
      first = false;
      best = score;
      pred.predicted = entity;
      pred.score = score;
    }
  }
  return pred;
}

std::pair<std::vector<Prediction>, std::size_t> baseline_link_corpus(
    const Corpus& corpus, const CandidateDictionary& dict, const AnchorStats& stats) {
  std::vector<Prediction> preds;
  std::size_t skipped = 0;
  for (const auto& t : corpus.tuples) {
    if (!dict.find(t.span.surface)) {
      ++skipped;
      continue;
    }
    preds.push_back(baseline_prior_link(t.span, dict, stats));
  }
  return {std::move(preds), skipped};
}

std::unordered_map<std::int64_t, std::string> gold_by_mid(const Corpus& corpus) {
  std::unordered_map<std::int64_t, std::string> gold;
  for (const auto& t : corpus.tuples) gold.emplace(t.span.mid, t.gold_entity);
  return gold;
}

double micro_accuracy(const std::vector<Prediction>& preds,
                      const std::unordered_map<std::int64_t, std::string>& gold) {
  if (preds.empty()) throw std::invalid_argument("no predictions to score");
  std::size_t hits = 0;
  for (const auto& p : preds) {
    if (p.predicted == gold_for(gold, p)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

double macro_accuracy(const std::vector<Prediction>& preds,
                      const std::unordered_map<std::int64_t, std::string>& gold,
                      EvalLevel level) {
  if (preds.empty()) throw std::invalid_argument("no predictions to score");
  std::map<std::string, std::pair<std::size_t, std::size_t>> groups;  // hits, total
  for (const auto& p : preds) {
    auto& [hits, total] = groups[group_key(p, level)];
    ++total;
    if (p.predicted == gold_for(gold, p)) ++hits;
  }
  double sum = 0.0;
  for (const auto& [key, ht] : groups) {
    sum += static_cast<double>(ht.first) / static_cast<double>(ht.second);
  }
  return sum / static_cast<double>(groups.size());
}

double ndcg_at_k(const std::vector<std::string>& ranked,
                 const std::unordered_map<std::string, double>& gain, int k) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  auto discounted = [&](const std::vector<double>& gains) {
    double s = 0.0;
    int limit = std::min<int>(k, static_cast<int>(gains.size()));
    for (int rank = 1; rank <= limit; ++rank) {
      s += gains[static_cast<std::size_t>(rank - 1)] /
           std::log2(static_cast<double>(rank) + 1.0);
    }
    return s;
  };
  std::vector<double> actual;
  actual.reserve(ranked.size());
  for (const auto& id : ranked) {
    auto it = gain.find(id);
    actual.push_back(it == gain.end() ? 0.0 : it->second);
  }
  std::vector<double> ideal = actual;
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = discounted(ideal);
  if (idcg <= 0.0) return 0.0;
  return discounted(actual) / idcg;
}

std::vector<std::string> entity_relatedness_rank(const std::string& query,
                                                 std::vector<std::string> candidates,
                                                 const Model& model) {
  auto qid = model.entities.find(query);
  if (!qid) throw std::invalid_argument("unknown entity '" + query + "'");
  auto qrow = model.params.entity_targets.row(*qid);
  std::vector<std::pair<double, std::string>> scored;
  scored.reserve(candidates.size());
  for (auto& c : candidates) {
    auto cid = model.entities.find(c);
    if (!cid) throw std::invalid_argument("unknown entity '" + c + "'");
    scored.emplace_back(dot(qrow, model.params.entity_targets.row(*cid)), std::move(c));
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::string> out;
  out.reserve(scored.size());
  for (auto& [score, name] : scored) out.push_back(std::move(name));
  return out;
}

SameMentionEval same_mention_subset_eval(const Corpus& corpus,
                                         const std::vector<Prediction>& preds,
                                         EvalLevel level) {
  // Documents where one surface form carries at least two distinct golds.
  std::map<std::string, std::map<std::string, std::set<std::string>>> by_doc;
  for (const auto& t : corpus.tuples) {
    by_doc[t.span.sentence.doc_id][t.span.surface].insert(t.gold_entity);
  }
  std::set<std::string> subset;
  for (const auto& [doc, surfaces] : by_doc) {
    for (const auto& [surface, golds] : surfaces) {
      if (golds.size() >= 2) {
        subset.insert(doc);
        break;
      }
    }
  }
  SameMentionEval eval;
  eval.documents = subset.size();
  if (subset.empty()) return eval;

  std::vector<Prediction> kept;
  for (const auto& p : preds) {
    if (subset.count(doc_of(p))) kept.push_back(p);
  }
  if (kept.empty()) {
    eval.documents = 0;
    return eval;
  }
  auto gold = gold_by_mid(corpus);
  eval.micro = micro_accuracy(kept, gold);
  eval.macro = macro_accuracy(kept, gold, level);
  return eval;
}

void write_predictions_tsv(const std::vector<Prediction>& preds, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open '" + path + "': " + std::strerror(errno));
  for (const auto& p : preds) {
    std::fprintf(f, "%s\t%d\t%d\t%d\t%s\t%.17g\n", p.span.sentence.doc_id.c_str(),
                 p.span.sentence.sent_index, p.span.start, p.span.end,
                 p.predicted.c_str(), p.score);
  }
  bool bad = std::ferror(f);
  std::fclose(f);
  if (bad) throw std::runtime_error("write failed: " + path);
}

std::vector<Prediction> read_predictions_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<Prediction> preds;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = detail::split(line, '\t');
    if (fields.size() != 6) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected 6 tab-separated fields");
    }
    std::string where = path + ":" + std::to_string(line_no);
    Prediction p;
    p.span.sentence.doc_id = std::string(fields[0]);
    p.span.sentence.sent_index = detail::require_int(fields[1], "sentence index at " + where);
    p.span.start = detail::require_int(fields[2], "span start at " + where);
    p.span.end = detail::require_int(fields[3], "span end at " + where);
    p.predicted = std::string(fields[4]);
    p.score = detail::require_double(fields[5], "score at " + where);
    p.span.mid = -1;
    preds.push_back(std::move(p));
  }
  return preds;
}

void align_predictions(std::vector<Prediction>& preds, const Corpus& corpus) {
  std::map<std::tuple<std::string, int, int, int>, const TrainingTuple*> index;
  for (const auto& t : corpus.tuples) {
    index[{t.span.sentence.doc_id, t.span.sentence.sent_index, t.span.start,
           t.span.end}] = &t;
  }
  for (auto& p : preds) {
    auto it = index.find({p.span.sentence.doc_id, p.span.sentence.sent_index,
                          p.span.start, p.span.end});
    if (it == index.end()) {
      throw std::invalid_argument("prediction does not match any corpus mention: " +
                                  p.span.sentence.doc_id + " sentence " +
                                  std::to_string(p.span.sentence.sent_index) + " span " +
                                  std::to_string(p.span.start) + ".." +
                                  std::to_string(p.span.end));
    }
    p.span.mid = it->second->span.mid;
    p.span.surface = it->second->span.surface;
  }
}

}  // namespace nel
