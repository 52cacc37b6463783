#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nel/candidates.hpp"
#include "nel/trainer.hpp"

namespace nel {

struct Prediction {
  MentionSpan span;
  std::string predicted;
  double score = 0.0;
  std::vector<std::pair<std::string, double>> candidate_scores;
};

// Scores each candidate by dot(sum of feature vectors, entity target row);
// ties break toward higher anchor count, then lexicographic entity order.
// No candidates for the surface is an error.
Prediction link_mention(const Sentence& sentence, const MentionSpan& span,
                        const CandidateDictionary& dict, const Model& model);

// Links every tuple mention with candidates; returns the predictions and the
// count of mentions skipped for lack of candidates.
std::pair<std::vector<Prediction>, std::size_t> link_corpus(const Corpus& corpus,
                                                            const CandidateDictionary& dict,
                                                            const Model& model);

// argmax of the anchor prior, ties lexicographic; constant per surface.
Prediction baseline_prior_link(const MentionSpan& span, const CandidateDictionary& dict,
                               const AnchorStats& stats);
std::pair<std::vector<Prediction>, std::size_t> baseline_link_corpus(
    const Corpus& corpus, const CandidateDictionary& dict, const AnchorStats& stats);

std::unordered_map<std::int64_t, std::string> gold_by_mid(const Corpus& corpus);

enum class EvalLevel { kSentence, kDocument };

// Fraction of predictions matching gold, aligned by mid. Empty input errors.
double micro_accuracy(const std::vector<Prediction>& preds,
                      const std::unordered_map<std::int64_t, std::string>& gold);

// Mean of per-group accuracy, grouped by sentence or document; groups without
// predictions do not participate.
double macro_accuracy(const std::vector<Prediction>& preds,
                      const std::unordered_map<std::int64_t, std::string>& gold,
                      EvalLevel level);

// Discounted gain sum over the first k ranks divided by the ideal ordering;
// 0 when no positive gain exists.
double ndcg_at_k(const std::vector<std::string>& ranked,
                 const std::unordered_map<std::string, double>& gain, int k);

// Candidates sorted by dot(target(query), target(candidate)) descending,
// ties lexicographic. Unknown identifiers are an error.
std::vector<std::string> entity_relatedness_rank(const std::string& query,
                                                 std::vector<std::string> candidates,
                                                 const Model& model);

struct SameMentionEval {
  double micro = 0.0;
  double macro = 0.0;
  std::size_t documents = 0;  // size of the restricted subset
};

// Restricts evaluation to documents where one surface carries different gold
// entities at different positions. Empty subset reports documents = 0.
SameMentionEval same_mention_subset_eval(const Corpus& corpus,
                                         const std::vector<Prediction>& preds,
                                         EvalLevel level = EvalLevel::kDocument);

// Tab-separated: doc_id, sent_index, start, end, predicted, score.
void write_predictions_tsv(const std::vector<Prediction>& preds, const std::string& path);
std::vector<Prediction> read_predictions_tsv(const std::string& path);

// Assigns mids to loaded predictions by matching (doc, sent, start, end)
// against the corpus; unmatched predictions are an error.
void align_predictions(std::vector<Prediction>& preds, const Corpus& corpus);

}  // namespace nel
