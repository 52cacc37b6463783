#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "nel/embedding.hpp"

namespace nel {

// Draws item ids with probability count^power / sum(count^power), exact up to
// rounding, via the alias method. Counts must be strictly positive.
class NoiseTable {
 public:
  NoiseTable(const std::vector<std::pair<int, double>>& counts, double power = 0.75);

  int draw(std::mt19937_64& rng) const;
  int size() const { return static_cast<int>(items_.size()); }
  bool contains(int item) const { return prob_.count(item) != 0; }
  const std::vector<int>& items() const { return items_; }
  // Probability implied by the alias structure, for exactness checks.
  double probability(int item) const;

 private:
  std::vector<int> items_;
  std::vector<double> slot_prob_;
  std::vector<int> slot_alias_;
  std::unordered_map<int, double> prob_;
};

// q i.i.d. draws, rejecting members of exclude. Errors when exclude covers
// the whole support.
std::vector<int> sample_negatives(const NoiseTable& table, int q,
                                  const std::vector<int>& exclude, std::mt19937_64& rng);

struct GradEntry {
  TableId table = TableId::kFeatures;
  int row = 0;
  std::vector<double> g;
};

// Accumulates per-row gradients; repeated (table, row) contributions sum.
struct SparseGrad {
  std::vector<GradEntry> entries;
  std::span<double> at(TableId table, int row, int dim);
  void add_scaled(TableId table, int row, double coeff, std::span<const double> v);
};

struct LossGrad {
  double loss = 0.0;
  SparseGrad grad;
};

// Negative-sampled skip-gram term between a context feature and an entity:
// -w * (log s(f.y) + sum_neg log s(-f.y'_neg)). The positive side reads the
// entity target row, negatives read context rows.
LossGrad fe_loss_grad(int feature, int entity, std::span<const int> negatives,
                      const ParamStore& store, double weight);

// Margin ranking term for one mention against its candidate set, plus the
// L2 pull (lambda/2)(||m||^2 + ||y_gold||^2).
LossGrad hinge_loss_grad(int mid, int gold, std::span<const int> candidates,
                         const ParamStore& store, double lambda);

// Skip-gram over knowledge-graph neighborhoods: target entity row against
// context rows of the neighbor and of sampled negatives.
LossGrad ee_loss_grad(int target, int context, std::span<const int> negatives,
                      const ParamStore& store, double weight);

// Skip-gram between an entity target row and type rows.
LossGrad et_loss_grad(int entity, int type, std::span<const int> negatives,
                      const ParamStore& store, double weight);

struct CoherenceQuad {
  int e_i = 0;
  int e_j = 0;
  int mid_i = 0;
  int mid_j = 0;
};

// I = Ie*Im + 1 - Ie with Ie = s(y_i.y_j), Im = s(m_i.m_j); in (0, 1].
double coherence_confidence(const CoherenceQuad& quad, const ParamStore& store);

// -log I(quad) - sum_neg log(1 - I(neg)), probabilities clamped to
// [1e-12, 1-1e-12] inside the logs.
LossGrad coherence_loss_grad(const CoherenceQuad& quad,
                             std::span<const CoherenceQuad> negatives,
                             const ParamStore& store);

// Rejection context for negative quads: mention lists per entity, sentence
// ordinal per mention, and the undirected entity-entity adjacency.
struct QuadSamplerContext {
  std::vector<std::vector<int>> mentions_of_entity;
  std::vector<int> sentence_of_mid;
  std::unordered_set<std::uint64_t> ee_pairs;

  bool has_ee_edge(int a, int b) const;
  bool co_sentence(int mid_a, int mid_b) const;
  void add_ee_pair(int a, int b);
};

// Replaces the j side with a noise entity and one of its mentions; accepts
// only pairs that are not co-sentence and not knowledge-graph neighbors.
// Errors when the retry budget is exhausted before q acceptances.
std::vector<CoherenceQuad> sample_negative_quads(const CoherenceQuad& quad,
                                                 const QuadSamplerContext& ctx,
                                                 const NoiseTable& entity_noise, int q,
                                                 int retry_budget, std::mt19937_64& rng);

// Uniform helpers shared by samplers and the trainer.
double next_uniform(std::mt19937_64& rng);               // [0, 1)
std::size_t next_index(std::mt19937_64& rng, std::size_t n);

}  // namespace nel
