#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nel/candidates.hpp"
#include "nel/embedding.hpp"
#include "nel/knowledge_graph.hpp"
#include "nel/objectives.hpp"

namespace nel {

struct FeTrainEdge {
  int feature = 0;
  int entity = 0;
  double weight = 0.0;
};

struct MyTrainItem {
  int mid = 0;
  int gold = 0;
  std::vector<int> candidates;
};

struct EeTrainEdge {
  int a = 0;
  int b = 0;
  double weight = 0.0;
};

struct EtTrainEdge {
  int entity = 0;
  int type = 0;
  double weight = 0.0;
};

// Everything the sampler loop draws from, in one index space: entities and
// types are interned here, mention rows follow tuple order.
struct EdgeSets {
  std::vector<FeTrainEdge> fe;
  std::vector<MyTrainItem> my;
  std::vector<EeTrainEdge> ee;  // undirected, sampled in both directions
  std::vector<EtTrainEdge> et;
  std::vector<CoherenceQuad> quads;

  std::optional<NoiseTable> fe_noise;    // entities by feature co-occurrence mass
  std::optional<NoiseTable> ee_noise;    // entities by weighted degree
  std::optional<NoiseTable> et_noise;    // types by weighted mass
  std::optional<NoiseTable> quad_noise;  // entities by gold-mention count
  QuadSamplerContext quad_ctx;

  IdVocab entities;
  IdVocab types;
  int mention_count = 0;
  std::vector<std::string> warnings;  // one per empty edge set
};

// tuple_weights parallel to corpus.tuples (empty = all 1.0); weights scale
// feature-entity co-occurrence mass and anchor statistics, not the hinge.
EdgeSets build_edge_sets(const Corpus& corpus, const FeatureVocab& vocab,
                         const CandidateDictionary& dict, const KnowledgeGraph& kg,
                         const std::vector<double>& tuple_weights = {});

struct TrainReport {
  long iterations = 0;
  bool converged = false;
  bool parallel = false;
  double wall_seconds = 0.0;
  // One sampled estimate per iteration and objective; zeros for skipped sets.
  std::vector<double> fe_loss;
  std::vector<double> my_loss;
  std::vector<double> ee_loss;
  std::vector<double> et_loss;
  std::vector<double> coh_loss;
  std::vector<double> total_loss;
  long skipped_quad_draws = 0;
  std::vector<CoherenceQuad> collected_negative_quads;
  std::vector<std::string> notes;
};

// Relative change between the last two window-sized means of the series.
// window must be at least 2; shrinks to size/2 on short series.
bool converged(std::span<const double> totals, double tol, long window);

// Round-robin SGD over the five objectives in fixed order (feature-entity,
// hinge, entity-entity, entity-type, coherence), one uniform positive plus
// negatives per step, constraint projection after every update.
TrainReport train(const EdgeSets& sets, ParamStore& store, const TrainConfig& cfg);

// Trained tables plus the label maps needed to use them.
struct Model {
  ParamStore params;
  std::vector<Feature> feature_ids;
  std::unordered_map<std::string, int> feature_index;  // feature_key -> row
  IdVocab entities;
  IdVocab types;
  FeatureConfig feature_cfg;

  std::optional<int> find_feature(const Feature& f) const;
  std::vector<double> mention_vector(const std::vector<Feature>& features) const;
};

Model make_model(ParamStore params, const FeatureVocab& vocab, IdVocab entities,
                 IdVocab types, FeatureConfig feature_cfg);

// Self-describing text container; numbers round-trip bit-exactly.
void save_checkpoint(const Model& model, const std::string& path);
Model load_checkpoint(const std::string& path);

// Writes <prefix>.features.vec, .mentions.vec, .entity-target.vec,
// .entity-context.vec, .types.vec in the embedding text format.
void export_model_embeddings(const Model& model, const std::string& prefix);

}  // namespace nel
