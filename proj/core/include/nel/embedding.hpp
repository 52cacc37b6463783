#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nel/features.hpp"

namespace nel {

struct EmbeddingTable {
  int rows = 0;
  int dim = 0;
  std::vector<double> data;

  void resize(int r, int d) {
    rows = r;
    dim = d;
    data.assign(static_cast<std::size_t>(r) * d, 0.0);
  }
  std::span<double> row(int i) {
    return {data.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
  }
  std::span<const double> row(int i) const {
    return {data.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
  }
};

enum class TableId { kFeatures, kMentions, kEntityTargets, kEntityContexts, kTypes };

// Context features F, mentions M, entity targets Y, entity contexts Y', types T.
struct ParamStore {
  int dim = 0;
  EmbeddingTable features;
  EmbeddingTable mentions;
  EmbeddingTable entity_targets;
  EmbeddingTable entity_contexts;
  EmbeddingTable types;
};

EmbeddingTable& table(ParamStore& store, TableId id);
const EmbeddingTable& table(const ParamStore& store, TableId id);
std::string_view table_name(TableId id);

struct TableCounts {
  int features = 0;
  int mentions = 0;
  int entities = 0;
  int types = 0;
};

struct TrainConfig {
  int dim = 300;
  double alpha = 0.02;    // learning rate
  double lambda = 1e-4;   // hinge L2 weight
  int negatives = 5;      // Q
  std::uint64_t seed = 1;
  long iterations = 100000;
  int batch = 1;
  double tol = 1e-3;      // convergence threshold on the windowed mean; 0 disables
  long window = 1000;
  bool decay = false;     // linear learning-rate decay
  int threads = 1;        // >1: unsynchronized parallel updates, nondeterministic
  long log_every = 0;     // emit a loss line every N iterations; 0 silences
  std::ostream* log = nullptr;
  int quad_retry_budget = 100;  // draw attempts per accepted negative quad
  bool collect_negative_quads = false;
  double norm_cap = 1.0;
};

// Uniform in [-0.5/dim, 0.5/dim], reproducible for a given seed.
ParamStore init_params(const TableCounts& counts, const TrainConfig& cfg);

double sigmoid(double x);
double log_sigmoid(double x);  // log(sigmoid(x)), stable for large |x|

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
void axpy(double a, std::span<const double> x, std::span<double> y);

// Scales v down to ||v|| = cap when above it; shorter vectors pass through.
void project_norm(std::span<double> v, double cap);

// Sum of the rows of known features; unknown features contribute nothing.
std::vector<double> mention_vector_from_features(const std::vector<Feature>& features,
                                                 const FeatureVocab& vocab,
                                                 const ParamStore& store);

// Text export: header "count dim", one "label v_1 .. v_dim" row per vector.
// Labels are percent-encoded so they stay single tokens.
std::string encode_label(std::string_view raw);
std::string decode_label(std::string_view encoded);
void write_embedding_text(const std::string& path, const EmbeddingTable& table,
                          const std::vector<std::string>& labels);
std::pair<std::vector<std::string>, EmbeddingTable> read_embedding_text(
    const std::string& path);

}  // namespace nel
