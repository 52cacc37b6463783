#include "nel/embedding.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include "internal/text.hpp"

namespace nel {

EmbeddingTable& table(ParamStore& store, TableId id) {
  switch (id) {
    case TableId::kFeatures: return store.features;
    case TableId::kMentions: return store.mentions;
    case TableId::kEntityTargets: return store.entity_targets;
    case TableId::kEntityContexts: return store.entity_contexts;
    case TableId::kTypes: return store.types;
  }
  throw std::logic_error("bad table id");
}

const EmbeddingTable& table(const ParamStore& store, TableId id) {
  return table(const_cast<ParamStore&>(store), id);
}

std::string_view table_name(TableId id) {
  switch (id) {
    case TableId::kFeatures: return "features";
    case TableId::kMentions: return "mentions";
    case TableId::kEntityTargets: return "entity_targets";
    case TableId::kEntityContexts: return "entity_contexts";
    case TableId::kTypes: return "types";
  }
  return "?";
}

namespace {

// 53-bit mantissa draw; bit-reproducible for a given engine state.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void fill_uniform(EmbeddingTable& t, double half_range, std::mt19937_64& rng) {
  for (auto& v : t.data) v = (uniform01(rng) - 0.5) * 2.0 * half_range;
}

}  // namespace

ParamStore init_params(const TableCounts& counts, const TrainConfig& cfg) {
  if (cfg.dim < 1) throw std::invalid_argument("embedding dimension must be at least 1");
  if (counts.features < 0 || counts.mentions < 0 || counts.entities < 0 ||
      counts.types < 0) {
    throw std::invalid_argument("table counts must be non-negative");
  }
  ParamStore store;
  store.dim = cfg.dim;
  store.features.resize(counts.features, cfg.dim);
  store.mentions.resize(counts.mentions, cfg.dim);
  store.entity_targets.resize(counts.entities, cfg.dim);
  store.entity_contexts.resize(counts.entities, cfg.dim);
  store.types.resize(counts.types, cfg.dim);
  std::mt19937_64 rng(cfg.seed);
  const double half = 0.5 / cfg.dim;
  fill_uniform(store.features, half, rng);
  fill_uniform(store.mentions, half, rng);
  fill_uniform(store.entity_targets, half, rng);
  fill_uniform(store.entity_contexts, half, rng);
  fill_uniform(store.types, half, rng);
  return store;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void project_norm(std::span<double> v, double cap) {
  if (!(cap > 0.0)) throw std::invalid_argument("norm cap must be positive");
  double n = norm2(v);
  if (n <= cap) return;
  double scale = cap / n;
  for (auto& x : v) x *= scale;
}

std::vector<double> mention_vector_from_features(const std::vector<Feature>& features,
                                                 const FeatureVocab& vocab,
                                                 const ParamStore& store) {
  std::vector<double> out(static_cast<std::size_t>(store.dim), 0.0);
  for (const auto& f : features) {
    if (auto id = vocab.find(f)) {
      axpy(1.0, store.features.row(*id), out);
    }
  }
  return out;
}

std::string encode_label(std::string_view raw) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(raw.size());
  for (unsigned char c : raw) {
    if (c == ' ' || c == '%' || c == '\t' || c == '\n' || c == '\r') {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 0xF];
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

std::string decode_label(std::string_view encoded) {
  auto unhex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  std::string out;
  out.reserve(encoded.size());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (encoded[i] == '%') {
      if (i + 2 >= encoded.size()) throw std::invalid_argument("truncated label escape");
      int hi = unhex(encoded[i + 1]);
      int lo = unhex(encoded[i + 2]);
      if (hi < 0 || lo < 0) throw std::invalid_argument("bad label escape");
      out += static_cast<char>((hi << 4) | lo);
      i += 2;
    } else {
      out += encoded[i];
    }
  }
  return out;
}

void write_embedding_text(const std::string& path, const EmbeddingTable& tbl,
                          const std::vector<std::string>& labels) {
  if (static_cast<int>(labels.size()) != tbl.rows) {
    throw std::invalid_argument("label count does not match table rows");
  }
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write embedding file: " + path);
  std::fprintf(f, "%d %d\n", tbl.rows, tbl.dim);
  for (int r = 0; r < tbl.rows; ++r) {
    std::fputs(encode_label(labels[static_cast<std::size_t>(r)]).c_str(), f);
    auto row = tbl.row(r);
    for (double v : row) std::fprintf(f, " %.17g", v);
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0) throw std::runtime_error("write failed: " + path);
}

std::pair<std::vector<std::string>, EmbeddingTable> read_embedding_text(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty embedding file");
  auto header = detail::split(detail::trim(line), ' ');
  int rows = 0;
  int dim = 0;
  if (header.size() != 2 || !detail::parse_int(header[0], rows) ||
      !detail::parse_int(header[1], dim) || rows < 0 || dim < 1) {
    throw std::runtime_error(path + ": bad embedding header");
  }
  EmbeddingTable tbl;
  tbl.resize(rows, dim);
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw std::runtime_error(path + ": truncated embedding file");
    auto fields = detail::split(detail::trim(line), ' ');
    if (static_cast<int>(fields.size()) != dim + 1) {
      throw std::runtime_error(path + ": row " + std::to_string(r) + " has " +
                               std::to_string(fields.size() - 1) + " values, expected " +
                               std::to_string(dim));
    }
    labels.push_back(decode_label(fields[0]));
    auto row = tbl.row(r);
    for (int d = 0; d < dim; ++d) {
      double v = 0.0;
      if (!detail::parse_double(fields[static_cast<std::size_t>(d) + 1], v)) {
        throw std::runtime_error(path + ": bad value in row " + std::to_string(r));
      }
      row[static_cast<std::size_t>(d)] = v;
    }
  }
  return {std::move(labels), std::move(tbl)};
}

}  // namespace nel
