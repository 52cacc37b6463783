#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "nel/trainer.hpp"
#include "internal/text.hpp"

namespace nel {

namespace {

constexpr const char* kMagic = "nel-checkpoint";
constexpr int kVersion = 1;

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_or_throw(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw std::runtime_error("cannot open '" + path + "': " + std::strerror(errno));
  }
  return f;
}

void write_labels(std::FILE* f, const char* tag, const std::vector<std::string>& labels) {
  std::fprintf(f, "%s %zu\n", tag, labels.size());
  for (const auto& l : labels) std::fprintf(f, "%s\n", encode_label(l).c_str());
}

void write_table(std::FILE* f, TableId id, const EmbeddingTable& t) {
  std::fprintf(f, "table %s %d %d\n", std::string(table_name(id)).c_str(), t.rows, t.dim);
  for (int r = 0; r < t.rows; ++r) {
    auto row = t.row(r);
    for (int c = 0; c < t.dim; ++c) std::fprintf(f, c ? " %.17g" : "%.17g", row[c]);
    std::fputc('\n', f);
  }
}

struct Reader {
  std::FILE* f;
  std::string path;
  std::string line;

  bool next() {
    line.clear();
    int ch;
    bool any = false;
    while ((ch = std::fgetc(f)) != EOF) {
      any = true;
      if (ch == '\n') break;
      line.push_back(static_cast<char>(ch));
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return any;
  }

  const std::string& need() {
    if (!next()) throw std::runtime_error("truncated checkpoint: " + path);
    return line;
  }

  // "tag n" where tag is fixed; returns n.
  long counted(const std::string& tag) {
    auto fields = detail::split(need(), ' ');
    if (fields.size() != 2 || fields[0] != tag) {
      throw std::runtime_error("malformed checkpoint near '" + line + "': " + path);
    }
    long n = detail::require_long(fields[1], "count in " + path);
    if (n < 0) throw std::runtime_error("negative count in " + path);
    return n;
  }

  std::vector<std::string> labels(const std::string& tag) {
    long n = counted(tag);
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) out.push_back(decode_label(need()));
    return out;
  }

  void table_into(TableId id, int dim, int expected_rows, EmbeddingTable& t) {
    auto fields = detail::split(need(), ' ');
    if (fields.size() != 4 || fields[0] != "table" || fields[1] != table_name(id)) {
      throw std::runtime_error("malformed table header '" + line + "': " + path);
    }
    int rows = detail::require_int(fields[2], "table rows in " + path);
    int d = detail::require_int(fields[3], "table dim in " + path);
    if (d != dim) {
      throw std::runtime_error("dimension mismatch in " + path + ": table " +
                               std::string(table_name(id)) + " has dim " +
                               std::to_string(d) + ", header says " + std::to_string(dim));
    }
    if (rows != expected_rows) {
      throw std::runtime_error("row count mismatch in " + path + ": table " +
                               std::string(table_name(id)) + " has " +
                               std::to_string(rows) + " rows, labels say " +
                               std::to_string(expected_rows));
    }
    t.resize(rows, dim);
    for (int r = 0; r < rows; ++r) {
      const std::string& row_line = need();
      const char* p = row_line.c_str();
      auto row = t.row(r);
      for (int c = 0; c < dim; ++c) {
        char* end = nullptr;
        errno = 0;
        double v = std::strtod(p, &end);
        if (end == p || errno == ERANGE) {
          throw std::runtime_error("bad number in table " + std::string(table_name(id)) +
                                   " of " + path);
        }
        row[c] = v;
        p = end;
      }
      while (*p == ' ') ++p;
      if (*p != '\0') {
        throw std::runtime_error("excess values in table " + std::string(table_name(id)) +
                                 " of " + path);
      }
    }
  }
};

}  // namespace

void save_checkpoint(const Model& model, const std::string& path) {
  auto f = open_or_throw(path, "wb");
  std::fprintf(f.get(), "%s %d\n", kMagic, kVersion);
  std::fprintf(f.get(), "dim %d\n", model.params.dim);
  std::fprintf(f.get(), "window %d\n", model.feature_cfg.window);
  std::fprintf(f.get(), "charseq_k %d\n", model.feature_cfg.charseq_k);
  std::fprintf(f.get(), "brown_bits %d\n", model.feature_cfg.brown_bits);
  std::vector<std::string> stopwords(model.feature_cfg.stopwords.begin(),
                                     model.feature_cfg.stopwords.end());
  std::sort(stopwords.begin(), stopwords.end());
  write_labels(f.get(), "stopwords", stopwords);
  std::vector<std::string> feature_labels;
  feature_labels.reserve(model.feature_ids.size());
  for (const auto& feat : model.feature_ids) feature_labels.push_back(feature_key(feat));
  write_labels(f.get(), "features", feature_labels);
  write_labels(f.get(), "entities", model.entities.names());
  write_labels(f.get(), "types", model.types.names());
  std::fprintf(f.get(), "mentions %d\n", model.params.mentions.rows);
  write_table(f.get(), TableId::kFeatures, model.params.features);
  write_table(f.get(), TableId::kMentions, model.params.mentions);
  write_table(f.get(), TableId::kEntityTargets, model.params.entity_targets);
  write_table(f.get(), TableId::kEntityContexts, model.params.entity_contexts);
  write_table(f.get(), TableId::kTypes, model.params.types);
  std::fprintf(f.get(), "end\n");
  if (std::ferror(f.get())) throw std::runtime_error("write failed: " + path);
}

Model load_checkpoint(const std::string& path) {
  auto f = open_or_throw(path, "rb");
  Reader r{f.get(), path, {}};

  auto head = detail::split(r.need(), ' ');
  if (head.size() != 2 || head[0] != kMagic) {
    throw std::runtime_error("not a checkpoint file: " + path);
  }
  if (detail::require_int(head[1], "checkpoint version") != kVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::string(head[1]) +
                             ": " + path);
  }

  int dim = static_cast<int>(r.counted("dim"));
  if (dim < 1) throw std::runtime_error("bad dimension in " + path);

  Model model;
  model.feature_cfg.window = static_cast<int>(r.counted("window"));
  model.feature_cfg.charseq_k = static_cast<int>(r.counted("charseq_k"));
  model.feature_cfg.brown_bits = static_cast<int>(r.counted("brown_bits"));
  model.feature_cfg.stopwords.clear();
  for (const auto& w : r.labels("stopwords")) model.feature_cfg.stopwords.insert(w);

  auto feature_labels = r.labels("features");
  model.feature_ids.reserve(feature_labels.size());
  for (std::size_t i = 0; i < feature_labels.size(); ++i) {
    model.feature_ids.push_back(feature_from_key(feature_labels[i]));
    model.feature_index.emplace(feature_labels[i], static_cast<int>(i));
  }
  for (const auto& name : r.labels("entities")) model.entities.add(name);
  for (const auto& name : r.labels("types")) model.types.add(name);
  int mention_rows = static_cast<int>(r.counted("mentions"));

  model.params.dim = dim;
  r.table_into(TableId::kFeatures, dim, static_cast<int>(model.feature_ids.size()),
               model.params.features);
  r.table_into(TableId::kMentions, dim, mention_rows, model.params.mentions);
  r.table_into(TableId::kEntityTargets, dim, model.entities.size(),
               model.params.entity_targets);
  r.table_into(TableId::kEntityContexts, dim, model.entities.size(),
               model.params.entity_contexts);
  r.table_into(TableId::kTypes, dim, model.types.size(), model.params.types);
  if (r.need() != "end") throw std::runtime_error("missing end marker: " + path);
  return model;
}

}  // namespace nel
