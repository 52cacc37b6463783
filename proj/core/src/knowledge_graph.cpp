#include "nel/knowledge_graph.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "internal/text.hpp"
#include "nel/corpus.hpp"

namespace nel {

namespace {

std::uint64_t pack_pair(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

std::uint64_t pack_directed(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

void check_weight(double w, std::string_view what) {
  if (!(w > 0.0) || !std::isfinite(w)) {
    throw std::invalid_argument(std::string(what) + " weight must be positive");
  }
}

}  // namespace

int KnowledgeGraph::add_entity(std::string_view name) {
  if (name.empty()) throw std::invalid_argument("empty entity identifier");
  auto [it, inserted] = role_.emplace(std::string(name), 'e');
  if (!inserted && it->second != 'e') {
    throw std::invalid_argument("identifier '" + std::string(name) +
                                "' used as both entity and type");
  }
  return entities_.add(name);
}

int KnowledgeGraph::add_type(std::string_view name) {
  if (name.empty()) throw std::invalid_argument("empty type identifier");
  auto [it, inserted] = role_.emplace(std::string(name), 't');
  if (!inserted && it->second != 't') {
    throw std::invalid_argument("identifier '" + std::string(name) +
                                "' used as both entity and type");
  }
  return types_.add(name);
}

void KnowledgeGraph::add_ee(std::string_view subj, std::string_view obj, double weight) {
  check_weight(weight, "entity-entity");
  int a = add_entity(subj);
  int b = add_entity(obj);
  auto key = pack_pair(a, b);
  auto it = ee_index_.find(key);
  if (it != ee_index_.end()) {
    ee_[it->second].weight += weight;
    return;
  }
  ee_index_.emplace(key, ee_.size());
  ee_.push_back({std::min(a, b), std::max(a, b), weight});
}

void KnowledgeGraph::add_et(std::string_view entity, std::string_view type, double weight) {
  check_weight(weight, "entity-type");
  int e = add_entity(entity);
  int t = add_type(type);
  auto key = pack_directed(e, t);
  auto it = et_index_.find(key);
  if (it != et_index_.end()) {
    et_[it->second].weight += weight;
    return;
  }
  et_index_.emplace(key, et_.size());
  et_.push_back({e, t, weight});
}

bool KnowledgeGraph::has_ee_edge(int a, int b) const {
  return ee_index_.count(pack_pair(a, b)) != 0;
}

bool KnowledgeGraph::has_ee_edge(std::string_view a, std::string_view b) const {
  auto ia = entities_.find(a);
  auto ib = entities_.find(b);
  if (!ia || !ib) return false;
  return has_ee_edge(*ia, *ib);
}

KnowledgeGraph load_knowledge_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open knowledge graph file: " + path);
  KnowledgeGraph kg;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = detail::split(line, '\t');
    if (fields.size() != 4) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected subj<TAB>predicate<TAB>obj<TAB>weight");
    }
    double weight = 0.0;
    if (!detail::parse_double(fields[3], weight)) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": bad weight '" +
                       std::string(fields[3]) + "'");
    }
    try {
      if (fields[1] == "is-a") {
        kg.add_et(fields[0], fields[2], weight);
      } else {
        kg.add_ee(fields[0], fields[2], weight);
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return kg;
}

void save_knowledge_graph(const KnowledgeGraph& kg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write knowledge graph file: " + path);
  char buf[64];
  for (const auto& e : kg.ee_edges()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.weight);
    out << kg.entities().name(e.a) << "\trelated\t" << kg.entities().name(e.b) << '\t'
        << buf << '\n';
  }
  for (const auto& e : kg.et_edges()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.weight);
    out << kg.entities().name(e.entity) << "\tis-a\t" << kg.types().name(e.type) << '\t'
        << buf << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace nel
