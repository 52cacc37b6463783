#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nel/ids.hpp"

namespace nel {

struct EeEdge {
  int a = 0;  // entity indices, a < b canonical for undirected storage
  int b = 0;
  double weight = 0.0;
};

struct EtEdge {
  int entity = 0;
  int type = 0;
  double weight = 0.0;
};

// Undirected entity-entity edges plus entity->type membership edges.
// Entity and type identifier sets are disjoint; duplicate triples sum.
class KnowledgeGraph {
 public:
  int add_entity(std::string_view name);
  int add_type(std::string_view name);
  void add_ee(std::string_view subj, std::string_view obj, double weight);
  void add_et(std::string_view entity, std::string_view type, double weight);

  bool has_ee_edge(std::string_view a, std::string_view b) const;
  bool has_ee_edge(int a, int b) const;

  const IdVocab& entities() const { return entities_; }
  const IdVocab& types() const { return types_; }
  const std::vector<EeEdge>& ee_edges() const { return ee_; }
  const std::vector<EtEdge>& et_edges() const { return et_; }

 private:
  IdVocab entities_;
  IdVocab types_;
  std::vector<EeEdge> ee_;
  std::vector<EtEdge> et_;
  std::unordered_map<std::uint64_t, std::size_t> ee_index_;
  std::unordered_map<std::uint64_t, std::size_t> et_index_;
  std::unordered_map<std::string, char> role_;  // 'e' or 't', guards disjointness
};

// Tab-separated triples: subj <TAB> predicate <TAB> obj <TAB> weight.
// Predicate "is-a" feeds entity->type edges, anything else entity-entity.
KnowledgeGraph load_knowledge_graph(const std::string& path);
void save_knowledge_graph(const KnowledgeGraph& kg, const std::string& path);

}  // namespace nel
