#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nel {

struct Candidate {
  std::string entity;
  double anchor_count = 0.0;
};

// surface -> candidate entities with anchor counts. Duplicate rows sum.
class CandidateDictionary {
 public:
  void add(std::string_view surface, std::string_view entity, double count);
  const std::vector<Candidate>* find(std::string_view surface) const;
  bool contains(std::string_view surface) const;
  bool has_pair(std::string_view surface, std::string_view entity) const;
  std::size_t surface_count() const { return entries_.size(); }
  std::vector<std::string> surfaces_sorted() const;

 private:
  std::unordered_map<std::string, std::vector<Candidate>> entries_;
};

// Tab-separated rows: surface <TAB> entity <TAB> count (count > 0).
CandidateDictionary load_dictionary(const std::string& path);
void save_dictionary(const CandidateDictionary& dict, const std::string& path);

}  // namespace nel
