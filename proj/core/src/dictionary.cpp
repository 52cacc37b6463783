#include "nel/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "internal/text.hpp"
#include "nel/corpus.hpp"

namespace nel {

void CandidateDictionary::add(std::string_view surface, std::string_view entity,
                              double count) {
  if (surface.empty() || entity.empty()) {
    throw std::invalid_argument("dictionary rows need a surface and an entity");
  }
  if (!(count > 0.0) || !std::isfinite(count)) {
    throw std::invalid_argument("dictionary count must be positive for surface '" +
                                std::string(surface) + "'");
  }
  auto& list = entries_[std::string(surface)];
  for (auto& c : list) {
    if (c.entity == entity) {
      c.anchor_count += count;
      return;
    }
  }
  list.push_back({std::string(entity), count});
}

const std::vector<Candidate>* CandidateDictionary::find(std::string_view surface) const {
  auto it = entries_.find(std::string(surface));
  return it == entries_.end() ? nullptr : &it->second;
}

bool CandidateDictionary::contains(std::string_view surface) const {
  return entries_.count(std::string(surface)) != 0;
}

bool CandidateDictionary::has_pair(std::string_view surface, std::string_view entity) const {
  const auto* list = find(surface);
  if (!list) return false;
  return std::any_of(list->begin(), list->end(),
                     [&](const Candidate& c) { return c.entity == entity; });
}

std::vector<std::string> CandidateDictionary::surfaces_sorted() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [surface, list] : entries_) out.push_back(surface);
  std::sort(out.begin(), out.end());
  return out;
}

CandidateDictionary load_dictionary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dictionary file: " + path);
  CandidateDictionary dict;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = detail::split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected surface<TAB>entity<TAB>count");
    }
    double count = 0.0;
    if (!detail::parse_double(fields[2], count)) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": bad count '" +
                       std::string(fields[2]) + "'");
    }
    try {
      dict.add(fields[0], fields[1], count);
    } catch (const std::invalid_argument& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return dict;
}

void save_dictionary(const CandidateDictionary& dict, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dictionary file: " + path);
  char buf[64];
  for (const auto& surface : dict.surfaces_sorted()) {
    for (const auto& c : *dict.find(surface)) {
      std::snprintf(buf, sizeof buf, "%.17g", c.anchor_count);
      out << surface << '\t' << c.entity << '\t' << buf << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace nel
