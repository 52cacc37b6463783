#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nel/corpus.hpp"

namespace nel::detail {

struct ParsedRecord {
  Sentence sentence;
  std::vector<TrainingTuple> tuples;
};

// Parses one corpus-format sentence record; mids are minted from next_mid.
ParsedRecord parse_sentence_record(std::string_view line, const std::string& path,
                                   long line_no, std::int64_t& next_mid);

// Inverse of parse_sentence_record; mentions must belong to the sentence.
std::string format_sentence_record(const Sentence& sentence,
                                   const std::vector<const TrainingTuple*>& mentions);

}  // namespace nel::detail
