#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace nel {

class CandidateDictionary;

// Loader/format errors carrying file and line context.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Token {
  std::string surface;
  std::optional<std::string> pos;
  std::optional<std::string> brown_cluster;
};

struct SentenceRef {
  std::string doc_id;
  int sent_index = 0;
  bool operator==(const SentenceRef&) const = default;
};

struct Sentence {
  SentenceRef ref;
  std::vector<Token> tokens;
};

// One mention occurrence. mid is unique across a loaded corpus; surface is
// the space-joined tokens of [start, end).
struct MentionSpan {
  std::int64_t mid = 0;
  SentenceRef sentence;
  int start = 0;
  int end = 0;
  std::string surface;
};

struct TrainingTuple {
  MentionSpan span;
  std::string gold_entity;
};

struct Corpus {
  std::vector<Sentence> sentences;
  std::vector<TrainingTuple> tuples;
};

// Tab-separated sentence records:
//   doc_id <TAB> sent_index <TAB> tok|POS|cluster tok|POS|cluster ... <TAB> start,end,entity;...
// POS and cluster segments are optional; the mention column may be empty.
Corpus load_corpus(const std::string& path);
void save_corpus(const Corpus& corpus, const std::string& path);

std::string span_surface(const Sentence& sentence, int start, int end);

// Drops tuples whose gold entity is not among the dictionary candidates of
// the surface. Returns the number removed.
std::size_t drop_unlinkable(Corpus& corpus, const CandidateDictionary& dict);

// Reassigns mids 0..n-1 in tuple order.
void renumber_mids(std::vector<TrainingTuple>& tuples);

class SentenceLookup {
 public:
  explicit SentenceLookup(const std::vector<Sentence>& sentences);
  const Sentence* find(const SentenceRef& ref) const;

 private:
  std::unordered_map<std::string, const Sentence*> by_ref_;
};

std::string sentence_key(const SentenceRef& ref);

}  // namespace nel
