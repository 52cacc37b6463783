#include "nel/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "internal/record.hpp"
#include "internal/text.hpp"
#include "nel/dictionary.hpp"

namespace nel {

namespace {

[[noreturn]] void fail(const std::string& path, long line_no, const std::string& what) {
  throw ParseError(path + ":" + std::to_string(line_no) + ": " + what);
}

Token parse_token_field(std::string_view field, const std::string& path, long line_no) {
  auto parts = detail::split(field, '|');
  if (parts.size() > 3) fail(path, line_no, "token field has more than three segments");
  if (parts[0].empty()) fail(path, line_no, "empty token surface");
  Token tok;
  tok.surface = std::string(parts[0]);
  if (parts.size() > 1 && !parts[1].empty()) tok.pos = std::string(parts[1]);
  if (parts.size() > 2 && !parts[2].empty()) tok.brown_cluster = std::string(parts[2]);
  return tok;
}

std::string format_token(const Token& tok) {
  std::string out = tok.surface;
  if (tok.pos || tok.brown_cluster) {
    out += '|';
    if (tok.pos) out += *tok.pos;
  }
  if (tok.brown_cluster) {
    out += '|';
    out += *tok.brown_cluster;
  }
  return out;
}

}  // namespace

namespace detail {

ParsedRecord parse_sentence_record(std::string_view line, const std::string& path,
                                   long line_no, std::int64_t& next_mid) {
  auto fields = detail::split(line, '\t');
  if (fields.size() < 3 || fields.size() > 4) {
    fail(path, line_no, "expected 3 or 4 tab-separated fields, got " +
                            std::to_string(fields.size()));
  }
  ParsedRecord rec;
  if (fields[0].empty()) fail(path, line_no, "empty doc id");
  rec.sentence.ref.doc_id = std::string(fields[0]);
  int sent_index = 0;
  if (!detail::parse_int(fields[1], sent_index) || sent_index < 0) {
    fail(path, line_no, "bad sentence index '" + std::string(fields[1]) + "'");
  }
  rec.sentence.ref.sent_index = sent_index;

  for (auto tok_field : detail::split(fields[2], ' ')) {
    if (tok_field.empty()) fail(path, line_no, "empty token (double space?)");
    rec.sentence.tokens.push_back(parse_token_field(tok_field, path, line_no));
  }
  if (rec.sentence.tokens.empty()) fail(path, line_no, "sentence has no tokens");

  if (fields.size() == 4 && !fields[3].empty()) {
    for (auto mrec : detail::split(fields[3], ';')) {
      if (mrec.empty()) continue;  // tolerate a trailing semicolon
      auto c1 = mrec.find(',');
      auto c2 = c1 == std::string_view::npos ? c1 : mrec.find(',', c1 + 1);
      if (c2 == std::string_view::npos) {
        fail(path, line_no, "mention record needs start,end,entity");
      }
      int start = 0;
      int end = 0;
      if (!detail::parse_int(mrec.substr(0, c1), start) ||
          !detail::parse_int(mrec.substr(c1 + 1, c2 - c1 - 1), end)) {
        fail(path, line_no, "bad mention span numbers");
      }
      std::string entity(mrec.substr(c2 + 1));
      if (entity.empty()) fail(path, line_no, "empty gold entity");
      const int n = static_cast<int>(rec.sentence.tokens.size());
      if (start < 0 || end <= start || end > n) {
        fail(path, line_no,
             "mention span [" + std::to_string(start) + "," + std::to_string(end) +
                 ") out of range in doc " + rec.sentence.ref.doc_id + " sentence " +
                 std::to_string(rec.sentence.ref.sent_index));
      }
      TrainingTuple tup;
      tup.span.mid = next_mid++;
      tup.span.sentence = rec.sentence.ref;
      tup.span.start = start;
      tup.span.end = end;
      tup.span.surface = span_surface(rec.sentence, start, end);
      tup.gold_entity = std::move(entity);
      rec.tuples.push_back(std::move(tup));
    }
  }
  return rec;
}

std::string format_sentence_record(const Sentence& sentence,
                                   const std::vector<const TrainingTuple*>& mentions) {
  std::string out = sentence.ref.doc_id;
  out += '\t';
  out += std::to_string(sentence.ref.sent_index);
  out += '\t';
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    if (i) out += ' ';
    out += format_token(sentence.tokens[i]);
  }
  out += '\t';
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    if (i) out += ';';
    const auto& span = mentions[i]->span;
    out += std::to_string(span.start);
    out += ',';
    out += std::to_string(span.end);
    out += ',';
    out += mentions[i]->gold_entity;
  }
  return out;
}

}  // namespace detail

std::string span_surface(const Sentence& sentence, int start, int end) {
  std::string out;
  for (int i = start; i < end; ++i) {
    if (i > start) out += ' ';
    out += sentence.tokens[static_cast<std::size_t>(i)].surface;
  }
  return out;
}

std::string sentence_key(const SentenceRef& ref) {
  return ref.doc_id + '\x1f' + std::to_string(ref.sent_index);
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open corpus file: " + path);
  Corpus corpus;
  std::unordered_set<std::string> seen;
  std::string line;
  long line_no = 0;
  std::int64_t next_mid = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto rec = detail::parse_sentence_record(line, path, line_no, next_mid);
    if (!seen.insert(sentence_key(rec.sentence.ref)).second) {
      fail(path, line_no,
           "duplicate sentence index " + std::to_string(rec.sentence.ref.sent_index) +
               " in doc " + rec.sentence.ref.doc_id);
    }
    corpus.sentences.push_back(std::move(rec.sentence));
    for (auto& t : rec.tuples) corpus.tuples.push_back(std::move(t));
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::unordered_map<std::string, std::vector<const TrainingTuple*>> by_sentence;
  for (const auto& t : corpus.tuples) {
    by_sentence[sentence_key(t.span.sentence)].push_back(&t);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write corpus file: " + path);
  for (const auto& sent : corpus.sentences) {
    auto it = by_sentence.find(sentence_key(sent.ref));
    static const std::vector<const TrainingTuple*> kNone;
    const auto& mentions = it == by_sentence.end() ? kNone : it->second;
    out << detail::format_sentence_record(sent, mentions) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::size_t drop_unlinkable(Corpus& corpus, const CandidateDictionary& dict) {
  auto& tuples = corpus.tuples;
  std::size_t before = tuples.size();
  std::erase_if(tuples, [&](const TrainingTuple& t) {
    return !dict.has_pair(t.span.surface, t.gold_entity);
  });
  return before - tuples.size();
}

void renumber_mids(std::vector<TrainingTuple>& tuples) {
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    tuples[i].span.mid = static_cast<std::int64_t>(i);
  }
}

SentenceLookup::SentenceLookup(const std::vector<Sentence>& sentences) {
  for (const auto& s : sentences) by_ref_.emplace(sentence_key(s.ref), &s);
}

const Sentence* SentenceLookup::find(const SentenceRef& ref) const {
  auto it = by_ref_.find(sentence_key(ref));
  return it == by_ref_.end() ? nullptr : it->second;
}

}  // namespace nel
