#include "nel/features.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <stdexcept>

#include "internal/text.hpp"

namespace nel {

namespace {

constexpr std::array<std::string_view, 10> kKindTags = {
    "HEAD",  "TOKEN",  "UNIGRAM", "BIGRAM",  "POS",
    "SHAPE", "LENGTH", "CHARSEQ", "BROWN",   "VERB",
};

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool pos_starts_with(const Token& tok, char upper) {
  if (!tok.pos || tok.pos->empty()) return false;
  char c = (*tok.pos)[0];
  return c == upper || c == static_cast<char>(std::tolower(static_cast<unsigned char>(upper)));
}

}  // namespace

std::string_view feature_kind_tag(FeatureKind kind) {
  return kKindTags[static_cast<std::size_t>(kind)];
}

std::optional<FeatureKind> feature_kind_from_tag(std::string_view tag) {
  for (std::size_t i = 0; i < kKindTags.size(); ++i) {
    if (kKindTags[i] == tag) return static_cast<FeatureKind>(i);
  }
  return std::nullopt;
}

std::string feature_key(const Feature& f) {
  std::string out(feature_kind_tag(f.kind));
  out += ':';
  out += f.value;
  return out;
}

Feature feature_from_key(std::string_view key) {
  auto colon = key.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("feature key needs KIND:value, got '" + std::string(key) +
                                "'");
  }
  auto kind = feature_kind_from_tag(key.substr(0, colon));
  if (!kind) {
    throw std::invalid_argument("unknown feature kind in key '" + std::string(key) + "'");
  }
  return {*kind, std::string(key.substr(colon + 1))};
}

const std::unordered_set<std::string>& default_stopwords() {
  static const std::unordered_set<std::string> kWords = {
      "a",    "an",   "the",  "this", "that", "these", "those", "it",   "its",
      "is",   "are",  "was",  "were", "be",   "been",  "being", "am",   "of",
      "in",   "on",   "at",   "to",   "for",  "with",  "by",    "from", "as",
      "and",  "or",   "but",  "not",  "no",   "so",    "if",    "than", "then",
      "'s",   ".",    ",",    ";",    ":",    "!",     "?",     "'",    "\"",
      "(",    ")",    "-",    "--",
  };
  return kWords;
}

bool is_stopword(const FeatureConfig& cfg, std::string_view token) {
  return cfg.stopwords.count(lower_ascii(token)) != 0;
}

FeatureConfig load_feature_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open feature config: " + path);
  FeatureConfig cfg;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto eq = trimmed.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    auto key = detail::trim(trimmed.substr(0, eq));
    auto value = detail::trim(trimmed.substr(eq + 1));
    auto bad = [&](const std::string& what) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + what);
    };
    if (key == "window") {
      if (!detail::parse_int(value, cfg.window) || cfg.window < 0) bad("bad window");
    } else if (key == "charseq_k") {
      if (!detail::parse_int(value, cfg.charseq_k) || cfg.charseq_k < 1) bad("bad charseq_k");
    } else if (key == "brown_bits") {
      if (!detail::parse_int(value, cfg.brown_bits) || cfg.brown_bits < 1) bad("bad brown_bits");
    } else if (key == "stopwords") {
      std::ifstream words(std::string{value});
      if (!words) bad("cannot open stopword list '" + std::string(value) + "'");
      cfg.stopwords.clear();
      std::string w;
      while (std::getline(words, w)) {
        auto t = detail::trim(w);
        if (!t.empty()) cfg.stopwords.insert(lower_ascii(t));
      }
    } else {
      bad("unknown key '" + std::string(key) + "'");
    }
  }
  return cfg;
}

std::string word_shape(std::string_view token) {
  std::string out;
  std::size_t i = 0;
  while (i < token.size()) {
    unsigned char c = static_cast<unsigned char>(token[i]);
    char symbol;
    auto same_class = [&](unsigned char d) {
      if (std::isupper(c)) return std::isupper(d) != 0;
      if (std::islower(c)) return std::islower(d) != 0;
      if (std::isdigit(c)) return std::isdigit(d) != 0;
      return !std::isupper(d) && !std::islower(d) && !std::isdigit(d);
    };
    if (std::isupper(c)) {
      symbol = 'A';
    } else if (std::islower(c)) {
      symbol = 'a';
    } else if (std::isdigit(c)) {
      symbol = '0';
    } else {
      symbol = '-';
    }
    std::size_t run = 1;
    while (i + run < token.size() && same_class(static_cast<unsigned char>(token[i + run]))) {
      ++run;
    }
    // Uppercase runs keep up to two symbols so capitalized words ("Aa") stay
    // distinct from all-caps ("AA"); other runs carry no length signal.
    out += symbol;
    if (symbol == 'A' && run >= 2) out += symbol;
    i += run;
  }
  return out;
}

std::vector<std::string> char_sequences(std::string_view surface, int k) {
  if (k < 1) throw std::invalid_argument("character sequence length must be at least 1");
  std::vector<std::string> out;
  if (surface.size() < static_cast<std::size_t>(k)) {
    out.emplace_back(surface);
    return out;
  }
  for (std::size_t i = 0; i + k <= surface.size(); ++i) {
    out.emplace_back(surface.substr(i, static_cast<std::size_t>(k)));
  }
  return out;
}

std::optional<int> nearest_verb(const Sentence& sentence, int start, int end) {
  const int n = static_cast<int>(sentence.tokens.size());
  std::optional<int> best;
  int best_dist = 0;
  for (int i = 0; i < n; ++i) {
    if (i >= start && i < end) continue;
    if (!pos_starts_with(sentence.tokens[static_cast<std::size_t>(i)], 'V')) continue;
    int dist = i < start ? start - i : i - end + 1;
    if (!best || dist < best_dist) {  // earlier index wins ties, i.e. the left side
      best = i;
      best_dist = dist;
    }
  }
  return best;
}

std::vector<Feature> extract_features(const Sentence& sentence, const MentionSpan& span,
                                      const FeatureConfig& cfg) {
  const int n = static_cast<int>(sentence.tokens.size());
  if (span.start < 0 || span.end <= span.start || span.end > n) {
    throw std::invalid_argument("mention span out of range");
  }
  std::vector<Feature> out;
  std::unordered_set<std::string> seen;
  auto emit = [&](FeatureKind kind, std::string value) {
    Feature f{kind, std::move(value)};
    if (seen.insert(feature_key(f)).second) out.push_back(std::move(f));
  };
  auto tok = [&](int i) -> const Token& {
    return sentence.tokens[static_cast<std::size_t>(i)];
  };

  // Head word: rightmost noun of the span, falling back to the last token.
  int head = span.end - 1;
  for (int i = span.end - 1; i >= span.start; --i) {
    if (pos_starts_with(tok(i), 'N')) {
      head = i;
      break;
    }
  }
  emit(FeatureKind::kHead, tok(head).surface);

  for (int i = span.start; i < span.end; ++i) {
    if (!is_stopword(cfg, tok(i).surface)) emit(FeatureKind::kToken, tok(i).surface);
  }

  // Context window: up to `window` non-stopword tokens on each side.
  std::vector<std::string> left;
  for (int i = span.start - 1; i >= 0 && static_cast<int>(left.size()) < cfg.window; --i) {
    if (!is_stopword(cfg, tok(i).surface)) left.push_back(tok(i).surface);
  }
  std::reverse(left.begin(), left.end());
  std::vector<std::string> right;
  for (int i = span.end; i < n && static_cast<int>(right.size()) < cfg.window; ++i) {
    if (!is_stopword(cfg, tok(i).surface)) right.push_back(tok(i).surface);
  }
  for (const auto& w : left) emit(FeatureKind::kUnigram, w);
  for (const auto& w : right) emit(FeatureKind::kUnigram, w);

  // Bigrams over the window with the mention as one unit, so they cross the
  // mention boundary.
  std::vector<std::string> seq = left;
  seq.push_back(span.surface);
  seq.insert(seq.end(), right.begin(), right.end());
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    emit(FeatureKind::kBigram, seq[i] + " " + seq[i + 1]);
  }

  std::string pos_joined;
  for (int i = span.start; i < span.end; ++i) {
    if (!tok(i).pos) continue;
    if (!pos_joined.empty()) pos_joined += ' ';
    pos_joined += *tok(i).pos;
  }
  if (!pos_joined.empty()) emit(FeatureKind::kPos, std::move(pos_joined));

  std::string shape_joined;
  for (int i = span.start; i < span.end; ++i) {
    if (!shape_joined.empty()) shape_joined += ' ';
    shape_joined += word_shape(tok(i).surface);
  }
  emit(FeatureKind::kShape, std::move(shape_joined));

  emit(FeatureKind::kLength, std::to_string(span.end - span.start));

  for (auto& s : char_sequences(span.surface, cfg.charseq_k)) {
    emit(FeatureKind::kCharSeq, std::move(s));
  }

  for (int i = span.start; i < span.end; ++i) {
    if (!tok(i).brown_cluster) continue;
    const auto& bits = *tok(i).brown_cluster;
    auto prefix = bits.substr(0, std::min<std::size_t>(bits.size(),
                                                       static_cast<std::size_t>(cfg.brown_bits)));
    emit(FeatureKind::kBrown, std::to_string(cfg.brown_bits) + "_" + prefix);
  }

  if (auto v = nearest_verb(sentence, span.start, span.end)) {
    emit(FeatureKind::kVerb, tok(*v).surface);
  }
  return out;
}

int FeatureVocab::add(const Feature& f) {
  auto key = feature_key(f);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  int id = static_cast<int>(features_.size());
  features_.push_back(f);
  index_.emplace(std::move(key), id);
  return id;
}

std::optional<int> FeatureVocab::find(const Feature& f) const {
  auto it = index_.find(feature_key(f));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const Feature& FeatureVocab::feature(int id) const {
  return features_.at(static_cast<std::size_t>(id));
}

void FeatureVocab::count_pair(int feature_id, const std::string& entity, double w) {
  if (feature_id < 0 || feature_id >= size()) {
    throw std::out_of_range("feature id out of range");
  }
  if (!(w > 0.0)) throw std::invalid_argument("co-occurrence weight must be positive");
  pair_counts_[{feature_id, entity}] += w;
  entity_totals_[entity] += w;
}

double FeatureVocab::pair_count(int feature_id, const std::string& entity) const {
  auto it = pair_counts_.find({feature_id, entity});
  return it == pair_counts_.end() ? 0.0 : it->second;
}

double FeatureVocab::entity_total(const std::string& entity) const {
  auto it = entity_totals_.find(entity);
  return it == entity_totals_.end() ? 0.0 : it->second;
}

FeatureVocab build_feature_vocab(const Corpus& corpus, const FeatureConfig& cfg,
                                 const std::vector<double>& tuple_weights) {
  if (!tuple_weights.empty() && tuple_weights.size() != corpus.tuples.size()) {
    throw std::invalid_argument("tuple_weights must match the tuple count");
  }
  FeatureVocab vocab;
  SentenceLookup lookup(corpus.sentences);
  for (std::size_t i = 0; i < corpus.tuples.size(); ++i) {
    const auto& tup = corpus.tuples[i];
    const Sentence* sent = lookup.find(tup.span.sentence);
    if (!sent) {
      throw std::invalid_argument("tuple references missing sentence " +
                                  sentence_key(tup.span.sentence));
    }
    double w = tuple_weights.empty() ? 1.0 : tuple_weights[i];
    for (const auto& f : extract_features(*sent, tup.span, cfg)) {
      vocab.count_pair(vocab.add(f), tup.gold_entity, w);
    }
  }
  return vocab;
}

}  // namespace nel
