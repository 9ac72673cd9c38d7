#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "drift/errors.hpp"
#include "drift/unicode.hpp"

namespace drift {

/// One raw input document: the text of a single field (discipline).
struct RawDocument {
  std::string field_label;
  std::string text;  // UTF-8
};

/// A preprocessed field corpus: tokenized sentences plus word counts.
struct Corpus {
  std::string field_label;
  std::vector<std::vector<std::string>> sentences;
  std::map<std::string, std::uint64_t> word_counts;

  std::uint64_t token_count() const {
    std::uint64_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
  }
};

/// Splits a document into sentences on . ! ? and newlines, strips Unicode
/// punctuation, lowercases, and tokenizes on whitespace. Empty sentences
/// are dropped.
inline Corpus preprocess(const RawDocument& doc) {
  if (doc.field_label.empty()) throw ConfigError("empty field label");
  const std::u32string cps = uni::decode_utf8(doc.text);

  Corpus out;
  out.field_label = doc.field_label;

  std::vector<std::string> sentence;
  std::string token;
  auto flush_token = [&] {
    if (!token.empty()) {
      sentence.push_back(std::move(token));
      token.clear();
    }
  };
  auto flush_sentence = [&] {
    flush_token();
    if (!sentence.empty()) {
      for (const auto& t : sentence) ++out.word_counts[t];
      out.sentences.push_back(std::move(sentence));
      sentence.clear();
    }
  };

  for (char32_t cp : cps) {
    if (cp == U'.' || cp == U'!' || cp == U'?' || cp == U'\n') {
      flush_sentence();
    } else if (uni::is_space(cp)) {
      flush_token();
    } else if (!uni::is_punctuation(cp)) {
      uni::append_utf8(token, uni::to_lower(cp));
    }
  }
  flush_sentence();
  return out;
}

/// The common vocabulary: words present in every field with count at least
/// min_count. Words iterate in lexicographic (byte) order.
class Vocabulary {
 public:
  Vocabulary() = default;

  Vocabulary(std::vector<std::string> field_labels,
             std::vector<std::string> words_sorted,
             std::vector<std::vector<std::uint64_t>> counts_per_field,
             std::uint64_t min_count)
      : field_labels_(std::move(field_labels)),
        words_(std::move(words_sorted)),
        counts_(std::move(counts_per_field)),
        min_count_(min_count) {
    if (min_count_ < 1) throw ConfigError("min_count must be positive");
    if (!std::is_sorted(words_.begin(), words_.end())) {
      throw ConfigError("vocabulary words must be sorted");
    }
    if (counts_.size() != field_labels_.size()) {
      throw ConfigError("counts/fields size mismatch");
    }
    for (const auto& col : counts_) {
      if (col.size() != words_.size()) {
        throw ConfigError("counts/words size mismatch");
      }
      for (std::uint64_t c : col) {
        if (c < min_count_) {
          throw ConfigError("vocabulary count below min_count");
        }
      }
    }
  }

  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  const std::string& word(std::uint32_t idx) const { return words_[idx]; }
  const std::vector<std::string>& field_labels() const {
    return field_labels_;
  }
  std::uint64_t min_count() const { return min_count_; }

  std::optional<std::uint32_t> index_of(std::string_view w) const {
    auto it = std::lower_bound(words_.begin(), words_.end(), w);
    if (it == words_.end() || *it != w) return std::nullopt;
    return static_cast<std::uint32_t>(it - words_.begin());
  }

  bool contains(std::string_view w) const { return index_of(w).has_value(); }

  std::uint64_t count(std::uint32_t word_idx, std::size_t field_idx) const {
    return counts_.at(field_idx).at(word_idx);
  }

  std::optional<std::size_t> field_index(std::string_view label) const {
    for (std::size_t i = 0; i < field_labels_.size(); ++i) {
      if (field_labels_[i] == label) return i;
    }
    return std::nullopt;
  }

 private:
  std::vector<std::string> field_labels_;
  std::vector<std::string> words_;  // lexicographic
  std::vector<std::vector<std::uint64_t>> counts_;  // [field][word]
  std::uint64_t min_count_ = 1;
};

/// Intersects the corpora: keeps words whose count is >= min_count in every
/// field. Requires at least two corpora with distinct labels.
inline Vocabulary build_vocabulary(const std::vector<Corpus>& corpora,
                                   std::uint64_t min_count) {
  if (corpora.size() < 2) {
    throw ConfigError("need at least two corpora to build a vocabulary");
  }
  if (min_count < 1) throw ConfigError("min_count must be positive");
  std::vector<std::string> labels;
  for (const auto& c : corpora) {
    if (std::find(labels.begin(), labels.end(), c.field_label) !=
        labels.end()) {
      throw ConfigError("duplicate field label: " + c.field_label);
    }
    labels.push_back(c.field_label);
  }

  std::vector<std::string> words;
  for (const auto& [w, c0] : corpora[0].word_counts) {
    if (c0 < min_count) continue;
    bool everywhere = true;
    for (std::size_t f = 1; f < corpora.size(); ++f) {
      auto it = corpora[f].word_counts.find(w);
      if (it == corpora[f].word_counts.end() || it->second < min_count) {
        everywhere = false;
        break;
      }
    }
    if (everywhere) words.push_back(w);
  }
  // std::map iterates lexicographically, so words is already sorted.

  std::vector<std::vector<std::uint64_t>> counts(
      corpora.size(), std::vector<std::uint64_t>(words.size()));
  for (std::size_t f = 0; f < corpora.size(); ++f) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      counts[f][i] = corpora[f].word_counts.at(words[i]);
    }
  }
  return Vocabulary(std::move(labels), std::move(words), std::move(counts),
                    min_count);
}

namespace detail {

inline constexpr std::uint32_t kOovId = std::numeric_limits<std::uint32_t>::max();

/// Sentences as vocabulary ids; out-of-vocabulary tokens become kOovId so
/// they keep occupying window positions.
inline std::vector<std::vector<std::uint32_t>> map_corpus(
    const Corpus& corpus, const Vocabulary& vocab) {
  std::vector<std::vector<std::uint32_t>> mapped;
  mapped.reserve(corpus.sentences.size());
  for (const auto& sent : corpus.sentences) {
    std::vector<std::uint32_t> ids;
    ids.reserve(sent.size());
    for (const auto& tok : sent) {
      auto idx = vocab.index_of(tok);
      ids.push_back(idx ? *idx : kOovId);
    }
    mapped.push_back(std::move(ids));
  }
  return mapped;
}

template <class F>
inline void for_each_pair_in_sentence(const std::vector<std::uint32_t>& ids,
                                      int window, F&& f) {
  const auto len = static_cast<std::ptrdiff_t>(ids.size());
  for (std::ptrdiff_t i = 0; i < len; ++i) {
    if (ids[i] == kOovId) continue;
    for (std::ptrdiff_t off = -window; off <= window; ++off) {
      if (off == 0) continue;
      const std::ptrdiff_t j = i + off;
      if (j < 0 || j >= len) continue;
      if (ids[j] == kOovId) continue;
      f(ids[i], ids[j]);
    }
  }
}

}  // namespace detail

/// Streams (center, context) id pairs: for every in-vocabulary occurrence,
/// every in-vocabulary token within the window, clipped at sentence
/// boundaries. OOV tokens still occupy their window positions.
template <class F>
inline void for_each_context_pair(const Corpus& corpus,
                                  const Vocabulary& vocab, int window,
                                  F&& f) {
  if (window < 1) throw ConfigError("window must be >= 1");
  const auto mapped = detail::map_corpus(corpus, vocab);
  for (const auto& ids : mapped) {
    detail::for_each_pair_in_sentence(ids, window, f);
  }
}

/// Materialized word-pair stream, mostly for inspection and tests.
inline std::vector<std::pair<std::string, std::string>> context_pairs(
    const Corpus& corpus, const Vocabulary& vocab, int window) {
  std::vector<std::pair<std::string, std::string>> out;
  for_each_context_pair(corpus, vocab, window,
                        [&](std::uint32_t c, std::uint32_t x) {
                          out.emplace_back(vocab.word(c), vocab.word(x));
                        });
  return out;
}

inline std::uint64_t count_context_pairs(const Corpus& corpus,
                                         const Vocabulary& vocab,
                                         int window) {
  std::uint64_t n = 0;
  for_each_context_pair(corpus, vocab, window,
                        [&](std::uint32_t, std::uint32_t) { ++n; });
  return n;
}

// ---------------------------------------------------------------------------
// Corpus persistence: one sentence per line, space-separated tokens, plus a
// "word<TAB>count" sidecar sorted lexicographically.
// ---------------------------------------------------------------------------

inline void save_corpus(const Corpus& corpus,
                        const std::filesystem::path& sentences_path,
                        const std::filesystem::path& counts_path) {
  std::ofstream sf(sentences_path, std::ios::binary);
  if (!sf) throw IoError("cannot open for write: " + sentences_path.string());
  for (const auto& sent : corpus.sentences) {
    for (std::size_t i = 0; i < sent.size(); ++i) {
      if (i) sf << ' ';
      sf << sent[i];
    }
    sf << '\n';
  }
  if (!sf) throw IoError("write failed: " + sentences_path.string());

  std::ofstream cf(counts_path, std::ios::binary);
  if (!cf) throw IoError("cannot open for write: " + counts_path.string());
  for (const auto& [w, c] : corpus.word_counts) {
    cf << w << '\t' << c << '\n';
  }
  if (!cf) throw IoError("write failed: " + counts_path.string());
}

/// Loads a sentence file written by save_corpus; counts are recomputed from
/// the tokens so the count invariant holds by construction.
inline Corpus load_corpus(const std::string& field_label,
                          const std::filesystem::path& sentences_path) {
  std::ifstream sf(sentences_path, std::ios::binary);
  if (!sf) throw IoError("cannot open: " + sentences_path.string());
  Corpus out;
  out.field_label = field_label;
  std::string line;
  while (std::getline(sf, line)) {
    std::vector<std::string> sent;
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok) sent.push_back(tok);
    if (sent.empty()) continue;
    for (const auto& t : sent) ++out.word_counts[t];
    out.sentences.push_back(std::move(sent));
  }
  return out;
}

}  // namespace drift
