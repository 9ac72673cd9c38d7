#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "drift/corpus.hpp"
#include "drift/embed.hpp"
#include "drift/errors.hpp"

namespace drift {

/// Ordered snapshots plus the per-(word, segment) counts the metrics
/// normalize by. Snapshots must share one word set.
struct EmbeddingSequence {
  std::vector<FieldEmbeddings> snapshots;
  std::vector<std::vector<std::uint64_t>> counts;  // [segment][word]

  const std::vector<std::string>& words() const {
    return snapshots.front().words;
  }
  std::size_t segment_count() const { return snapshots.size(); }

  std::vector<std::string> segment_labels() const {
    std::vector<std::string> out;
    out.reserve(snapshots.size());
    for (const auto& s : snapshots) out.push_back(s.field_label);
    return out;
  }

  void validate() const {
    if (snapshots.size() < 2) {
      throw ConfigError("embedding sequence needs >= 2 snapshots");
    }
    if (counts.size() != snapshots.size()) {
      throw ConfigError("counts/snapshots size mismatch");
    }
    for (const auto& s : snapshots) {
      if (s.words != snapshots.front().words) {
        throw ConfigError("snapshots must share one word set");
      }
    }
    for (const auto& col : counts) {
      if (col.size() != words().size()) {
        throw ConfigError("counts/words size mismatch");
      }
    }
  }

  static EmbeddingSequence from(std::vector<FieldEmbeddings> snaps,
                                const Vocabulary& vocab) {
    EmbeddingSequence seq;
    seq.counts.reserve(snaps.size());
    for (const auto& s : snaps) {
      auto f = vocab.field_index(s.field_label);
      if (!f) throw ConfigError("snapshot field not in vocabulary: " +
                                s.field_label);
      std::vector<std::uint64_t> col(vocab.size());
      for (std::uint32_t w = 0; w < vocab.size(); ++w) {
        col[w] = vocab.count(w, *f);
      }
      seq.counts.push_back(std::move(col));
    }
    seq.snapshots = std::move(snaps);
    seq.validate();
    return seq;
  }
};

struct ShiftConfig {
  int k_nn = 20;
  bool rank_fusion = false;  // order by summed metric ranks instead of sum
  int threads = 1;
};

struct ShiftScore {
  std::string word;
  double euclidean = 0;
  double neighbor = 0;
  double ensemble = 0;  // always euclidean + neighbor
};

namespace detail {

inline double cosine(std::span<const float> a, std::span<const float> b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  return dot / std::sqrt(na * nb);
}

inline double euclidean_dist(std::span<const float> a,
                             std::span<const float> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline double log_count(const EmbeddingSequence& seq, std::uint32_t word,
                        std::size_t segment) {
  const std::uint64_t c = seq.counts[segment][word];
  if (c < 2) {
    throw UndefinedNormalizerError(seq.words()[word],
                                   seq.snapshots[segment].field_label);
  }
  return std::log(static_cast<double>(c));
}

}  // namespace detail

/// The K words (excluding the query) with highest cosine similarity to the
/// query's vector, descending; ties broken lexicographically (equal to
/// ascending index, since words are sorted).
inline std::vector<std::uint32_t> nearest_neighbors(
    const FieldEmbeddings& snap, std::uint32_t word, int k) {
  const auto n = static_cast<std::uint32_t>(snap.size());
  if (k < 1 || static_cast<std::uint32_t>(k) >= n) {
    throw ConfigError("K must satisfy 1 <= K < |V|");
  }
  std::vector<double> sim(n);
  const auto q = snap.vec(word);
  for (std::uint32_t i = 0; i < n; ++i) {
    sim[i] = detail::cosine(q, snap.vec(i));
  }
  std::vector<std::uint32_t> order;
  order.reserve(n - 1);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (i != word) order.push_back(i);
  }
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](std::uint32_t a, std::uint32_t b) {
                      if (sim[a] != sim[b]) return sim[a] > sim[b];
                      return a < b;
                    });
  order.resize(k);
  return order;
}

inline std::vector<std::string> nearest_neighbor_words(
    const FieldEmbeddings& snap, std::string_view word, int k) {
  auto idx = snap.index_of(word);
  if (!idx) throw OutOfVocabularyError(std::string(word));
  std::vector<std::string> out;
  for (auto i : nearest_neighbors(snap, *idx, k)) out.push_back(snap.words[i]);
  return out;
}

/// Step-wise Euclidean distance: summed vector displacement between
/// consecutive snapshots, each step divided by the log count of the word in
/// the later segment.
inline double stepwise_euclidean(std::uint32_t word,
                                 const EmbeddingSequence& seq) {
  double total = 0;
  for (std::size_t f = 1; f < seq.snapshots.size(); ++f) {
    const double step = detail::euclidean_dist(seq.snapshots[f].vec(word),
                                               seq.snapshots[f - 1].vec(word));
    total += step / detail::log_count(seq, word, f);
  }
  return total;
}

inline double stepwise_euclidean(std::string_view word,
                                 const EmbeddingSequence& seq) {
  auto idx = seq.snapshots.front().index_of(word);
  if (!idx) throw OutOfVocabularyError(std::string(word));
  return stepwise_euclidean(*idx, seq);
}

/// Nearest-neighbor distance: per consecutive snapshot pair, the number of
/// K nearest neighbors lost, divided by the log count in the later segment.
inline double neighbor_distance(std::uint32_t word,
                                const EmbeddingSequence& seq,
                                const ShiftConfig& config) {
  std::vector<std::vector<std::uint32_t>> nn;
  nn.reserve(seq.snapshots.size());
  for (const auto& snap : seq.snapshots) {
    auto ids = nearest_neighbors(snap, word, config.k_nn);
    std::sort(ids.begin(), ids.end());
    nn.push_back(std::move(ids));
  }
  double total = 0;
  for (std::size_t e = 1; e < nn.size(); ++e) {
    std::vector<std::uint32_t> common;
    std::set_intersection(nn[e].begin(), nn[e].end(), nn[e - 1].begin(),
                          nn[e - 1].end(), std::back_inserter(common));
    const double lost = static_cast<double>(config.k_nn) -
                        static_cast<double>(common.size());
    total += lost / detail::log_count(seq, word, e);
  }
  return total;
}

inline double neighbor_distance(std::string_view word,
                                const EmbeddingSequence& seq,
                                const ShiftConfig& config) {
  auto idx = seq.snapshots.front().index_of(word);
  if (!idx) throw OutOfVocabularyError(std::string(word));
  return neighbor_distance(*idx, seq, config);
}

/// Scores every vocabulary word and sorts by ensemble (the plain sum of the
/// two metrics) descending, ties lexicographic. With rank_fusion set, the
/// ordering key becomes the sum of the two per-metric ranks instead; the
/// reported values are unchanged.
inline std::vector<ShiftScore> rank_shifts(const EmbeddingSequence& seq,
                                           const ShiftConfig& config) {
  seq.validate();
  const auto n = static_cast<std::uint32_t>(seq.words().size());
  if (config.k_nn < 1 || static_cast<std::uint32_t>(config.k_nn) >= n) {
    throw ConfigError("K must satisfy 1 <= K < |V|");
  }

  // Per snapshot, per word: the K nearest neighbors as a sorted id list.
  const auto segs = seq.snapshots.size();
  std::vector<std::vector<std::vector<std::uint32_t>>> nn(segs);
  for (std::size_t e = 0; e < segs; ++e) {
    nn[e].resize(n);
    const auto& snap = seq.snapshots[e];
    auto work = [&, e](std::uint32_t begin, std::uint32_t end) {
      for (std::uint32_t w = begin; w < end; ++w) {
        auto ids = nearest_neighbors(snap, w, config.k_nn);
        std::sort(ids.begin(), ids.end());
        nn[e][w] = std::move(ids);
      }
    };
    if (config.threads <= 1) {
      work(0, n);
    } else {
      std::vector<std::thread> pool;
      const std::uint32_t chunk = (n + config.threads - 1) / config.threads;
      for (int t = 0; t < config.threads; ++t) {
        const std::uint32_t b = std::min<std::uint32_t>(t * chunk, n);
        const std::uint32_t ed = std::min<std::uint32_t>(b + chunk, n);
        if (b < ed) pool.emplace_back(work, b, ed);
      }
      for (auto& th : pool) th.join();
    }
  }

  std::vector<ShiftScore> scores(n);
  for (std::uint32_t w = 0; w < n; ++w) {
    ShiftScore s;
    s.word = seq.words()[w];
    s.euclidean = stepwise_euclidean(w, seq);
    for (std::size_t e = 1; e < segs; ++e) {
      std::vector<std::uint32_t> common;
      std::set_intersection(nn[e][w].begin(), nn[e][w].end(),
                            nn[e - 1][w].begin(), nn[e - 1][w].end(),
                            std::back_inserter(common));
      s.neighbor += (static_cast<double>(config.k_nn) -
                     static_cast<double>(common.size())) /
                    detail::log_count(seq, w, e);
    }
    s.ensemble = s.euclidean + s.neighbor;
    scores[w] = std::move(s);
  }

  if (!config.rank_fusion) {
    std::sort(scores.begin(), scores.end(),
              [](const ShiftScore& a, const ShiftScore& b) {
                if (a.ensemble != b.ensemble) return a.ensemble > b.ensemble;
                return a.word < b.word;
              });
    return scores;
  }

  // Rank fusion: rank per metric (descending, ties lexicographic), order by
  // summed rank ascending.
  auto ranks_by = [&](auto key) {
    std::vector<std::uint32_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (key(scores[a]) != key(scores[b])) return key(scores[a]) > key(scores[b]);
      return scores[a].word < scores[b].word;
    });
    std::vector<std::uint32_t> rank(scores.size());
    for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
    return rank;
  };
  const auto re = ranks_by([](const ShiftScore& s) { return s.euclidean; });
  const auto rn = ranks_by([](const ShiftScore& s) { return s.neighbor; });
  std::vector<std::uint32_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    const auto fa = re[a] + rn[a], fb = re[b] + rn[b];
    if (fa != fb) return fa < fb;
    if (scores[a].ensemble != scores[b].ensemble) {
      return scores[a].ensemble > scores[b].ensemble;
    }
    return scores[a].word < scores[b].word;
  });
  std::vector<ShiftScore> out;
  out.reserve(scores.size());
  for (auto i : order) out.push_back(std::move(scores[i]));
  return out;
}

/// Tab-separated ranking: word, euclidean, neighbor, ensemble at six
/// significant digits.
inline void write_shift_tsv(std::ostream& os,
                            const std::vector<ShiftScore>& scores) {
  char buf[128];
  for (const auto& s : scores) {
    std::snprintf(buf, sizeof(buf), "%.6g\t%.6g\t%.6g", s.euclidean,
                  s.neighbor, s.ensemble);
    os << s.word << '\t' << buf << '\n';
  }
}

}  // namespace drift
