#pragma once

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "drift/corpus.hpp"
#include "drift/errors.hpp"
#include "drift/huffman.hpp"
#include "drift/rng.hpp"

namespace drift {

struct TrainingConfig {
  int window = 5;
  int dim = 100;
  int epochs = 5;
  double initial_learning_rate = 0.025;
  std::uint64_t seed = 1;
  int threads = 1;  // 1 = deterministic; >1 = lock-free hogwild updates

  void validate() const {
    if (window < 1) throw ConfigError("window must be >= 1");
    if (dim < 1) throw ConfigError("dim must be >= 1");
    if (epochs < 0) throw ConfigError("epochs must be >= 0");
    if (initial_learning_rate < 0 || !std::isfinite(initial_learning_rate)) {
      throw ConfigError("initial_learning_rate must be finite and >= 0");
    }
    if (threads < 1) throw ConfigError("threads must be >= 1");
  }
};

/// Instrumentation counters filled by train().
struct TrainStats {
  std::uint64_t steps = 0;         // (center, context) pairs processed
  std::uint64_t node_updates = 0;  // tree-node parameter updates
};

/// Skip-gram model with a hierarchical-softmax output layer. Input vectors
/// hold one row per vocabulary word; node vectors hold one row per internal
/// Huffman node.
class EmbeddingModel {
 public:
  EmbeddingModel(Vocabulary vocab, HuffmanTree tree, int dim)
      : vocab_(std::move(vocab)), tree_(std::move(tree)), dim_(dim) {
    if (dim_ < 1) throw ConfigError("dim must be >= 1");
    if (tree_.leaf_count() != vocab_.size()) {
      throw ConfigError("tree/vocabulary size mismatch");
    }
    inputs_.assign(vocab_.size() * static_cast<std::size_t>(dim_), 0.0);
    nodes_.assign(tree_.node_count() * static_cast<std::size_t>(dim_), 0.0);
  }

  /// Canonical initialization: inputs uniform in (-0.5/d, 0.5/d), node
  /// parameters zero.
  static EmbeddingModel seeded(Vocabulary vocab, HuffmanTree tree, int dim,
                               std::uint64_t seed) {
    EmbeddingModel m(std::move(vocab), std::move(tree), dim);
    Rng rng(seed);
    const double half = 0.5 / dim;
    for (auto& x : m.inputs_) x = rng.uniform(-half, half);
    return m;
  }

  int dim() const { return dim_; }
  const Vocabulary& vocab() const { return vocab_; }
  const HuffmanTree& tree() const { return tree_; }

  std::span<double> input(std::uint32_t w) {
    return {inputs_.data() + static_cast<std::size_t>(w) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  std::span<const double> input(std::uint32_t w) const {
    return {inputs_.data() + static_cast<std::size_t>(w) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  std::span<double> node(std::uint32_t k) {
    return {nodes_.data() + static_cast<std::size_t>(k) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  std::span<const double> node(std::uint32_t k) const {
    return {nodes_.data() + static_cast<std::size_t>(k) * dim_,
            static_cast<std::size_t>(dim_)};
  }

  const std::vector<double>& input_data() const { return inputs_; }
  const std::vector<double>& node_data() const { return nodes_; }

  bool all_finite() const {
    for (double x : inputs_)
      if (!std::isfinite(x)) return false;
    for (double x : nodes_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  friend bool operator==(const EmbeddingModel& a, const EmbeddingModel& b) {
    return a.dim_ == b.dim_ && a.inputs_ == b.inputs_ && a.nodes_ == b.nodes_ &&
           a.vocab_.words() == b.vocab_.words();
  }

 private:
  Vocabulary vocab_;
  HuffmanTree tree_;
  int dim_;
  std::vector<double> inputs_;  // |V| x d
  std::vector<double> nodes_;   // (|V|-1) x d
};

namespace detail {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// -log(sigmoid(x)), evaluated without overflow.
inline double neg_log_sigmoid(double x) {
  return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

/// Hierarchical-softmax probability of `context` given `center`: the product
/// over the context word's tree path of sigmoid(+-node.input), the sign set
/// by the branch bit.
inline double context_probability_ids(const EmbeddingModel& model,
                                      std::uint32_t center,
                                      std::uint32_t context) {
  const auto v = model.input(center);
  const auto& path = model.tree().paths[context];
  const auto& code = model.tree().codes[context];
  double p = 1.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double d = detail::dot(model.node(path[k]), v);
    p *= detail::sigmoid(code[k] ? -d : d);
  }
  return p;
}

inline double context_probability(const EmbeddingModel& model,
                                  std::string_view center,
                                  std::string_view context) {
  auto c = model.vocab().index_of(center);
  if (!c) throw OutOfVocabularyError(std::string(center));
  auto x = model.vocab().index_of(context);
  if (!x) throw OutOfVocabularyError(std::string(context));
  return context_probability_ids(model, *c, *x);
}

/// -log Pr(context | center), evaluated stably along the path.
inline double pair_loss(const EmbeddingModel& model, std::uint32_t center,
                        std::uint32_t context) {
  const auto v = model.input(center);
  const auto& path = model.tree().paths[context];
  const auto& code = model.tree().codes[context];
  double loss = 0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double d = detail::dot(model.node(path[k]), v);
    loss += detail::neg_log_sigmoid(code[k] ? -d : d);
  }
  return loss;
}

/// Analytic gradient of pair_loss with respect to the center input vector
/// and each node vector on the context word's path.
struct PairGradient {
  std::vector<double> center;  // d
  std::vector<std::pair<std::uint32_t, std::vector<double>>> nodes;
};

inline PairGradient pair_gradient(const EmbeddingModel& model,
                                  std::uint32_t center,
                                  std::uint32_t context) {
  const auto v = model.input(center);
  const auto& path = model.tree().paths[context];
  const auto& code = model.tree().codes[context];
  PairGradient g;
  g.center.assign(v.size(), 0.0);
  g.nodes.reserve(path.size());
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto u = model.node(path[k]);
    const double f = detail::sigmoid(detail::dot(u, v));
    // d(-log Pr)/d(dot) for branch bit b is f - 1 + b.
    const double gd = f - 1.0 + code[k];
    std::vector<double> gu(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
      gu[j] = gd * v[j];
      g.center[j] += gd * u[j];
    }
    g.nodes.emplace_back(path[k], std::move(gu));
  }
  return g;
}

/// Objective of Eq.-style skip-gram training: the summed -log Pr over every
/// context pair of the corpus.
inline double corpus_loss(const EmbeddingModel& model, const Corpus& corpus,
                          int window) {
  double j = 0;
  for_each_context_pair(corpus, model.vocab(), window,
                        [&](std::uint32_t c, std::uint32_t x) {
                          j += pair_loss(model, c, x);
                        });
  return j;
}

namespace detail {

struct TrainState {
  std::vector<std::vector<std::uint32_t>> mapped;
  std::uint64_t pairs_per_epoch = 0;
};

inline TrainState prepare_train_state(const Corpus& corpus,
                                      const Vocabulary& vocab, int window) {
  TrainState st;
  st.mapped = map_corpus(corpus, vocab);
  for (const auto& ids : st.mapped) {
    for_each_pair_in_sentence(ids, window,
                              [&](std::uint32_t, std::uint32_t) {
                                ++st.pairs_per_epoch;
                              });
  }
  return st;
}

}  // namespace detail

/// SGD over the corpus's context pairs, descending the summed -log Pr via
/// the hierarchical decomposition. The learning rate decays linearly from
/// initial_learning_rate to 1e-4x over all (epoch, pair) steps. With init
/// absent the model is freshly seeded (Huffman tree over this corpus's
/// vocabulary counts); with init given, its tree and parameters carry over.
/// Single-threaded runs are bit-reproducible.
inline EmbeddingModel train(const Corpus& corpus, const Vocabulary& vocab,
                            const TrainingConfig& config,
                            const EmbeddingModel* init = nullptr,
                            TrainStats* stats = nullptr,
                            std::vector<double>* epoch_losses = nullptr) {
  config.validate();

  EmbeddingModel model = [&] {
    if (init) {
      if (init->dim() != config.dim) {
        throw ConfigError("init model dim does not match config");
      }
      if (init->vocab().words() != vocab.words()) {
        throw ConfigError("init model vocabulary does not match");
      }
      return *init;
    }
    std::vector<std::uint64_t> counts(vocab.size(), 1);
    for (std::uint32_t i = 0; i < vocab.size(); ++i) {
      auto it = corpus.word_counts.find(vocab.word(i));
      if (it != corpus.word_counts.end()) counts[i] = it->second;
    }
    return EmbeddingModel::seeded(vocab, build_huffman(counts), config.dim,
                                  config.seed);
  }();

  auto st = detail::prepare_train_state(corpus, vocab, config.window);
  const std::uint64_t total_steps =
      st.pairs_per_epoch * static_cast<std::uint64_t>(config.epochs);
  if (stats) *stats = {};
  if (epoch_losses) epoch_losses->clear();
  if (total_steps == 0) return model;

  const double lr0 = config.initial_learning_rate;
  const double lr_end = 1e-4 * lr0;
  const double lr_slope = (lr_end - lr0) / static_cast<double>(total_steps);

  const auto d = static_cast<std::size_t>(config.dim);
  std::atomic<std::uint64_t> shared_step{0};
  std::atomic<std::uint64_t> shared_node_updates{0};
  std::atomic<bool> failed{false};
  std::atomic<std::uint64_t> failed_step{0};

  auto run_span = [&](std::size_t thread_id, std::size_t stride) {
    std::vector<double> grad_center(d);
    try {
      for (std::size_t si = thread_id; si < st.mapped.size(); si += stride) {
        const auto& ids = st.mapped[si];
        detail::for_each_pair_in_sentence(
            ids, config.window, [&](std::uint32_t center, std::uint32_t ctx) {
              const std::uint64_t step =
                  shared_step.fetch_add(1, std::memory_order_relaxed);
              const double lr = lr0 + lr_slope * static_cast<double>(step);
              auto v = model.input(center);
              const auto& path = model.tree().paths[ctx];
              const auto& code = model.tree().codes[ctx];
              std::fill(grad_center.begin(), grad_center.end(), 0.0);
              for (std::size_t k = 0; k < path.size(); ++k) {
                auto u = model.node(path[k]);
                const double dp = detail::dot(u, v);
                if (!std::isfinite(dp)) throw TrainingDivergedError(step);
                const double g = detail::sigmoid(dp) - 1.0 + code[k];
                const double gl = g * lr;
                for (std::size_t j = 0; j < d; ++j) {
                  grad_center[j] += g * u[j];
                  u[j] -= gl * v[j];
                }
              }
              for (std::size_t j = 0; j < d; ++j) {
                v[j] -= lr * grad_center[j];
              }
              shared_node_updates.fetch_add(path.size(),
                                            std::memory_order_relaxed);
            });
      }
    } catch (const TrainingDivergedError& e) {
      bool expected = false;
      if (failed.compare_exchange_strong(expected, true)) {
        failed_step.store(e.step);
      }
    }
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.threads == 1) {
      run_span(0, 1);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(config.threads);
      for (int t = 0; t < config.threads; ++t) {
        pool.emplace_back(run_span, static_cast<std::size_t>(t),
                          static_cast<std::size_t>(config.threads));
      }
      for (auto& th : pool) th.join();
    }
    if (failed.load()) throw TrainingDivergedError(failed_step.load());
    if (epoch_losses) {
      epoch_losses->push_back(corpus_loss(model, corpus, config.window));
    }
  }

  if (stats) {
    stats->steps = shared_step.load();
    stats->node_updates = shared_node_updates.load();
  }
  if (!model.all_finite()) throw TrainingDivergedError(shared_step.load());
  return model;
}

/// One field's normalized embedding snapshot. Rows follow vocabulary order
/// (lexicographic words) and are stored as 32-bit floats, matching the
/// on-disk format exactly.
struct FieldEmbeddings {
  std::string field_label;
  std::vector<std::string> words;  // sorted
  int dim = 0;
  std::vector<float> data;  // words.size() * dim, row-major

  std::size_t size() const { return words.size(); }

  std::span<const float> vec(std::uint32_t w) const {
    return {data.data() + static_cast<std::size_t>(w) * dim,
            static_cast<std::size_t>(dim)};
  }

  std::optional<std::uint32_t> index_of(std::string_view w) const {
    auto it = std::lower_bound(words.begin(), words.end(), w);
    if (it == words.end() || *it != w) return std::nullopt;
    return static_cast<std::uint32_t>(it - words.begin());
  }
};

/// L2-normalized copy of the model's input vectors. The live model keeps
/// its unnormalized state for continued fine-tuning.
inline FieldEmbeddings snapshot(const EmbeddingModel& model,
                                const std::string& field_label) {
  FieldEmbeddings out;
  out.field_label = field_label;
  out.words = model.vocab().words();
  out.dim = model.dim();
  out.data.resize(out.words.size() * static_cast<std::size_t>(out.dim));
  for (std::uint32_t w = 0; w < out.words.size(); ++w) {
    const auto v = model.input(w);
    double norm2 = 0;
    for (double x : v) norm2 += x * x;
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) throw DegenerateVectorError(out.words[w]);
    for (int j = 0; j < out.dim; ++j) {
      out.data[static_cast<std::size_t>(w) * out.dim + j] =
          static_cast<float>(v[j] / norm);
    }
  }
  return out;
}

/// Trains on the first corpus from scratch, then fine-tunes on each
/// following corpus in order, snapshotting after each. The snapshot order
/// is the segment order used by the shift metrics.
inline std::vector<FieldEmbeddings> train_sequence(
    const std::vector<Corpus>& corpora, const Vocabulary& vocab,
    const TrainingConfig& config) {
  if (corpora.empty()) throw ConfigError("train_sequence needs >= 1 corpus");
  std::vector<FieldEmbeddings> snaps;
  snaps.reserve(corpora.size());
  EmbeddingModel model = train(corpora[0], vocab, config);
  snaps.push_back(snapshot(model, corpora[0].field_label));
  for (std::size_t f = 1; f < corpora.size(); ++f) {
    model = train(corpora[f], vocab, config, &model);
    snaps.push_back(snapshot(model, corpora[f].field_label));
  }
  return snaps;
}

// ---------------------------------------------------------------------------
// DRIFT-EMB file format, version 1:
//   header line:  DRIFT-EMB 1 <vocab_size> <dim> <field_label>\n
//   per word:     <word> <dim x little-endian float32> \n
// Words appear in vocabulary order. Round-trips bit-exactly.
// ---------------------------------------------------------------------------

namespace detail {

inline void put_f32_le(std::string& out, float x) {
  const auto bits = std::bit_cast<std::uint32_t>(x);
  out.push_back(static_cast<char>(bits & 0xFF));
  out.push_back(static_cast<char>((bits >> 8) & 0xFF));
  out.push_back(static_cast<char>((bits >> 16) & 0xFF));
  out.push_back(static_cast<char>((bits >> 24) & 0xFF));
}

inline float get_f32_le(const unsigned char* p) {
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                             (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) |
                             (static_cast<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

}  // namespace detail

inline void save_embeddings(const FieldEmbeddings& emb,
                            const std::filesystem::path& path) {
  std::string buf;
  buf.reserve(64 + emb.data.size() * 4 + emb.words.size() * 8);
  buf += "DRIFT-EMB 1 ";
  buf += std::to_string(emb.words.size());
  buf += ' ';
  buf += std::to_string(emb.dim);
  buf += ' ';
  buf += emb.field_label;
  buf += '\n';
  for (std::uint32_t w = 0; w < emb.words.size(); ++w) {
    buf += emb.words[w];
    buf += ' ';
    for (float x : emb.vec(w)) detail::put_f32_le(buf, x);
    buf += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for write: " + path.string());
  f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

inline FieldEmbeddings load_embeddings(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path.string());
  std::string content((std::istreambuf_iterator<char>(f)),
                      std::istreambuf_iterator<char>());

  const auto nl = content.find('\n');
  if (nl == std::string::npos) throw IoError("truncated header: " + path.string());
  std::istringstream header(content.substr(0, nl));
  std::string magic;
  int version = 0;
  std::size_t vocab_size = 0;
  int dim = 0;
  header >> magic >> version >> vocab_size >> dim;
  if (magic != "DRIFT-EMB" || version != 1 || !header) {
    throw IoError("not a DRIFT-EMB v1 file: " + path.string());
  }
  std::string label;
  std::getline(header, label);
  if (!label.empty() && label.front() == ' ') label.erase(0, 1);
  if (label.empty()) throw IoError("missing field label: " + path.string());

  FieldEmbeddings emb;
  emb.field_label = label;
  emb.dim = dim;
  emb.words.reserve(vocab_size);
  emb.data.reserve(vocab_size * static_cast<std::size_t>(dim));

  std::size_t pos = nl + 1;
  for (std::size_t w = 0; w < vocab_size; ++w) {
    const auto sp = content.find(' ', pos);
    if (sp == std::string::npos) throw IoError("truncated record: " + path.string());
    emb.words.push_back(content.substr(pos, sp - pos));
    pos = sp + 1;
    if (pos + 4 * static_cast<std::size_t>(dim) + 1 > content.size()) {
      throw IoError("truncated record: " + path.string());
    }
    const auto* bytes =
        reinterpret_cast<const unsigned char*>(content.data() + pos);
    for (int j = 0; j < dim; ++j) {
      emb.data.push_back(detail::get_f32_le(bytes + 4 * j));
    }
    pos += 4 * static_cast<std::size_t>(dim);
    if (content[pos] != '\n') throw IoError("malformed record: " + path.string());
    ++pos;
  }
  if (pos != content.size()) throw IoError("trailing bytes: " + path.string());
  if (!std::is_sorted(emb.words.begin(), emb.words.end())) {
    throw IoError("words out of vocabulary order: " + path.string());
  }
  return emb;
}

}  // namespace drift
