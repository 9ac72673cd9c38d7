#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "drift/embed.hpp"
#include "drift/rng.hpp"
#include "oracles.hpp"

using drift::EmbeddingModel;
using drift::TrainingConfig;
using drift::Vocabulary;

namespace {

drift::Corpus corpus_of(const std::string& label, const std::string& text) {
  return drift::preprocess({label, text});
}

Vocabulary vocab_of(const drift::Corpus& corpus) {
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  for (const auto& [w, c] : corpus.word_counts) {
    words.push_back(w);
    counts.push_back(c);
  }
  return Vocabulary({corpus.field_label}, words, {counts}, 1);
}

EmbeddingModel random_model(const std::vector<std::string>& words, int dim,
                            std::uint64_t seed, double scale = 0.5) {
  auto vocab = oracles::make_vocab({"A"}, words, /*uniform_count=*/5,
                                   /*min_count=*/1);
  std::vector<std::uint64_t> counts(vocab.size());
  drift::Rng crng(seed * 7 + 1);
  for (auto& c : counts) c = 1 + crng.uniform_int(50);
  EmbeddingModel model(vocab, drift::build_huffman(counts), dim);
  drift::Rng rng(seed);
  for (std::uint32_t w = 0; w < vocab.size(); ++w) {
    for (auto& x : model.input(w)) x = rng.uniform(-scale, scale);
  }
  for (std::uint32_t k = 0; k < vocab.size() - 1; ++k) {
    for (auto& x : model.node(k)) x = rng.uniform(-scale, scale);
  }
  return model;
}

std::vector<std::string> letter_words(int n) {
  std::vector<std::string> words;
  for (int i = 0; i < n; ++i) {
    words.push_back("w" + std::to_string(100 + i));
  }
  return words;
}

}  // namespace

TEST_CASE("zero model gives 2^-codelen probabilities", "[embed]") {
  auto vocab = oracles::make_vocab({"A"}, {"a", "b", "c"}, 5, 1);
  EmbeddingModel model(vocab, drift::build_huffman({5, 2, 1}), 4);
  for (std::uint32_t ctx = 0; ctx < 3; ++ctx) {
    const double expected =
        std::pow(2.0, -static_cast<double>(model.tree().codes[ctx].size()));
    CHECK(drift::context_probability_ids(model, 0, ctx) ==
          Catch::Approx(expected).margin(1e-15));
  }
}

TEST_CASE("probabilities over all context words sum to one", "[embed]") {
  for (int n : {3, 16, 64}) {
    auto model = random_model(letter_words(n), 8, 1000 + n);
    for (std::uint32_t center : {0u, static_cast<std::uint32_t>(n / 2)}) {
      double sum = 0;
      for (std::uint32_t ctx = 0; ctx < static_cast<std::uint32_t>(n); ++ctx) {
        const double p = drift::context_probability_ids(model, center, ctx);
        CHECK(p > 0);
        CHECK(p < 1);
        sum += p;
      }
      CHECK(std::abs(sum - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("hierarchical probabilities match the materialized leaf distribution",
          "[embed]") {
  auto model = random_model({"a", "b", "c"}, 6, 21);
  const auto leaf = oracles::materialize_leaf_distribution(model, 1);
  double sum = 0;
  for (std::uint32_t ctx = 0; ctx < 3; ++ctx) {
    CHECK(drift::context_probability_ids(model, 1, ctx) ==
          Catch::Approx(leaf[ctx]).epsilon(1e-12));
    sum += leaf[ctx];
  }
  CHECK(sum == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("unknown words are rejected by name", "[embed]") {
  auto model = random_model({"a", "b", "c"}, 4, 5);
  try {
    drift::context_probability(model, "a", "zebra");
    FAIL("expected OutOfVocabularyError");
  } catch (const drift::OutOfVocabularyError& e) {
    CHECK(e.word == "zebra");
    CHECK(std::string(e.what()).find("zebra") != std::string::npos);
  }
}

TEST_CASE("analytic gradients match central finite differences", "[embed]") {
  auto model = random_model(letter_words(5), 4, 99);
  drift::Rng rng(17);
  const double h = 1e-5;
  int checked = 0;
  for (int round = 0; round < 100; ++round) {
    const auto center = static_cast<std::uint32_t>(rng.uniform_int(5));
    auto ctx = static_cast<std::uint32_t>(rng.uniform_int(5));
    if (ctx == center) ctx = (ctx + 1) % 5;
    const auto grad = drift::pair_gradient(model, center, ctx);

    auto fd_check = [&](std::span<double> coord, std::size_t j,
                        double analytic) {
      const double orig = coord[j];
      coord[j] = orig + h;
      const double up = drift::pair_loss(model, center, ctx);
      coord[j] = orig - h;
      const double down = drift::pair_loss(model, center, ctx);
      coord[j] = orig;
      const double fd = (up - down) / (2 * h);
      const double denom = std::max(std::abs(fd), std::abs(analytic));
      if (denom > 1e-7) {
        CHECK(std::abs(fd - analytic) / denom < 1e-4);
      } else {
        CHECK(std::abs(fd - analytic) < 1e-7);
      }
      ++checked;
    };

    for (std::size_t j = 0; j < 4; ++j) {
      fd_check(model.input(center), j, grad.center[j]);
    }
    for (const auto& [node, gu] : grad.nodes) {
      for (std::size_t j = 0; j < 4; ++j) {
        fd_check(model.node(node), j, gu[j]);
      }
    }
  }
  CHECK(checked >= 800);
}

TEST_CASE("zero epochs return the initialization unchanged", "[embed]") {
  const auto corpus = corpus_of("A", "a b a b a c");
  const auto vocab = vocab_of(corpus);
  TrainingConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 0;
  cfg.seed = 3;
  const auto fresh = drift::train(corpus, vocab, cfg);
  const auto again = drift::train(corpus, vocab, cfg);
  CHECK(fresh == again);

  const auto from_init = drift::train(corpus, vocab, cfg, &fresh);
  CHECK(from_init == fresh);
}

TEST_CASE("the objective decreases on the toy corpus", "[embed]") {
  std::string text;
  for (int i = 0; i < 100; ++i) text += "a b\n";
  const auto corpus = corpus_of("A", text);
  const auto vocab = vocab_of(corpus);
  TrainingConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 5;
  cfg.seed = 7;

  TrainingConfig init_only = cfg;
  init_only.epochs = 0;
  const auto initial = drift::train(corpus, vocab, init_only);
  const double j0 = drift::corpus_loss(initial, corpus, cfg.window);

  const auto trained = drift::train(corpus, vocab, cfg);
  const double j1 = drift::corpus_loss(trained, corpus, cfg.window);
  CHECK(j1 < j0);
}

TEST_CASE("training is bit-reproducible single-threaded", "[embed]") {
  const auto corpus =
      corpus_of("A", "the cat sat on the mat. the dog sat on the cat.");
  const auto vocab = vocab_of(corpus);
  TrainingConfig cfg;
  cfg.dim = 12;
  cfg.epochs = 3;
  cfg.seed = 1234;
  const auto a = drift::train(corpus, vocab, cfg);
  const auto b = drift::train(corpus, vocab, cfg);
  CHECK(a == b);  // exact floating-point equality
}

TEST_CASE("one training step applies exactly the analytic gradient", "[embed]") {
  const auto corpus = corpus_of("A", "a b");
  const auto vocab = vocab_of(corpus);
  TrainingConfig cfg;
  cfg.dim = 6;
  cfg.epochs = 1;
  cfg.window = 1;
  cfg.seed = 5;
  cfg.initial_learning_rate = 0.2;

  TrainingConfig init_only = cfg;
  init_only.epochs = 0;
  auto manual = drift::train(corpus, vocab, init_only);
  const auto trained = drift::train(corpus, vocab, cfg);

  // Pairs in corpus order: (a,b) then (b,a); lr decays linearly to 1e-4 lr0
  // over the two steps.
  const double lr0 = cfg.initial_learning_rate;
  const double lr_end = 1e-4 * lr0;
  const auto a = *vocab.index_of("a");
  const auto b = *vocab.index_of("b");
  int step = 0;
  for (auto [center, ctx] : {std::pair{a, b}, std::pair{b, a}}) {
    const double lr = lr0 + (lr_end - lr0) * step / 2.0;
    const auto grad = drift::pair_gradient(manual, center, ctx);
    for (const auto& [node, gu] : grad.nodes) {
      auto u = manual.node(node);
      for (std::size_t j = 0; j < u.size(); ++j) u[j] -= lr * gu[j];
    }
    auto v = manual.input(center);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] -= lr * grad.center[j];
    ++step;
  }

  for (std::uint32_t w = 0; w < vocab.size(); ++w) {
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(trained.input(w)[j] ==
            Catch::Approx(manual.input(w)[j]).epsilon(1e-14).margin(1e-18));
    }
  }
  for (std::uint32_t k = 0; k < vocab.size() - 1; ++k) {
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(trained.node(k)[j] ==
            Catch::Approx(manual.node(k)[j]).epsilon(1e-14).margin(1e-18));
    }
  }
}

TEST_CASE("snapshot normalizes vectors", "[embed]") {
  auto vocab = oracles::make_vocab({"A"}, {"a", "b", "c"}, 5, 1);
  EmbeddingModel model(vocab, drift::build_huffman({1, 1, 1}), 2);
  model.input(0)[0] = 3;
  model.input(0)[1] = 4;
  model.input(1)[0] = 1;
  model.input(1)[1] = 0;
  model.input(2)[0] = -2;
  model.input(2)[1] = 2;

  const auto snap = drift::snapshot(model, "A");
  CHECK(snap.vec(0)[0] == Catch::Approx(0.6).margin(1e-7));
  CHECK(snap.vec(0)[1] == Catch::Approx(0.8).margin(1e-7));
  CHECK(snap.vec(1)[0] == Catch::Approx(1.0).margin(1e-12));
  CHECK(snap.vec(1)[1] == Catch::Approx(0.0).margin(1e-12));
  for (std::uint32_t w = 0; w < 3; ++w) {
    double norm2 = 0;
    for (float x : snap.vec(w)) norm2 += static_cast<double>(x) * x;
    CHECK(std::abs(std::sqrt(norm2) - 1.0) < 1e-6);
  }
}

TEST_CASE("snapshot rejects zero vectors by word", "[embed]") {
  auto vocab = oracles::make_vocab({"A"}, {"a", "b"}, 5, 1);
  EmbeddingModel model(vocab, drift::build_huffman({1, 1}), 3);
  model.input(0)[0] = 1;  // "a" fine, "b" stays zero
  try {
    drift::snapshot(model, "A");
    FAIL("expected DegenerateVectorError");
  } catch (const drift::DegenerateVectorError& e) {
    CHECK(e.word == "b");
  }
}

TEST_CASE("a one-corpus sequence equals train plus snapshot", "[embed]") {
  const auto corpus = corpus_of("A", "x y z x y. z x y z.");
  const auto vocab = vocab_of(corpus);
  TrainingConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 2;
  cfg.seed = 9;
  const auto snaps = drift::train_sequence({corpus}, vocab, cfg);
  REQUIRE(snaps.size() == 1);
  const auto direct = drift::snapshot(drift::train(corpus, vocab, cfg), "A");
  CHECK(snaps[0].data == direct.data);
  CHECK(snaps[0].field_label == "A");
}

TEST_CASE("zero learning rate on the second corpus freezes the snapshot",
          "[embed]") {
  const auto a = corpus_of("A", "p q r p q r p q r");
  auto b = a;
  b.field_label = "B";
  const auto vocab = vocab_of(a);
  TrainingConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 2;
  cfg.seed = 4;

  auto model = drift::train(a, vocab, cfg);
  const auto snap_a = drift::snapshot(model, "A");
  TrainingConfig frozen = cfg;
  frozen.initial_learning_rate = 0.0;
  model = drift::train(b, vocab, frozen, &model);
  const auto snap_b = drift::snapshot(model, "B");
  CHECK(snap_a.data == snap_b.data);
}

TEST_CASE("fine-tuning keeps the base corpus's Huffman tree", "[embed]") {
  // Counts differ sharply between the fields; the hierarchy must come from
  // the first corpus and stay frozen afterwards.
  const auto a = corpus_of("A", "x x x x x x x x y y z w. y z w x.");
  const auto b = corpus_of("B", "w w w w w w w w z z y x. z y x w.");
  const auto vocab = drift::build_vocabulary({a, b}, 1);
  TrainingConfig cfg;
  cfg.dim = 4;
  cfg.epochs = 1;
  cfg.seed = 13;
  const auto base = drift::train(a, vocab, cfg);
  const auto tuned = drift::train(b, vocab, cfg, &base);
  CHECK(tuned.tree().codes == base.tree().codes);
  CHECK(tuned.tree().paths == base.tree().paths);

  const auto from_b = drift::train(b, vocab, cfg);
  CHECK(from_b.tree().codes != base.tree().codes);
}

TEST_CASE("corpus order is not contractually invariant", "[embed]") {
  const auto a = corpus_of("A", "m n o m n o p p p p");
  const auto b = corpus_of("B", "o n m p o n m p p p");
  const auto vocab = drift::build_vocabulary({a, b}, 1);
  TrainingConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 2;
  cfg.seed = 11;
  const auto fwd = drift::train_sequence({a, b}, vocab, cfg);
  const auto rev = drift::train_sequence({b, a}, vocab, cfg);
  CHECK(fwd.back().data != rev.back().data);
}

TEST_CASE("embedding files round-trip bit-exactly", "[embed]") {
  const auto corpus = corpus_of("myfield", "u v w u v. w u v w.");
  const auto vocab = vocab_of(corpus);
  TrainingConfig cfg;
  cfg.dim = 5;
  cfg.epochs = 1;
  cfg.seed = 2;
  const auto snap =
      drift::snapshot(drift::train(corpus, vocab, cfg), "myfield");

  const auto dir = std::filesystem::temp_directory_path() / "drift_emb_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "f.emb";
  drift::save_embeddings(snap, path);
  const auto back = drift::load_embeddings(path);
  CHECK(back.field_label == snap.field_label);
  CHECK(back.words == snap.words);
  CHECK(back.dim == snap.dim);
  CHECK(back.data == snap.data);  // bitwise float equality

  const auto path2 = dir / "f2.emb";
  drift::save_embeddings(back, path2);
  std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
  const std::string c1((std::istreambuf_iterator<char>(f1)), {});
  const std::string c2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(c1 == c2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("Zipf vocabularies keep code lengths logarithmic", "[embed]") {
  const int n = 4096;
  std::vector<std::uint64_t> counts(n);
  for (int i = 0; i < n; ++i) {
    counts[i] = std::max<std::uint64_t>(1, 1000000 / (i + 1));
  }
  const auto tree = drift::build_huffman(counts);
  CHECK(tree.max_code_length() <= static_cast<std::size_t>(n - 1));
  const double avg = tree.expected_code_length(counts);
  CHECK(avg <= std::ceil(std::log2(n)) + 2);
}

TEST_CASE("each pair update touches exactly path-length nodes", "[embed]") {
  const auto corpus = corpus_of("A", "a b c d e a b c. d e a b.");
  const auto vocab = vocab_of(corpus);
  TrainingConfig cfg;
  cfg.dim = 4;
  cfg.epochs = 2;
  cfg.seed = 6;
  drift::TrainStats stats;
  const auto model = drift::train(corpus, vocab, cfg, nullptr, &stats);

  std::uint64_t expected_updates = 0, expected_steps = 0;
  drift::for_each_context_pair(corpus, vocab, cfg.window,
                               [&](std::uint32_t, std::uint32_t ctx) {
                                 expected_updates +=
                                     model.tree().codes[ctx].size();
                                 ++expected_steps;
                               });
  CHECK(stats.steps == expected_steps * 2);
  CHECK(stats.node_updates == expected_updates * 2);
}

TEST_CASE("words with shared contexts end up closer than disjoint ones",
          "[embed]") {
  std::string text;
  for (int i = 0; i < 200; ++i) {
    text += "x1 c1 c2\n";
    text += "x2 c1 c2\n";
    text += "r q1 q2\n";
  }
  const auto corpus = corpus_of("A", text);
  const auto vocab = vocab_of(corpus);
  TrainingConfig cfg;
  cfg.dim = 32;
  cfg.epochs = 5;
  cfg.seed = 19;
  cfg.window = 3;
  const auto snap = drift::snapshot(drift::train(corpus, vocab, cfg), "A");

  auto cos = [&](const char* a, const char* b) {
    return oracles::cosine(snap.vec(*snap.index_of(a)),
                           snap.vec(*snap.index_of(b)));
  };
  CHECK(cos("x1", "x2") > cos("x1", "r"));
}

TEST_CASE("non-finite state raises a diverged error with the step", "[embed]") {
  const auto corpus = corpus_of("A", "a b a b");
  const auto vocab = vocab_of(corpus);
  TrainingConfig cfg;
  cfg.dim = 4;
  cfg.epochs = 1;
  cfg.seed = 8;
  TrainingConfig init_only = cfg;
  init_only.epochs = 0;
  auto poisoned = drift::train(corpus, vocab, init_only);
  poisoned.input(0)[0] = std::numeric_limits<double>::infinity();
  poisoned.node(0)[0] = 1.0;  // make the first dot product overflow
  try {
    drift::train(corpus, vocab, cfg, &poisoned);
    FAIL("expected TrainingDivergedError");
  } catch (const drift::TrainingDivergedError& e) {
    CHECK(e.step == 0);
  }
}

TEST_CASE("malformed embedding files are rejected", "[embed]") {
  const auto dir = std::filesystem::temp_directory_path() / "drift_emb_bad";
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& content) {
    std::ofstream f(dir / name, std::ios::binary);
    f << content;
    return dir / name;
  };
  CHECK_THROWS_AS(drift::load_embeddings(write("magic.emb", "NOPE 1 1 2 f\n")),
                  drift::IoError);
  CHECK_THROWS_AS(
      drift::load_embeddings(write("trunc.emb", "DRIFT-EMB 1 1 2 f\nw \x01")),
      drift::IoError);
  CHECK_THROWS_AS(drift::load_embeddings(dir / "absent.emb"), drift::IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("parallel training stays finite", "[embed]") {
  std::string text;
  for (int i = 0; i < 50; ++i) text += "a b c d. e f g h.\n";
  const auto corpus = corpus_of("A", text);
  const auto vocab = vocab_of(corpus);
  TrainingConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 2;
  cfg.seed = 33;
  cfg.threads = 4;
  const auto model = drift::train(corpus, vocab, cfg);
  CHECK(model.all_finite());
}
