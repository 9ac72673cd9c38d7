// Acceptance suite: prints one pass/fail line per criterion and exits
// nonzero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "drift/drift.hpp"
#include "oracles.hpp"
#include "pca_oracle.hpp"

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

struct Check {
  std::string detail;
  bool ok = true;

  void require(bool cond, const std::string& msg) {
    if (!cond && ok) {
      ok = false;
      detail = msg;
    }
  }
};

void criterion(int number, const std::string& name, double time_limit_s,
               const std::function<void(Check&)>& body) {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(check);
  } catch (const std::exception& e) {
    check.require(false, std::string("exception: ") + e.what());
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  check.require(elapsed < time_limit_s,
                "runtime " + std::to_string(elapsed) + "s exceeds " +
                    std::to_string(time_limit_s) + "s");
  if (check.ok) {
    std::printf("[PASS] criterion %2d: %s (%.2fs)\n", number, name.c_str(),
                elapsed);
  } else {
    std::printf("[FAIL] criterion %2d: %s (%.2fs) -- %s\n", number,
                name.c_str(), elapsed, check.detail.c_str());
    ++g_failures;
  }
  std::fflush(stdout);
}

std::vector<std::string> numbered_words(int n) {
  std::vector<std::string> words;
  for (int i = 0; i < n; ++i) {
    auto s = std::to_string(i);
    words.push_back("w" + std::string(3 - s.size(), '0') + s);
  }
  return words;
}

drift::EmbeddingModel random_model(int n, int dim, std::uint64_t seed) {
  auto vocab = oracles::make_vocab({"A"}, numbered_words(n), 5, 1);
  std::vector<std::uint64_t> counts(n);
  drift::Rng crng(seed + 999);
  for (auto& c : counts) c = 1 + crng.uniform_int(50);
  drift::EmbeddingModel model(vocab, drift::build_huffman(counts), dim);
  drift::Rng rng(seed);
  for (std::uint32_t w = 0; w < vocab.size(); ++w) {
    for (auto& x : model.input(w)) x = rng.uniform(-0.5, 0.5);
  }
  for (std::uint32_t k = 0; k + 1 < vocab.size(); ++k) {
    for (auto& x : model.node(k)) x = rng.uniform(-0.5, 0.5);
  }
  return model;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw drift::IoError("cannot open: " + p.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(DRIFT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Synthetic two-field setup for the shift-detection criterion: "bat" keeps
// animal contexts in field A and sports contexts in field B, while the
// control tokens see identical contexts in both fields.
std::pair<std::string, std::string> shift_corpora_text() {
  const std::vector<std::string> animals = {"wing", "cave", "fur",  "claw",
                                            "nest", "prey", "moth", "dusk",
                                            "tail", "roost"};
  const std::vector<std::string> sports = {"ball",  "glove",  "swing", "pitch",
                                           "team",  "arena",  "score", "inning",
                                           "coach", "crowd"};
  auto block = [](const std::string& lead,
                  const std::vector<std::string>& pool, int reps) {
    std::string out;
    for (int r = 0; r < reps; ++r) {
      out += lead.empty() ? pool[r % pool.size()] : lead;
      out += ' ';
      out += pool[(r + 1) % pool.size()];
      out += ' ';
      out += pool[(r * 3 + 2) % pool.size()];
      out += ".\n";
    }
    return out;
  };
  std::string controls;
  for (int k = 0; k < 20; ++k) {
    auto kk = std::to_string(k);
    const std::string name = "ctrl" + std::string(2 - kk.size(), '0') + kk;
    for (int rep = 0; rep < 20; ++rep) {
      controls += name + " cx" + std::to_string((k + rep) % 10) + " cx" +
                  std::to_string((k + 3 * rep + 5) % 10) + ".\n";
    }
  }
  std::string a = block("bat", animals, 150) + block("", animals, 150) +
                  block("", sports, 150) + controls;
  std::string b = block("bat", sports, 150) + block("", animals, 150) +
                  block("", sports, 150) + controls;
  return {a, b};
}

}  // namespace

int main() {
  const fs::path data_dir = DRIFT_DATA_DIR;
  const fs::path work =
      fs::temp_directory_path() / "drift_acceptance_work";
  fs::remove_all(work);
  fs::create_directories(work);

  criterion(1, "hierarchical softmax normalizes", 1.0, [&](Check& c) {
    for (int n : {3, 8, 16}) {
      auto model = random_model(n, 8, 11 + n);
      for (std::uint32_t center = 0; center < static_cast<std::uint32_t>(n);
           ++center) {
        double sum = 0;
        for (std::uint32_t ctx = 0; ctx < static_cast<std::uint32_t>(n);
             ++ctx) {
          sum += drift::context_probability_ids(model, center, ctx);
        }
        c.require(std::abs(sum - 1.0) < 1e-9,
                  "sum deviates by " + std::to_string(std::abs(sum - 1.0)));
      }
    }
  });

  criterion(2, "analytic gradient matches finite differences", 5.0,
            [&](Check& c) {
    auto model = random_model(5, 4, 77);
    drift::Rng rng(7);
    const double h = 1e-5;
    for (int round = 0; round < 100; ++round) {
      const auto center = static_cast<std::uint32_t>(rng.uniform_int(5));
      auto ctx = static_cast<std::uint32_t>(rng.uniform_int(5));
      if (ctx == center) ctx = (ctx + 1) % 5;
      const auto grad = drift::pair_gradient(model, center, ctx);

      auto fd = [&](std::span<double> coord, std::size_t j) {
        const double orig = coord[j];
        coord[j] = orig + h;
        const double up = drift::pair_loss(model, center, ctx);
        coord[j] = orig - h;
        const double down = drift::pair_loss(model, center, ctx);
        coord[j] = orig;
        return (up - down) / (2 * h);
      };
      auto compare = [&](double analytic, double numeric) {
        const double denom = std::max(std::abs(analytic), std::abs(numeric));
        if (denom > 1e-7) {
          c.require(std::abs(analytic - numeric) / denom < 1e-4,
                    "relative error " +
                        std::to_string(std::abs(analytic - numeric) / denom));
        }
      };
      for (std::size_t j = 0; j < 4; ++j) {
        compare(grad.center[j], fd(model.input(center), j));
      }
      for (const auto& [node, gu] : grad.nodes) {
        for (std::size_t j = 0; j < 4; ++j) {
          compare(gu[j], fd(model.node(node), j));
        }
      }
    }
  });

  criterion(3, "objective strictly descends on the toy corpus", 30.0,
            [&](Check& c) {
    const auto corpus = drift::preprocess(
        {"toy", slurp(data_dir / "toy.txt")});
    std::vector<std::string> words;
    std::vector<std::uint64_t> counts;
    for (const auto& [w, n] : corpus.word_counts) {
      words.push_back(w);
      counts.push_back(n);
    }
    const drift::Vocabulary vocab({"toy"}, words, {counts}, 1);

    drift::TrainingConfig cfg;
    cfg.dim = 8;
    cfg.epochs = 5;
    cfg.seed = 42;
    drift::TrainingConfig init_only = cfg;
    init_only.epochs = 0;
    const auto initial = drift::train(corpus, vocab, init_only);
    const double j0 = drift::corpus_loss(initial, corpus, cfg.window);

    std::vector<double> epoch_losses;
    drift::train(corpus, vocab, cfg, nullptr, nullptr, &epoch_losses);
    c.require(epoch_losses.size() == 5, "expected 5 epoch losses");
    double prev = j0;
    for (double j : epoch_losses) {
      c.require(j < prev, "loss did not strictly decrease");
      prev = j;
    }
    c.require(epoch_losses.back() < 0.9 * j0,
              "final J " + std::to_string(epoch_losses.back()) +
                  " not below 0.9 x " + std::to_string(j0));
  });

  criterion(4, "shift metrics match brute-force transcriptions", 30.0,
            [&](Check& c) {
    drift::Rng rng(404);
    drift::ShiftConfig cfg;
    cfg.k_nn = 20;
    for (int round = 0; round < 200; ++round) {
      const int n = 21 + static_cast<int>(rng.uniform_int(30));
      const int segs = 2 + static_cast<int>(rng.uniform_int(3));
      const auto seq = oracles::random_sequence(rng, n, segs, 6);
      for (std::uint32_t w = 0; w < static_cast<std::uint32_t>(n);
           w += 1 + n / 4) {
        c.require(std::abs(drift::stepwise_euclidean(w, seq) -
                           oracles::stepwise_euclidean_brute(w, seq)) < 1e-9,
                  "euclidean mismatch");
        c.require(std::abs(drift::neighbor_distance(w, seq, cfg) -
                           oracles::neighbor_distance_brute(w, seq, cfg.k_nn)) <
                      1e-9,
                  "neighbor mismatch");
      }
    }
  });

  criterion(5, "a context-flipping word ranks in the top 3", 300.0,
            [&](Check& c) {
    const auto [text_a, text_b] = shift_corpora_text();
    const auto corpus_a = drift::preprocess({"A", text_a});
    const auto corpus_b = drift::preprocess({"B", text_b});
    const auto vocab = drift::build_vocabulary({corpus_a, corpus_b}, 5);
    c.require(vocab.contains("bat"), "bat missing from vocabulary");
    c.require(vocab.size() > 20, "vocabulary too small for K=20");

    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      drift::TrainingConfig cfg;
      cfg.dim = 32;
      cfg.epochs = 5;
      cfg.seed = seed;
      const auto snaps =
          drift::train_sequence({corpus_a, corpus_b}, vocab, cfg);
      const auto seq = drift::EmbeddingSequence::from(snaps, vocab);
      drift::ShiftConfig sc;
      sc.k_nn = 20;
      const auto scores = drift::rank_shifts(seq, sc);
      for (int i = 0; i < 3; ++i) {
        if (scores[i].word == "bat") {
          ++hits;
          break;
        }
      }
    }
    c.require(hits >= 9,
              "bat in top 3 for only " + std::to_string(hits) + "/10 seeds");
  });

  criterion(6, "cluster rule matches the exhaustive oracle", 10.0,
            [&](Check& c) {
    drift::Rng rng(606);
    const int m_choices[] = {1, 2, 4};
    const int k_choices[] = {4, 8, 32};
    for (int round = 0; round < 100; ++round) {
      drift::StorylineConfig cfg;
      do {
        cfg.top_m = m_choices[rng.uniform_int(3)];
        cfg.top_k = k_choices[rng.uniform_int(3)];
      } while (cfg.top_m >= cfg.top_k);
      const int n = cfg.top_k + 2 + static_cast<int>(rng.uniform_int(6));
      const int segs = 2 + static_cast<int>(rng.uniform_int(3));
      const auto seq = oracles::random_sequence(rng, n, segs, 5);
      const auto target = static_cast<std::uint32_t>(rng.uniform_int(n));
      const auto tl = drift::build_timeline(seq.words()[target], seq, cfg);
      const auto want =
          oracles::timeline_rule_brute(target, seq, cfg.top_m, cfg.top_k);
      c.require(tl.clusters == want, "cluster rule mismatch");
    }
  });

  criterion(7, "layout reaches the exact optimum at small scale", 60.0,
            [&](Check& c) {
    drift::Rng rng(707);
    int exact = 0;
    for (int round = 0; round < 100; ++round) {
      const int segs = 2 + static_cast<int>(rng.uniform_int(3));
      const int pool = 1 + static_cast<int>(rng.uniform_int(5));  // <= 6 lines
      drift::ClusterTimeline tl;
      tl.target = "tt";
      for (int e = 0; e < segs; ++e) {
        tl.segment_labels.push_back("s" + std::to_string(e));
        std::vector<std::string> cluster{"tt"};
        for (int w = 0; w < pool; ++w) {
          if (rng.uniform() < 0.5) cluster.push_back("w" + std::to_string(w));
        }
        tl.clusters.push_back(std::move(cluster));
      }
      const int best = oracles::exact_min_crossings(tl);
      const auto lay = drift::layout(tl);
      c.require(lay.crossings <= best + 1,
                "layout " + std::to_string(lay.crossings) + " vs optimum " +
                    std::to_string(best));
      if (lay.crossings == best) ++exact;
    }
    c.require(exact >= 95,
              "exact optimum in only " + std::to_string(exact) + "/100");
  });

  criterion(8, "PCA matches the dense eigensolver oracle", 5.0, [&](Check& c) {
    drift::Rng rng(808);
    for (int round = 0; round < 50; ++round) {
      const int n = 4 + static_cast<int>(rng.uniform_int(30));
      const int d = 2 + static_cast<int>(rng.uniform_int(20));
      std::vector<std::vector<double>> pts(n, std::vector<double>(d));
      for (auto& p : pts) {
        for (auto& x : p) x = rng.uniform(-2.0, 2.0);
      }
      const auto got = drift::reduce_2d(pts);
      const auto want = oracles::pca2_eigen(pts);
      for (int i = 0; i < n; ++i) {
        c.require(std::abs(got[i][0] - want[i][0]) < 1e-6 &&
                      std::abs(got[i][1] - want[i][1]) < 1e-6,
                  "projection mismatch");
      }
    }
  });

  criterion(9, "end-to-end pipeline is deterministic and round-trips", 600.0,
            [&](Check& c) {
    const std::string conf =
        "--config " + (data_dir / "sample.conf").string() + " --threads 1";
    const std::vector<fs::path> runs = {work / "run1", work / "run2"};
    for (const auto& out : runs) {
      const std::string base = conf + " --out " + out.string() + " ";
      c.require(run_cli(base + "preprocess") == 0, "preprocess failed");
      c.require(run_cli(base + "train") == 0, "train failed");
      c.require(run_cli(base + "score") == 0, "score failed");
      c.require(run_cli(base + "plot --word heart --kind scatter") == 0,
                "scatter plot failed");
      c.require(run_cli(base + "plot --word heart --kind storyline") == 0,
                "storyline plot failed");
      if (!c.ok) return;
    }

    const std::vector<std::string> labels = {"wikipedia", "fiction",
                                             "religious", "politics"};
    std::vector<fs::path> artifacts = {"vocab.tsv", "shifts.tsv",
                                       fs::path("plots") / "heart.scatter.svg",
                                       fs::path("plots") / "heart.storyline.svg",
                                       fs::path("plots") / "heart.storyline.txt"};
    for (const auto& l : labels) {
      artifacts.push_back(fs::path("corpus") / (l + ".sents.txt"));
      artifacts.push_back(fs::path("corpus") / (l + ".counts.tsv"));
      artifacts.push_back(fs::path("emb") / (l + ".emb"));
    }
    for (const auto& rel : artifacts) {
      c.require(slurp(runs[0] / rel) == slurp(runs[1] / rel),
                "artifact differs between runs: " + rel.string());
    }

    for (const auto& l : labels) {
      const auto path = runs[0] / "emb" / (l + ".emb");
      const auto emb = drift::load_embeddings(path);
      const auto copy = work / (l + ".roundtrip.emb");
      drift::save_embeddings(emb, copy);
      c.require(slurp(copy) == slurp(path),
                "embedding file does not round-trip: " + path.string());
    }
  });

  criterion(10, "Huffman cost stays logarithmic and updates are counted",
            60.0, [&](Check& c) {
    for (int n : {1000, 10000, 100000}) {
      std::vector<std::uint64_t> counts(n);
      for (int i = 0; i < n; ++i) {
        counts[i] = std::max<std::uint64_t>(1, 10000000 / (i + 1));
      }
      const auto tree = drift::build_huffman(counts);
      c.require(tree.max_code_length() <= static_cast<std::size_t>(n - 1),
                "max code length exceeds |V|-1");
      const double mean = tree.expected_code_length(counts);
      const double ratio = mean / std::log2(static_cast<double>(n));
      c.require(ratio <= 1.5, "mean path length ratio " +
                                  std::to_string(ratio) + " exceeds 1.5");
    }

    const auto corpus = drift::preprocess(
        {"A", "one two three four five one two three. four five one two.\n"});
    std::vector<std::string> words;
    std::vector<std::uint64_t> counts;
    for (const auto& [w, n] : corpus.word_counts) {
      words.push_back(w);
      counts.push_back(n);
    }
    const drift::Vocabulary vocab({"A"}, words, {counts}, 1);
    drift::TrainingConfig cfg;
    cfg.dim = 4;
    cfg.epochs = 3;
    drift::TrainStats stats;
    const auto model = drift::train(corpus, vocab, cfg, nullptr, &stats);
    std::uint64_t expected = 0, steps = 0;
    drift::for_each_context_pair(corpus, vocab, cfg.window,
                                 [&](std::uint32_t, std::uint32_t ctx) {
                                   expected += model.tree().codes[ctx].size();
                                   ++steps;
                                 });
    c.require(stats.node_updates == expected * 3,
              "node updates do not equal summed path lengths");
    c.require(stats.steps == steps * 3, "step count mismatch");
  });

  fs::remove_all(work);
  if (g_failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criterion(s) failed\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
