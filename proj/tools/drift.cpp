// drift: train field-specific word embeddings, score semantic shift, and
// render scatter/storyline figures.
//
// Exit codes: 0 ok, 2 input error, 3 query error, 4 training diverged.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "drift/drift.hpp"

namespace {

struct GlobalFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out_dir;
};

drift::PipelineConfig load_config(const GlobalFlags& flags) {
  auto cfg = drift::PipelineConfig::parse_file(flags.config_path);
  if (flags.seed) cfg.training.seed = *flags.seed;
  if (flags.threads) {
    cfg.training.threads = *flags.threads;
    cfg.shift.threads = *flags.threads;
  }
  if (flags.out_dir) cfg.out_dir = *flags.out_dir;
  cfg.validate();
  return cfg;
}

int run(int argc, char** argv) {
  CLI::App app{"field-specific word embeddings and semantic-shift figures"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--config", flags.config_path, "pipeline config file")
      ->required();
  app.add_option("--seed", flags.seed, "override the config seed");
  app.add_option("--threads", flags.threads,
                 "worker threads (1 = deterministic)");
  app.add_option("--out", flags.out_dir, "override the output directory");

  auto* preprocess = app.add_subcommand(
      "preprocess", "tokenize the field corpora and build the vocabulary");
  auto* train = app.add_subcommand(
      "train", "train embeddings sequentially over the fields");
  auto* score =
      app.add_subcommand("score", "rank words by semantic-shift score");
  auto* plot = app.add_subcommand("plot", "render a figure for one word");
  std::string word, kind = "scatter";
  plot->add_option("--word", word, "target word")->required();
  plot->add_option("--kind", kind, "scatter or storyline")
      ->check(CLI::IsMember({"scatter", "storyline"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto cfg = load_config(flags);
    if (preprocess->parsed()) {
      drift::cmd_preprocess(cfg, std::cout);
    } else if (train->parsed()) {
      drift::cmd_train(cfg, std::cout);
    } else if (score->parsed()) {
      drift::cmd_score(cfg, std::cout);
    } else if (plot->parsed()) {
      drift::cmd_plot(cfg, word, kind, std::cout);
    }
  } catch (const drift::OutOfVocabularyError& e) {
    std::cerr << "error: " << e.what() << '\n';
    try {
      const auto cfg = load_config(flags);
      const auto vocab = drift::load_vocabulary(cfg.vocab_path());
      std::cerr << "closest vocabulary words:";
      for (const auto& w : drift::suggest_words(vocab.words(), e.word)) {
        std::cerr << ' ' << w;
      }
      std::cerr << '\n';
    } catch (const std::exception&) {
      // No vocabulary to suggest from.
    }
    return 3;
  } catch (const drift::TrainingDivergedError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
