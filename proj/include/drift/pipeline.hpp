#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "drift/corpus.hpp"
#include "drift/embed.hpp"
#include "drift/errors.hpp"
#include "drift/scatter.hpp"
#include "drift/shift.hpp"
#include "drift/storyline.hpp"

namespace drift {

struct FieldSpec {
  std::string label;
  std::filesystem::path path;
};

/// Declarative pipeline configuration: a flat key = value file plus CLI
/// flag overrides. Fields are listed in training order; the first one is
/// the base corpus.
struct PipelineConfig {
  std::vector<FieldSpec> fields;
  std::filesystem::path out_dir = "out";
  std::uint64_t min_count = 5;
  TrainingConfig training;
  ShiftConfig shift;
  StorylineConfig storyline;
  int scatter_k = 10;
  double svg_width = 1000;
  double svg_height = 600;

  void validate() const {
    if (fields.size() < 2) throw ConfigError("need at least two fields");
    for (const auto& f : fields) {
      if (f.label.empty()) throw ConfigError("empty field label");
      for (char c : f.label) {
        if (c == '/' || c == '\\' || std::isspace(static_cast<unsigned char>(c))) {
          throw ConfigError("field label must not contain spaces or slashes: " +
                            f.label);
        }
      }
      for (const auto& g : fields) {
        if (&f != &g && f.label == g.label) {
          throw ConfigError("duplicate field label: " + f.label);
        }
      }
    }
    if (min_count < 1) throw ConfigError("min_count must be >= 1");
    training.validate();
    storyline.validate();
    if (shift.k_nn < 1) throw ConfigError("knn must be >= 1");
    if (scatter_k < 1) throw ConfigError("scatter_k must be >= 1");
  }

  // Artifact locations under out_dir.
  std::filesystem::path sentences_path(const std::string& label) const {
    return out_dir / "corpus" / (label + ".sents.txt");
  }
  std::filesystem::path counts_path(const std::string& label) const {
    return out_dir / "corpus" / (label + ".counts.tsv");
  }
  std::filesystem::path vocab_path() const { return out_dir / "vocab.tsv"; }
  std::filesystem::path embeddings_path(const std::string& label) const {
    return out_dir / "emb" / (label + ".emb");
  }
  std::filesystem::path shifts_path() const { return out_dir / "shifts.tsv"; }
  std::filesystem::path plot_path(const std::string& word,
                                  const std::string& kind,
                                  const std::string& ext) const {
    return out_dir / "plots" / (word + "." + kind + "." + ext);
  }

  /// Parses a key = value file. '#' starts a comment; "field = LABEL PATH"
  /// lines repeat and keep their order; relative paths resolve against the
  /// config file's directory.
  static PipelineConfig parse_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config: " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path.parent_path());
  }

  static PipelineConfig parse(const std::string& text,
                              const std::filesystem::path& base_dir) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    auto resolve = [&](const std::string& p) {
      std::filesystem::path fp(p);
      return fp.is_absolute() || base_dir.empty() ? fp : base_dir / fp;
    };
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": expected key = value");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (value.empty()) {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": empty value for " + key);
      }
      try {
        if (key == "field") {
          const auto sp = value.find_first_of(" \t");
          if (sp == std::string::npos) {
            throw ConfigError("field needs a label and a path");
          }
          cfg.fields.push_back(
              {value.substr(0, sp), resolve(trim(value.substr(sp + 1)))});
        } else if (key == "out") {
          cfg.out_dir = resolve(value);
        } else if (key == "seed") {
          cfg.training.seed = std::stoull(value);
        } else if (key == "threads") {
          cfg.training.threads = std::stoi(value);
          cfg.shift.threads = cfg.training.threads;
        } else if (key == "min_count") {
          cfg.min_count = std::stoull(value);
        } else if (key == "window") {
          cfg.training.window = std::stoi(value);
        } else if (key == "dim") {
          cfg.training.dim = std::stoi(value);
        } else if (key == "epochs") {
          cfg.training.epochs = std::stoi(value);
        } else if (key == "learning_rate") {
          cfg.training.initial_learning_rate = std::stod(value);
        } else if (key == "knn") {
          cfg.shift.k_nn = std::stoi(value);
        } else if (key == "rank_fusion") {
          if (value == "true") cfg.shift.rank_fusion = true;
          else if (value == "false") cfg.shift.rank_fusion = false;
          else throw ConfigError("rank_fusion must be true or false");
        } else if (key == "storyline_m") {
          cfg.storyline.top_m = std::stoi(value);
        } else if (key == "storyline_k") {
          cfg.storyline.top_k = std::stoi(value);
        } else if (key == "scatter_k") {
          cfg.scatter_k = std::stoi(value);
        } else if (key == "svg_width") {
          cfg.svg_width = std::stod(value);
        } else if (key == "svg_height") {
          cfg.svg_height = std::stod(value);
        } else {
          throw ConfigError("unknown config key: " + key);
        }
      } catch (const std::invalid_argument&) {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": bad value for " + key);
      } catch (const std::out_of_range&) {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": value out of range for " + key);
      }
    }
    return cfg;
  }
};

// ---------------------------------------------------------------------------
// Vocabulary persistence (pipeline-level): a TSV with one count column per
// field, words sorted lexicographically.
// ---------------------------------------------------------------------------

inline void save_vocabulary(const Vocabulary& vocab,
                            const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for write: " + path.string());
  f << "#fields";
  for (const auto& l : vocab.field_labels()) f << '\t' << l;
  f << "\n#min_count\t" << vocab.min_count() << '\n';
  for (std::uint32_t w = 0; w < vocab.size(); ++w) {
    f << vocab.word(w);
    for (std::size_t fi = 0; fi < vocab.field_labels().size(); ++fi) {
      f << '\t' << vocab.count(w, fi);
    }
    f << '\n';
  }
  if (!f) throw IoError("write failed: " + path.string());
}

inline Vocabulary load_vocabulary(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path.string());
  std::string line;
  auto split_tabs = [](const std::string& s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
      const auto tab = s.find('\t', pos);
      if (tab == std::string::npos) {
        out.push_back(s.substr(pos));
        break;
      }
      out.push_back(s.substr(pos, tab - pos));
      pos = tab + 1;
    }
    return out;
  };

  if (!std::getline(f, line)) throw IoError("empty vocabulary: " + path.string());
  auto head = split_tabs(line);
  if (head.empty() || head[0] != "#fields" || head.size() < 2) {
    throw IoError("bad vocabulary header: " + path.string());
  }
  std::vector<std::string> labels(head.begin() + 1, head.end());

  if (!std::getline(f, line)) throw IoError("missing min_count: " + path.string());
  auto mc = split_tabs(line);
  if (mc.size() != 2 || mc[0] != "#min_count") {
    throw IoError("bad min_count line: " + path.string());
  }
  const std::uint64_t min_count = std::stoull(mc[1]);

  std::vector<std::string> words;
  std::vector<std::vector<std::uint64_t>> counts(labels.size());
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto parts = split_tabs(line);
    if (parts.size() != labels.size() + 1) {
      throw IoError("bad vocabulary row: " + path.string());
    }
    words.push_back(parts[0]);
    for (std::size_t fi = 0; fi < labels.size(); ++fi) {
      counts[fi].push_back(std::stoull(parts[fi + 1]));
    }
  }
  return Vocabulary(std::move(labels), std::move(words), std::move(counts),
                    min_count);
}

// ---------------------------------------------------------------------------
// Pipeline stages. Each stage reads only its predecessor's persisted output.
// ---------------------------------------------------------------------------

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// Phase 1: tokenize every field, persist corpus files, intersect the
/// vocabulary and persist it. Logs the vocabulary size.
inline void cmd_preprocess(const PipelineConfig& cfg, std::ostream& log) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir / "corpus");
  std::vector<Corpus> corpora;
  for (const auto& field : cfg.fields) {
    RawDocument doc{field.label, read_text_file(field.path)};
    Corpus corpus = preprocess(doc);
    save_corpus(corpus, cfg.sentences_path(field.label),
                cfg.counts_path(field.label));
    log << field.label << ": " << corpus.sentences.size() << " sentences, "
        << corpus.token_count() << " tokens\n";
    corpora.push_back(std::move(corpus));
  }
  const Vocabulary vocab = build_vocabulary(corpora, cfg.min_count);
  save_vocabulary(vocab, cfg.vocab_path());
  log << "vocabulary size after intersection: " << vocab.size() << '\n';
}

/// Phase 2: sequential training over the persisted corpora; one DRIFT-EMB
/// file per field.
inline void cmd_train(const PipelineConfig& cfg, std::ostream& log) {
  cfg.validate();
  const Vocabulary vocab = load_vocabulary(cfg.vocab_path());
  std::vector<Corpus> corpora;
  for (const auto& field : cfg.fields) {
    corpora.push_back(
        load_corpus(field.label, cfg.sentences_path(field.label)));
  }
  std::filesystem::create_directories(cfg.out_dir / "emb");
  const auto snaps = train_sequence(corpora, vocab, cfg.training);
  for (const auto& snap : snaps) {
    save_embeddings(snap, cfg.embeddings_path(snap.field_label));
    log << "trained " << snap.field_label << " (" << snap.size() << " x "
        << snap.dim << ")\n";
  }
}

inline EmbeddingSequence load_sequence(const PipelineConfig& cfg) {
  const Vocabulary vocab = load_vocabulary(cfg.vocab_path());
  std::vector<FieldEmbeddings> snaps;
  for (const auto& field : cfg.fields) {
    snaps.push_back(load_embeddings(cfg.embeddings_path(field.label)));
  }
  return EmbeddingSequence::from(std::move(snaps), vocab);
}

/// Phase 3: score every word and persist the ranked TSV.
inline void cmd_score(const PipelineConfig& cfg, std::ostream& log) {
  cfg.validate();
  const auto seq = load_sequence(cfg);
  const auto scores = rank_shifts(seq, cfg.shift);
  std::ofstream f(cfg.shifts_path(), std::ios::binary);
  if (!f) throw IoError("cannot open for write: " + cfg.shifts_path().string());
  write_shift_tsv(f, scores);
  log << "scored " << scores.size() << " words -> "
      << cfg.shifts_path().string() << '\n';
}

/// Levenshtein distance, used for near-miss suggestions on unknown words.
inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline std::vector<std::string> suggest_words(
    const std::vector<std::string>& words, std::string_view query,
    std::size_t limit = 5) {
  std::vector<std::pair<std::size_t, std::string>> ranked;
  ranked.reserve(words.size());
  for (const auto& w : words) {
    ranked.emplace_back(edit_distance(query, w), w);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(limit, ranked.size()); ++i) {
    out.push_back(ranked[i].second);
  }
  return out;
}

/// Phase 4: figures for one word. kind is "scatter" or "storyline"; the
/// storyline also writes its slot-order diagnostic next to the SVG.
inline void cmd_plot(const PipelineConfig& cfg, const std::string& word,
                     const std::string& kind, std::ostream& log) {
  cfg.validate();
  if (kind != "scatter" && kind != "storyline") {
    throw ConfigError("kind must be scatter or storyline");
  }
  const auto seq = load_sequence(cfg);
  if (!seq.snapshots.front().index_of(word)) {
    throw OutOfVocabularyError(word);
  }
  std::filesystem::create_directories(cfg.out_dir / "plots");

  if (kind == "scatter") {
    std::vector<std::string> dropped;
    const auto scene = build_scatter_scene(word, seq, cfg.scatter_k, &dropped);
    for (const auto& w : dropped) {
      log << "warning: neighbor \"" << w
          << "\" has a degenerate mean vector; not plotted\n";
    }
    ScatterStyle style;
    style.width = cfg.svg_width;
    style.height = cfg.svg_height;
    style.per_segment_k = cfg.scatter_k;
    const auto path = cfg.plot_path(word, "scatter", "svg");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for write: " + path.string());
    f << render_scatter(scene, style);
    log << "wrote " << path.string() << '\n';
  } else {
    const auto timeline = build_timeline(word, seq, cfg.storyline);
    const auto lay = layout(timeline);
    StorylineStyle style;
    style.width = cfg.svg_width;
    style.height = cfg.svg_height;
    const auto path = cfg.plot_path(word, "storyline", "svg");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for write: " + path.string());
    f << render_storyline(timeline, lay, style);
    const auto diag_path = cfg.plot_path(word, "storyline", "txt");
    std::ofstream df(diag_path, std::ios::binary);
    if (!df) throw IoError("cannot open for write: " + diag_path.string());
    write_timeline_diagnostic(df, timeline, lay);
    log << "wrote " << path.string() << " and " << diag_path.string() << '\n';
  }
}

}  // namespace drift
