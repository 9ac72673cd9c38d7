#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <set>

#include "drift/corpus.hpp"
#include "drift/rng.hpp"

using drift::Corpus;
using drift::RawDocument;
using drift::Vocabulary;

namespace {

Corpus corpus_of(const std::string& label, const std::string& text) {
  return drift::preprocess({label, text});
}

std::vector<std::string> words_only(const std::vector<Corpus>& cs,
                                    std::uint64_t min_count) {
  return drift::build_vocabulary(cs, min_count).words();
}

}  // namespace

TEST_CASE("preprocess splits sentences and lowercases", "[corpus]") {
  const auto c = corpus_of("f", "It is not fair! Do all the work.");
  REQUIRE(c.sentences.size() == 2);
  CHECK(c.sentences[0] == std::vector<std::string>{"it", "is", "not", "fair"});
  CHECK(c.sentences[1] == std::vector<std::string>{"do", "all", "the", "work"});
}

TEST_CASE("preprocess of empty text yields an empty corpus", "[corpus]") {
  const auto c = corpus_of("f", "");
  CHECK(c.sentences.empty());
  CHECK(c.word_counts.empty());
}

TEST_CASE("preprocess counts tokens", "[corpus]") {
  const auto c = corpus_of("f", "a a a.");
  REQUIRE(c.sentences.size() == 1);
  CHECK(c.sentences[0] == std::vector<std::string>{"a", "a", "a"});
  CHECK(c.word_counts.at("a") == 3);
}

TEST_CASE("preprocess merges case variants and strips punctuation", "[corpus]") {
  const auto c = corpus_of("f", "Heart, heart; HEART \xc2\xab\xe2\x80\x94quote\xe2\x80\x94\xc2\xbb 42 don't");
  CHECK(c.word_counts.at("heart") == 3);
  CHECK(c.word_counts.at("quote") == 1);  // guillemets and em-dashes removed
  CHECK(c.word_counts.at("42") == 1);     // digits retained
  CHECK(c.word_counts.at("dont") == 1);   // apostrophe removed, no split
}

TEST_CASE("preprocess splits on newlines", "[corpus]") {
  const auto c = corpus_of("f", "one two\nthree four");
  REQUIRE(c.sentences.size() == 2);
  CHECK(c.sentences[0] == std::vector<std::string>{"one", "two"});
  CHECK(c.sentences[1] == std::vector<std::string>{"three", "four"});
}

TEST_CASE("preprocess reports the byte offset of invalid UTF-8", "[corpus]") {
  try {
    corpus_of("f", std::string("ab\xffz"));
    FAIL("expected DecodeError");
  } catch (const drift::DecodeError& e) {
    CHECK(e.byte_offset == 2);
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
  // Truncated multi-byte sequence at the end.
  CHECK_THROWS_AS(corpus_of("f", std::string("abc\xe2\x80")), drift::DecodeError);
  // Overlong encoding of '/'.
  CHECK_THROWS_AS(corpus_of("f", std::string("\xc0\xaf")), drift::DecodeError);
}

TEST_CASE("preprocess count invariant holds on random text", "[corpus]") {
  drift::Rng rng(7);
  const std::vector<std::string> pool = {"alpha", "beta",  "gamma", "d3lta",
                                         "Echo",  "FOX!",  "g.h",   "iota"};
  for (int round = 0; round < 20; ++round) {
    std::string text;
    for (int i = 0; i < 60; ++i) {
      text += pool[rng.uniform_int(pool.size())];
      text += rng.uniform() < 0.15 ? ". " : " ";
    }
    const auto c = corpus_of("f", text);
    std::uint64_t total = 0;
    for (const auto& [w, n] : c.word_counts) {
      CHECK(!w.empty());
      total += n;
    }
    CHECK(total == c.token_count());
  }
}

TEST_CASE("preprocess is idempotent over its own serialized output", "[corpus]") {
  const auto c = corpus_of(
      "f", "The Quick (brown) fox! Jumps; over 2 lazy dogs. Encore une fois?");
  std::string serialized;
  for (const auto& s : c.sentences) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) serialized += ' ';
      serialized += s[i];
    }
    serialized += '\n';
  }
  const auto again = corpus_of("f", serialized);
  CHECK(again.sentences == c.sentences);
  CHECK(again.word_counts == c.word_counts);
}

TEST_CASE("build_vocabulary intersects the field word sets", "[corpus]") {
  const auto a = corpus_of("A", "a a a a a b b b b b c c c c c");
  const auto b = corpus_of("B", "b b b b b c c c c c d d d d d");
  CHECK(words_only({a, b}, 1) == std::vector<std::string>{"b", "c"});
}

TEST_CASE("build_vocabulary applies min_count per field", "[corpus]") {
  const auto a = corpus_of("A", "a b b b b b b b b b");
  const auto b = corpus_of("B", "a a a a a a a a a b b b b b b b b b");
  CHECK(words_only({a, b}, 5) == std::vector<std::string>{"b"});
}

TEST_CASE("build_vocabulary keeps a single shared word across four fields",
          "[corpus]") {
  std::vector<Corpus> cs;
  const std::vector<std::string> uniq = {"p", "q", "r", "s"};
  for (int f = 0; f < 4; ++f) {
    cs.push_back(corpus_of("F" + std::to_string(f), "shared " + uniq[f]));
  }
  const auto vocab = drift::build_vocabulary(cs, 1);
  REQUIRE(vocab.words() == std::vector<std::string>{"shared"});
  for (std::size_t f = 0; f < 4; ++f) CHECK(vocab.count(0, f) == 1);
}

TEST_CASE("build_vocabulary rejects bad input", "[corpus]") {
  const auto a = corpus_of("A", "x y z");
  CHECK_THROWS_AS(drift::build_vocabulary({a}, 1), drift::ConfigError);
  CHECK_THROWS_AS(drift::build_vocabulary({a, a}, 1), drift::ConfigError);
}

TEST_CASE("context_pairs enumerates the window", "[corpus]") {
  const auto c = corpus_of("f", "a b c");
  const auto vocab = drift::build_vocabulary({c, corpus_of("g", "a b c")}, 1);
  using P = std::pair<std::string, std::string>;
  CHECK(drift::context_pairs(c, vocab, 1) ==
        std::vector<P>{{"a", "b"}, {"b", "a"}, {"b", "c"}, {"c", "b"}});

  CHECK(drift::context_pairs(corpus_of("f", "a"), vocab, 3).empty());

  const auto c5 = corpus_of("f", "a b c d e");
  const auto vocab5 =
      drift::build_vocabulary({c5, corpus_of("g", "a b c d e")}, 1);
  std::set<std::string> around_c;
  for (const auto& [center, ctx] : drift::context_pairs(c5, vocab5, 2)) {
    if (center == "c") around_c.insert(ctx);
  }
  CHECK(around_c == std::set<std::string>{"a", "b", "d", "e"});
}

TEST_CASE("out-of-vocabulary tokens keep their window positions", "[corpus]") {
  // "x" is not shared, so it is OOV; it must still block the a..b adjacency.
  const auto c = corpus_of("f", "a x b");
  const auto vocab = drift::build_vocabulary({c, corpus_of("g", "a b")}, 1);
  CHECK(drift::context_pairs(c, vocab, 1).empty());
  using P = std::pair<std::string, std::string>;
  CHECK(drift::context_pairs(c, vocab, 2) ==
        std::vector<P>{{"a", "b"}, {"b", "a"}});
}

TEST_CASE("context pair symmetry and count conservation", "[corpus]") {
  drift::Rng rng(11);
  const std::vector<std::string> alphabet = {"a", "b", "c", "d"};
  for (int round = 0; round < 30; ++round) {
    const int len = 1 + static_cast<int>(rng.uniform_int(8));
    std::string text;
    for (int i = 0; i < len; ++i) {
      text += alphabet[rng.uniform_int(alphabet.size())];
      text += ' ';
    }
    const auto c = corpus_of("f", text);
    const auto vocab =
        drift::build_vocabulary({corpus_of("x", "a b c d"),
                                 corpus_of("y", "a b c d")},
                                1);
    const int window = 1 + static_cast<int>(rng.uniform_int(4));
    const auto pairs = drift::context_pairs(c, vocab, window);

    // Symmetry: (u,v) appears iff (v,u) appears.
    std::multiset<std::pair<std::string, std::string>> bag(pairs.begin(),
                                                           pairs.end());
    for (const auto& [u, v] : pairs) {
      CHECK(bag.count({v, u}) == bag.count({u, v}));
    }

    // Count conservation vs direct enumeration over positions.
    std::uint64_t expected = 0;
    const auto L = static_cast<std::ptrdiff_t>(c.sentences[0].size());
    for (std::ptrdiff_t i = 0; i < L; ++i) {
      for (std::ptrdiff_t j = -window; j <= window; ++j) {
        if (j != 0 && i + j >= 0 && i + j < L) ++expected;
      }
    }
    CHECK(pairs.size() == expected);
  }
}

TEST_CASE("corpus round-trips through its line format", "[corpus]") {
  const auto dir = std::filesystem::temp_directory_path() / "drift_corpus_test";
  std::filesystem::create_directories(dir);
  const auto c = corpus_of("f", "the cat sat. the dog too! end");
  drift::save_corpus(c, dir / "f.sents.txt", dir / "f.counts.tsv");
  const auto back = drift::load_corpus("f", dir / "f.sents.txt");
  CHECK(back.sentences == c.sentences);
  CHECK(back.word_counts == c.word_counts);

  // The counts sidecar is sorted lexicographically.
  std::ifstream cf(dir / "f.counts.tsv");
  std::string line, prev;
  while (std::getline(cf, line)) {
    const auto word = line.substr(0, line.find('\t'));
    CHECK(prev < word);
    prev = word;
  }
  std::filesystem::remove_all(dir);
}
