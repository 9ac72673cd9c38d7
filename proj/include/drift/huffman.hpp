#pragma once

#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "drift/corpus.hpp"
#include "drift/errors.hpp"

namespace drift {

/// Huffman code over the vocabulary, used as the output hierarchy of the
/// hierarchical softmax. Leaves are vocabulary words, internal nodes carry
/// the trainable output parameters. For each word, codes[w][k] is the branch
/// bit taken below internal node paths[w][k]; paths run root to leaf, so
/// codes[w].size() == paths[w].size().
struct HuffmanTree {
  std::vector<std::vector<std::uint8_t>> codes;
  std::vector<std::vector<std::uint32_t>> paths;

  std::size_t leaf_count() const { return codes.size(); }
  std::size_t node_count() const { return codes.empty() ? 0 : codes.size() - 1; }

  std::size_t max_code_length() const {
    std::size_t m = 0;
    for (const auto& c : codes) m = std::max(m, c.size());
    return m;
  }

  /// Expected code length under the given frequency distribution.
  double expected_code_length(const std::vector<std::uint64_t>& counts) const {
    long double total = 0, weighted = 0;
    for (std::size_t i = 0; i < codes.size(); ++i) {
      total += counts[i];
      weighted += static_cast<long double>(counts[i]) * codes[i].size();
    }
    return total > 0 ? static_cast<double>(weighted / total) : 0.0;
  }
};

/// Builds the optimal prefix code over the given counts. Deterministic:
/// among equal-count nodes the one containing the lexicographically smallest
/// word is merged first; the first node popped becomes the 0 branch.
/// `counts` is indexed by vocabulary order (lexicographic words), so index
/// order doubles as lexicographic order of the smallest contained word.
inline HuffmanTree build_huffman(const std::vector<std::uint64_t>& counts) {
  const std::size_t n = counts.size();
  if (n < 2) {
    throw VocabularyTooSmallError(
        "need at least 2 words to build a Huffman tree, got " +
        std::to_string(n));
  }

  struct Node {
    std::uint64_t count;
    std::uint32_t min_word;  // smallest contained leaf index
    std::int32_t left = -1, right = -1;  // node ids; leaves are [0, n)
  };
  std::vector<Node> nodes;
  nodes.reserve(2 * n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (counts[i] == 0) throw ConfigError("zero word count in Huffman build");
    nodes.push_back({counts[i], static_cast<std::uint32_t>(i)});
  }

  auto greater = [&](std::uint32_t a, std::uint32_t b) {
    if (nodes[a].count != nodes[b].count) return nodes[a].count > nodes[b].count;
    return nodes[a].min_word > nodes[b].min_word;
  };
  std::priority_queue<std::uint32_t, std::vector<std::uint32_t>,
                      decltype(greater)>
      heap(greater);
  for (std::uint32_t i = 0; i < n; ++i) heap.push(i);

  while (heap.size() > 1) {
    const std::uint32_t a = heap.top();
    heap.pop();
    const std::uint32_t b = heap.top();
    heap.pop();
    Node parent{nodes[a].count + nodes[b].count,
                std::min(nodes[a].min_word, nodes[b].min_word),
                static_cast<std::int32_t>(a), static_cast<std::int32_t>(b)};
    nodes.push_back(parent);
    heap.push(static_cast<std::uint32_t>(nodes.size() - 1));
  }

  HuffmanTree tree;
  tree.codes.resize(n);
  tree.paths.resize(n);

  // Internal node ids in the model are creation order: node (n + k) in the
  // merge sequence becomes parameter row k.
  struct Frame {
    std::uint32_t node;
    std::vector<std::uint8_t> code;
    std::vector<std::uint32_t> path;
  };
  std::vector<Frame> stack;
  stack.push_back({static_cast<std::uint32_t>(nodes.size() - 1), {}, {}});
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const Node& nd = nodes[f.node];
    if (nd.left < 0) {
      tree.codes[f.node] = std::move(f.code);
      tree.paths[f.node] = std::move(f.path);
      continue;
    }
    f.path.push_back(f.node - static_cast<std::uint32_t>(n));
    Frame left{static_cast<std::uint32_t>(nd.left), f.code, f.path};
    left.code.push_back(0);
    Frame right{static_cast<std::uint32_t>(nd.right), std::move(f.code),
                std::move(f.path)};
    right.code.push_back(1);
    stack.push_back(std::move(left));
    stack.push_back(std::move(right));
  }
  return tree;
}

/// Convenience overload over a field of the vocabulary.
inline HuffmanTree build_huffman(const Vocabulary& vocab,
                                 std::size_t field_idx) {
  std::vector<std::uint64_t> counts(vocab.size());
  for (std::uint32_t i = 0; i < vocab.size(); ++i) {
    counts[i] = vocab.count(i, field_idx);
  }
  return build_huffman(counts);
}

}  // namespace drift
