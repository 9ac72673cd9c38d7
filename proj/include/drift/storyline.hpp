#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "drift/errors.hpp"
#include "drift/rng.hpp"
#include "drift/shift.hpp"
#include "drift/svg.hpp"

namespace drift {

struct StorylineConfig {
  int top_m = 4;
  int top_k = 32;

  void validate() const {
    if (top_m < 1) throw ConfigError("M must be >= 1");
    if (top_m >= top_k) throw ConfigError("M must be < K");
  }
};

/// Per-segment clusters around the target word. Every cluster contains the
/// target first, then the segment's top-M neighbors, then carried-over words.
struct ClusterTimeline {
  std::string target;
  std::vector<std::string> segment_labels;
  std::vector<std::vector<std::string>> clusters;
};

/// Cluster rule: cluster_e = {target} + topM_e + (topM_{e-1} that are still
/// inside topK_e). Segment 0 has no carry-over.
inline ClusterTimeline build_timeline(std::string_view word,
                                      const EmbeddingSequence& seq,
                                      const StorylineConfig& config) {
  config.validate();
  seq.validate();
  if (static_cast<std::size_t>(config.top_k) >= seq.words().size()) {
    throw ConfigError("K must be < |V|");
  }
  auto idx = seq.snapshots.front().index_of(word);
  if (!idx) throw OutOfVocabularyError(std::string(word));

  ClusterTimeline tl;
  tl.target = std::string(word);
  tl.segment_labels = seq.segment_labels();

  std::vector<std::uint32_t> prev_top_m;
  for (const auto& snap : seq.snapshots) {
    const auto top_k = nearest_neighbors(snap, *idx, config.top_k);
    const std::vector<std::uint32_t> top_m(
        top_k.begin(), top_k.begin() + config.top_m);

    std::vector<std::string> cluster{tl.target};
    for (auto w : top_m) cluster.push_back(seq.words()[w]);
    for (auto w : prev_top_m) {
      if (std::find(top_m.begin(), top_m.end(), w) != top_m.end()) continue;
      if (std::find(top_k.begin(), top_k.end(), w) != top_k.end()) {
        cluster.push_back(seq.words()[w]);
      }
    }
    tl.clusters.push_back(std::move(cluster));
    prev_top_m = top_m;
  }
  return tl;
}

/// Slot assignment for every line. A word's line is present from its first
/// cluster membership through its last; at in-between segments where it is
/// not a member it is routed outside the cluster band. Slots are integers;
/// the band occupies a contiguous run separated from other lines by
/// band_gap empty slots.
struct StorylineLayout {
  std::vector<std::string> words;             // distinct, lexicographic
  std::vector<std::vector<int>> slots;        // [word][segment], -1 = absent
  std::vector<std::array<int, 2>> cluster_extents;  // per segment {lo, hi}
  int crossings = 0;

  bool present(std::size_t word, std::size_t segment) const {
    return slots[word][segment] >= 0;
  }
};

struct LayoutOptions {
  int band_gap = 2;        // empty slots between band and outside lines
  int random_restarts = 50;
  int max_passes = 20;     // forward+backward sweep iterations per restart
  std::uint64_t seed = 97;
};

namespace detail {

struct TimelineIndex {
  std::vector<std::string> words;                  // lexicographic
  std::vector<std::vector<std::uint8_t>> member;   // [segment][word]
  std::vector<std::vector<std::uint32_t>> present; // [segment] -> word ids
  std::vector<int> first_seg, last_seg;            // per word
};

inline TimelineIndex index_timeline(const ClusterTimeline& tl) {
  if (tl.clusters.empty()) throw ConfigError("timeline has no segments");
  TimelineIndex ix;
  for (const auto& cluster : tl.clusters) {
    for (const auto& w : cluster) ix.words.push_back(w);
  }
  std::sort(ix.words.begin(), ix.words.end());
  ix.words.erase(std::unique(ix.words.begin(), ix.words.end()),
                 ix.words.end());
  auto id_of = [&](const std::string& w) {
    return static_cast<std::uint32_t>(
        std::lower_bound(ix.words.begin(), ix.words.end(), w) -
        ix.words.begin());
  };

  const auto segs = tl.clusters.size();
  const auto n = ix.words.size();
  ix.member.assign(segs, std::vector<std::uint8_t>(n, 0));
  ix.first_seg.assign(n, -1);
  ix.last_seg.assign(n, -1);
  for (std::size_t e = 0; e < segs; ++e) {
    for (const auto& w : tl.clusters[e]) {
      const auto id = id_of(w);
      ix.member[e][id] = 1;
      if (ix.first_seg[id] < 0) ix.first_seg[id] = static_cast<int>(e);
      ix.last_seg[id] = static_cast<int>(e);
    }
  }
  ix.present.assign(segs, {});
  for (std::size_t e = 0; e < segs; ++e) {
    for (std::uint32_t w = 0; w < n; ++w) {
      if (ix.first_seg[w] >= 0 && ix.first_seg[w] <= static_cast<int>(e) &&
          static_cast<int>(e) <= ix.last_seg[w]) {
        ix.present[e].push_back(w);
      }
    }
  }
  return ix;
}

using Orders = std::vector<std::vector<std::uint32_t>>;  // [segment] top->bottom

inline int crossings_between(const std::vector<std::uint32_t>& a,
                             const std::vector<std::uint32_t>& b) {
  std::map<std::uint32_t, int> pos_b;
  for (std::size_t i = 0; i < b.size(); ++i) pos_b[b[i]] = static_cast<int>(i);
  std::vector<int> seq;
  for (auto w : a) {
    auto it = pos_b.find(w);
    if (it != pos_b.end()) seq.push_back(it->second);
  }
  int inv = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    for (std::size_t j = i + 1; j < seq.size(); ++j) {
      if (seq[i] > seq[j]) ++inv;
    }
  }
  return inv;
}

inline int total_crossings(const Orders& orders) {
  int total = 0;
  for (std::size_t e = 0; e + 1 < orders.size(); ++e) {
    total += crossings_between(orders[e], orders[e + 1]);
  }
  return total;
}

/// Moves the segment's cluster members into one contiguous block anchored at
/// the first member's position, preserving relative order elsewhere.
inline std::vector<std::uint32_t> repair_contiguity(
    const std::vector<std::uint32_t>& order,
    const std::vector<std::uint8_t>& member) {
  std::vector<std::uint32_t> members, others;
  std::size_t insert_at = order.size();
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (member[order[i]]) {
      if (members.empty()) insert_at = others.size();
      members.push_back(order[i]);
    } else {
      others.push_back(order[i]);
    }
  }
  std::vector<std::uint32_t> out;
  out.reserve(order.size());
  out.insert(out.end(), others.begin(), others.begin() + insert_at);
  out.insert(out.end(), members.begin(), members.end());
  out.insert(out.end(), others.begin() + insert_at, others.end());
  return out;
}

/// One barycenter pass over segment e using the neighbor segment r as the
/// position reference. Keeps the cluster block contiguous by ordering it as
/// a single item whose key is the mean of its members' keys.
inline void barycenter_reorder(Orders& orders, const TimelineIndex& ix,
                               std::size_t e, std::size_t r) {
  auto& cur = orders[e];
  const auto& ref = orders[r];
  if (cur.size() < 2) return;

  std::map<std::uint32_t, double> ref_pos;
  const double ref_div = ref.size() > 1 ? static_cast<double>(ref.size() - 1) : 1.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    ref_pos[ref[i]] = static_cast<double>(i) / ref_div;
  }
  const double cur_div = cur.size() > 1 ? static_cast<double>(cur.size() - 1) : 1.0;

  struct Item {
    double key;
    double tie_pos;
    std::uint32_t tie_word;
    std::vector<std::uint32_t> lines;
  };
  std::vector<Item> items;
  Item block{0, 1e18, 0, {}};
  double block_key_sum = 0;
  std::vector<std::pair<double, std::uint32_t>> member_keys;  // (key, word)
  std::vector<double> member_tie;

  for (std::size_t i = 0; i < cur.size(); ++i) {
    const auto w = cur[i];
    auto it = ref_pos.find(w);
    const double key = it != ref_pos.end()
                           ? it->second
                           : static_cast<double>(i) / cur_div;
    if (ix.member[e][w]) {
      block_key_sum += key;
      member_keys.push_back({key, w});
      member_tie.push_back(static_cast<double>(i));
      block.tie_pos = std::min(block.tie_pos, static_cast<double>(i));
      block.tie_word = block.lines.empty() ? w : std::min(block.tie_word, w);
      block.lines.push_back(w);
    } else {
      items.push_back({key, static_cast<double>(i), w, {w}});
    }
  }
  if (!block.lines.empty()) {
    block.key = block_key_sum / static_cast<double>(block.lines.size());
    // Order members inside the block by their own keys.
    std::vector<std::size_t> morder(member_keys.size());
    std::iota(morder.begin(), morder.end(), 0);
    std::sort(morder.begin(), morder.end(), [&](std::size_t a, std::size_t b) {
      if (member_keys[a].first != member_keys[b].first) {
        return member_keys[a].first < member_keys[b].first;
      }
      if (member_tie[a] != member_tie[b]) return member_tie[a] < member_tie[b];
      return member_keys[a].second < member_keys[b].second;
    });
    std::vector<std::uint32_t> sorted;
    for (auto i : morder) sorted.push_back(member_keys[i].second);
    block.lines = std::move(sorted);
    items.push_back(std::move(block));
  }

  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.key != b.key) return a.key < b.key;
    if (a.tie_pos != b.tie_pos) return a.tie_pos < b.tie_pos;
    return a.tie_word < b.tie_word;
  });

  cur.clear();
  for (const auto& item : items) {
    cur.insert(cur.end(), item.lines.begin(), item.lines.end());
  }
}

inline void sweep_to_convergence(Orders& orders, const TimelineIndex& ix,
                                 int max_passes, Orders& best,
                                 int& best_crossings) {
  auto consider = [&] {
    const int c = total_crossings(orders);
    if (c < best_crossings) {
      best_crossings = c;
      best = orders;
    }
    return c;
  };
  int last = consider();
  for (int pass = 0; pass < max_passes; ++pass) {
    for (std::size_t e = 1; e < orders.size(); ++e) {
      barycenter_reorder(orders, ix, e, e - 1);
    }
    for (std::size_t e = orders.size() - 1; e-- > 0;) {
      barycenter_reorder(orders, ix, e, e + 1);
    }
    const int c = consider();
    if (c >= last) break;
    last = c;
  }
}

}  // namespace detail

/// Crossing-minimizing layout: iterated barycenter sweeps from the
/// lexicographic ordering and from `random_restarts` seeded shuffles, keeping
/// the best layout seen. The result never has more crossings than the
/// lexicographic baseline or any of the random starting orders.
inline StorylineLayout layout(const ClusterTimeline& timeline,
                              const LayoutOptions& options = {}) {
  if (options.band_gap < 1) throw ConfigError("band_gap must be >= 1");
  const auto ix = detail::index_timeline(timeline);
  const auto segs = timeline.clusters.size();

  detail::Orders best;
  int best_crossings = std::numeric_limits<int>::max();

  auto run_from = [&](detail::Orders start) {
    for (std::size_t e = 0; e < segs; ++e) {
      start[e] = detail::repair_contiguity(start[e], ix.member[e]);
    }
    detail::sweep_to_convergence(start, ix, options.max_passes, best,
                                 best_crossings);
  };

  // Lexicographic baseline: present lists are already sorted by word id.
  run_from(ix.present);

  Rng rng(options.seed);
  for (int r = 0; r < options.random_restarts; ++r) {
    detail::Orders start = ix.present;
    for (auto& order : start) rng.shuffle(order);
    run_from(std::move(start));
  }

  StorylineLayout out;
  out.words = ix.words;
  out.slots.assign(ix.words.size(), std::vector<int>(segs, -1));
  out.cluster_extents.assign(segs, {0, 0});
  for (std::size_t e = 0; e < segs; ++e) {
    const auto& order = best[e];
    std::size_t lo = order.size(), hi = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (ix.member[e][order[i]]) {
        lo = std::min(lo, i);
        hi = std::max(hi, i);
      }
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
      int slot = static_cast<int>(i);
      if (i >= lo) slot += options.band_gap;
      if (i > hi) slot += options.band_gap;
      out.slots[order[i]][e] = slot;
    }
    out.cluster_extents[e] = {static_cast<int>(lo) + options.band_gap,
                              static_cast<int>(hi) + options.band_gap};
  }
  out.crossings = best_crossings;
  return out;
}

/// Recomputes the crossing count from slot assignments: pairs present in two
/// adjacent segments whose relative vertical order differs.
inline int count_crossings(const StorylineLayout& layout) {
  const auto segs = layout.slots.empty() ? 0 : layout.slots[0].size();
  const auto n = layout.slots.size();
  int total = 0;
  for (std::size_t e = 0; e + 1 < segs; ++e) {
    for (std::size_t a = 0; a < n; ++a) {
      if (!layout.present(a, e) || !layout.present(a, e + 1)) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!layout.present(b, e) || !layout.present(b, e + 1)) continue;
        const bool before = layout.slots[a][e] < layout.slots[b][e];
        const bool after = layout.slots[a][e + 1] < layout.slots[b][e + 1];
        if (before != after) ++total;
      }
    }
  }
  return total;
}

struct StorylineStyle {
  double width = 1000;
  double height = 600;
  double font_size = 12;
};

/// Storyline SVG: a smooth line per word across its membership span, shaded
/// cluster bands, the target emphasized, entry/exit labels, segment labels
/// across the top. Deterministic.
inline std::string render_storyline(const ClusterTimeline& timeline,
                                    const StorylineLayout& lay,
                                    const StorylineStyle& style = {}) {
  const auto segs = timeline.clusters.size();
  if (lay.slots.empty() || lay.slots[0].size() != segs) {
    throw ConfigError("layout does not match timeline");
  }

  int max_slot = 0;
  for (const auto& row : lay.slots) {
    for (int s : row) max_slot = std::max(max_slot, s);
  }
  const double margin_x = 90, margin_top = 50, margin_bottom = 30;
  const double col_gap =
      segs > 1 ? (style.width - 2 * margin_x) / static_cast<double>(segs - 1)
               : 0;
  auto x_of = [&](std::size_t e) {
    return segs > 1 ? margin_x + col_gap * static_cast<double>(e)
                    : style.width / 2;
  };
  const double slot_h = (style.height - margin_top - margin_bottom) /
                        static_cast<double>(max_slot + 1);
  auto y_of = [&](int slot) {
    return margin_top + slot_h * (static_cast<double>(slot) + 0.5);
  };

  svg::Document doc(style.width, style.height);
  doc.rect(0, 0, style.width, style.height, "fill=\"#ffffff\"");

  const std::string label_attrs =
      "font-family=\"sans-serif\" font-size=\"" + svg::fmt(style.font_size) +
      "\" fill=\"#333333\"";

  // Shaded cluster bands.
  const double band_w = segs > 1 ? std::min(col_gap * 0.5, 80.0) : 80.0;
  for (std::size_t e = 0; e < segs; ++e) {
    const auto [lo, hi] = lay.cluster_extents[e];
    doc.rect(x_of(e) - band_w / 2, y_of(lo) - slot_h * 0.45, band_w,
             y_of(hi) - y_of(lo) + slot_h * 0.9,
             "class=\"band\" fill=\"#dddddd\" opacity=\"0.6\"");
  }

  // Segment labels across the top.
  for (std::size_t e = 0; e < segs; ++e) {
    doc.text(x_of(e), margin_top - 24, timeline.segment_labels[e],
             label_attrs + " text-anchor=\"middle\" font-weight=\"bold\"");
  }

  // One smooth path per word over its span.
  for (std::size_t w = 0; w < lay.words.size(); ++w) {
    std::vector<std::pair<double, double>> anchors;
    for (std::size_t e = 0; e < segs; ++e) {
      if (lay.present(w, e)) anchors.emplace_back(x_of(e), y_of(lay.slots[w][e]));
    }
    if (anchors.empty()) continue;
    const bool is_target = lay.words[w] == timeline.target;
    const auto color =
        is_target ? "#000000"
                  : std::string(svg::kPalette[w % svg::kPalette.size()]);

    std::string d = "M " + svg::fmt(anchors[0].first) + " " +
                    svg::fmt(anchors[0].second);
    for (std::size_t i = 1; i < anchors.size(); ++i) {
      const auto [x0, y0] = anchors[i - 1];
      const auto [x1, y1] = anchors[i];
      const double mx = (x0 + x1) / 2;
      d += " C " + svg::fmt(mx) + " " + svg::fmt(y0) + ", " + svg::fmt(mx) +
           " " + svg::fmt(y1) + ", " + svg::fmt(x1) + " " + svg::fmt(y1);
    }
    doc.path(d, "class=\"line\" fill=\"none\" stroke=\"" + std::string(color) +
                    "\" stroke-width=\"" + (is_target ? "4" : "2") + "\"");

    // Entry and exit labels.
    doc.text(anchors.front().first - 6, anchors.front().second + 4,
             lay.words[w], label_attrs + " text-anchor=\"end\"");
    if (anchors.size() > 1) {
      doc.text(anchors.back().first + 6, anchors.back().second + 4,
               lay.words[w], label_attrs);
    }
  }

  return doc.str();
}

/// Diagnostic listing: per segment, the present words in slot order.
inline void write_timeline_diagnostic(std::ostream& os,
                                      const ClusterTimeline& timeline,
                                      const StorylineLayout& lay) {
  const auto segs = timeline.clusters.size();
  for (std::size_t e = 0; e < segs; ++e) {
    std::vector<std::pair<int, std::string>> row;
    for (std::size_t w = 0; w < lay.words.size(); ++w) {
      if (lay.present(w, e)) row.emplace_back(lay.slots[w][e], lay.words[w]);
    }
    std::sort(row.begin(), row.end());
    os << timeline.segment_labels[e] << ':';
    for (const auto& [slot, word] : row) os << ' ' << word;
    os << '\n';
  }
}

}  // namespace drift
