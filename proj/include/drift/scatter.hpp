#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "drift/errors.hpp"
#include "drift/pca.hpp"
#include "drift/shift.hpp"
#include "drift/svg.hpp"

namespace drift {

/// Everything render_scatter needs: the target's 2-D position per segment
/// and one 2-D point per neighbor word.
struct ScatterScene {
  std::string target;
  std::vector<std::array<double, 2>> target_positions;  // one per segment
  std::vector<std::pair<std::string, std::array<double, 2>>> neighbors;
  std::vector<std::string> segment_labels;
};

struct ScatterStyle {
  double width = 900;
  double height = 600;
  double font_size = 12;
  int per_segment_k = 10;
};

/// Representative vectors for the union of the word's K nearest neighbors
/// over all segments: each neighbor's vector is the arithmetic mean of its
/// normalized vectors across every segment. The target itself is excluded;
/// it keeps one vector per segment instead.
inline std::map<std::string, std::vector<double>> neighbor_mean(
    std::string_view word, const EmbeddingSequence& seq, int per_segment_k) {
  seq.validate();
  auto idx = seq.snapshots.front().index_of(word);
  if (!idx) throw OutOfVocabularyError(std::string(word));

  std::vector<std::uint32_t> collected;
  for (const auto& snap : seq.snapshots) {
    for (auto n : nearest_neighbors(snap, *idx, per_segment_k)) {
      collected.push_back(n);
    }
  }
  std::sort(collected.begin(), collected.end());
  collected.erase(std::unique(collected.begin(), collected.end()),
                  collected.end());

  const auto d = static_cast<std::size_t>(seq.snapshots.front().dim);
  std::map<std::string, std::vector<double>> means;
  for (auto w : collected) {
    std::vector<double> mean(d, 0.0);
    for (const auto& snap : seq.snapshots) {
      const auto v = snap.vec(w);
      for (std::size_t j = 0; j < d; ++j) mean[j] += v[j];
    }
    for (auto& x : mean) x /= static_cast<double>(seq.snapshots.size());
    means.emplace(seq.words()[w], std::move(mean));
  }
  return means;
}

/// Builds the scene: target per-segment vectors plus neighbor means, jointly
/// reduced to 2-D. Neighbor means with norm below 1e-6 are dropped (reported
/// through `dropped` when given) instead of being plotted at the origin.
inline ScatterScene build_scatter_scene(
    std::string_view word, const EmbeddingSequence& seq, int per_segment_k,
    std::vector<std::string>* dropped = nullptr) {
  auto idx = seq.snapshots.front().index_of(word);
  if (!idx) throw OutOfVocabularyError(std::string(word));
  auto means = neighbor_mean(word, seq, per_segment_k);

  ScatterScene scene;
  scene.target = std::string(word);
  scene.segment_labels = seq.segment_labels();

  std::vector<std::vector<double>> points;
  for (const auto& snap : seq.snapshots) {
    const auto v = snap.vec(*idx);
    points.emplace_back(v.begin(), v.end());
  }
  std::vector<std::string> kept;
  for (const auto& [w, mean] : means) {
    double norm2 = 0;
    for (double x : mean) norm2 += x * x;
    if (std::sqrt(norm2) < 1e-6) {
      if (dropped) dropped->push_back(w);
      continue;
    }
    kept.push_back(w);
    points.push_back(mean);
  }

  const auto projected = reduce_2d(points);
  const auto segs = seq.snapshots.size();
  scene.target_positions.assign(projected.begin(), projected.begin() + segs);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    scene.neighbors.emplace_back(kept[i], projected[segs + i]);
  }
  return scene;
}

/// SVG scatterplot: one labeled circle per neighbor, the target drawn once
/// per segment in the segment's color, a faint polyline through the target
/// positions in segment order, and a legend. Deterministic.
inline std::string render_scatter(const ScatterScene& scene,
                                  const ScatterStyle& style = {}) {
  {
    std::vector<std::string> labels = scene.segment_labels;
    std::sort(labels.begin(), labels.end());
    if (std::adjacent_find(labels.begin(), labels.end()) != labels.end()) {
      throw ConfigError("duplicate segment labels in scene");
    }
  }
  if (scene.target_positions.size() != scene.segment_labels.size()) {
    throw ConfigError("target positions / segment labels mismatch");
  }

  double lo_x = 0, hi_x = 1, lo_y = 0, hi_y = 1;
  bool first = true;
  auto extend = [&](const std::array<double, 2>& p) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) {
      throw ConfigError("non-finite scene coordinate");
    }
    if (first) {
      lo_x = hi_x = p[0];
      lo_y = hi_y = p[1];
      first = false;
    } else {
      lo_x = std::min(lo_x, p[0]);
      hi_x = std::max(hi_x, p[0]);
      lo_y = std::min(lo_y, p[1]);
      hi_y = std::max(hi_y, p[1]);
    }
  };
  for (const auto& p : scene.target_positions) extend(p);
  for (const auto& [w, p] : scene.neighbors) extend(p);
  if (hi_x - lo_x < 1e-12) hi_x = lo_x + 1;
  if (hi_y - lo_y < 1e-12) hi_y = lo_y + 1;

  const double margin = 40;
  auto sx = [&](double x) {
    return margin + (x - lo_x) / (hi_x - lo_x) * (style.width - 2 * margin);
  };
  auto sy = [&](double y) {
    // SVG y grows downward.
    return style.height - margin -
           (y - lo_y) / (hi_y - lo_y) * (style.height - 2 * margin);
  };

  svg::Document doc(style.width, style.height);
  doc.rect(0, 0, style.width, style.height, "fill=\"#ffffff\"");

  if (scene.target_positions.size() > 1) {
    std::vector<std::array<double, 2>> pts;
    for (const auto& p : scene.target_positions) {
      pts.push_back({sx(p[0]), sy(p[1])});
    }
    doc.polyline(pts,
                 "fill=\"none\" stroke=\"#888888\" stroke-width=\"1\" "
                 "stroke-dasharray=\"4,3\" opacity=\"0.6\"");
  }

  std::vector<svg::LabelBox> placed;
  const std::string label_attrs =
      "font-family=\"sans-serif\" font-size=\"" + svg::fmt(style.font_size) +
      "\" fill=\"#333333\"";

  for (const auto& [w, p] : scene.neighbors) {
    const double px = sx(p[0]), py = sy(p[1]);
    doc.circle(px, py, 3, "class=\"neighbor\" fill=\"#777777\"");
    const auto box =
        svg::place_label(placed, px, py, w.size(), style.font_size);
    doc.text(box.x, box.y + style.font_size * 0.8, w, label_attrs);
  }

  for (std::size_t e = 0; e < scene.target_positions.size(); ++e) {
    const auto& p = scene.target_positions[e];
    const double px = sx(p[0]), py = sy(p[1]);
    const auto color = svg::kPalette[e % svg::kPalette.size()];
    doc.circle(px, py, 5,
               "class=\"target\" fill=\"" + std::string(color) +
                   "\" stroke=\"#000000\" stroke-width=\"1\"");
    const auto box =
        svg::place_label(placed, px, py, scene.target.size(), style.font_size);
    doc.text(box.x, box.y + style.font_size * 0.8, scene.target,
             label_attrs + " font-weight=\"bold\"");
  }

  // Legend, top-left.
  for (std::size_t e = 0; e < scene.segment_labels.size(); ++e) {
    const double y = 16 + 18 * static_cast<double>(e);
    const auto color = svg::kPalette[e % svg::kPalette.size()];
    doc.rect(12, y - 9, 12, 12,
             "class=\"legend\" fill=\"" + std::string(color) + "\"");
    doc.text(30, y + 1, scene.segment_labels[e], label_attrs);
  }

  return doc.str();
}

}  // namespace drift
