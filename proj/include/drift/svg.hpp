#pragma once

#include <array>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace drift::svg {

/// Fixed colorblind-safe palette (Wong). Segment i uses color i mod 8.
inline constexpr std::array<std::string_view, 8> kPalette = {
    "#0072b2", "#d55e00", "#009e73", "#cc79a7",
    "#e69f00", "#56b4e9", "#f0e442", "#000000",
};

/// Two-decimal fixed formatting; negative zero is normalized so identical
/// scenes always serialize to identical bytes.
inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

inline std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

/// Minimal deterministic SVG document builder.
class Document {
 public:
  Document(double width, double height) : width_(width), height_(height) {}

  void raw(std::string_view s) { body_ += s; }

  void rect(double x, double y, double w, double h, std::string_view attrs) {
    body_ += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" +
             fmt(w) + "\" height=\"" + fmt(h) + "\" " + std::string(attrs) +
             "/>\n";
  }

  void circle(double cx, double cy, double r, std::string_view attrs) {
    body_ += "<circle cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) + "\" r=\"" +
             fmt(r) + "\" " + std::string(attrs) + "/>\n";
  }

  void line(double x1, double y1, double x2, double y2,
            std::string_view attrs) {
    body_ += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" +
             fmt(x2) + "\" y2=\"" + fmt(y2) + "\" " + std::string(attrs) +
             "/>\n";
  }

  void polyline(const std::vector<std::array<double, 2>>& pts,
                std::string_view attrs) {
    body_ += "<polyline points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) body_ += ' ';
      body_ += fmt(pts[i][0]) + "," + fmt(pts[i][1]);
    }
    body_ += "\" " + std::string(attrs) + "/>\n";
  }

  void path(std::string_view d, std::string_view attrs) {
    body_ += "<path d=\"" + std::string(d) + "\" " + std::string(attrs) +
             "/>\n";
  }

  void text(double x, double y, std::string_view content,
            std::string_view attrs) {
    body_ += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" " +
             std::string(attrs) + ">" + escape(content) + "</text>\n";
  }

  std::string str() const {
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           fmt(width_) + "\" height=\"" + fmt(height_) + "\" viewBox=\"0 0 " +
           fmt(width_) + " " + fmt(height_) + "\">\n";
    out += body_;
    out += "</svg>\n";
    return out;
  }

 private:
  double width_, height_;
  std::string body_;
};

/// Greedy label placement: each label anchors right of its point and is
/// pushed down in fixed steps while it overlaps any previously placed box.
/// Estimation only; deterministic by processing order.
struct LabelBox {
  double x, y, w, h;
};

inline bool overlaps(const LabelBox& a, const LabelBox& b) {
  return a.x < b.x + b.w && b.x < a.x + a.w && a.y < b.y + b.h &&
         b.y < a.y + a.h;
}

inline LabelBox place_label(std::vector<LabelBox>& placed, double px,
                            double py, std::size_t text_len,
                            double font_size) {
  LabelBox box{px + 5.0, py - font_size * 0.5,
               0.62 * font_size * static_cast<double>(text_len), font_size};
  for (int attempt = 0; attempt < 40; ++attempt) {
    bool clash = false;
    for (const auto& other : placed) {
      if (overlaps(box, other)) {
        clash = true;
        break;
      }
    }
    if (!clash) break;
    box.y += font_size * 0.6;
  }
  placed.push_back(box);
  return box;
}

}  // namespace drift::svg
