#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "drift/detail/unicode_tables.hpp"
#include "drift/errors.hpp"

namespace drift::uni {

/// True if cp belongs to a Unicode punctuation category (Pc Pd Pe Pf Pi Po Ps).
inline bool is_punctuation(char32_t cp) {
  std::size_t lo = 0, hi = detail::kPunctRangeCount;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (detail::kPunctRanges[mid][1] < cp) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo < detail::kPunctRangeCount && detail::kPunctRanges[lo][0] <= cp;
}

inline bool is_space(char32_t cp) {
  std::size_t lo = 0, hi = detail::kSpaceCount;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (detail::kSpaceCps[mid] < cp) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo < detail::kSpaceCount && detail::kSpaceCps[lo] == cp;
}

/// Simple (single code point) lowercase mapping; identity when none exists.
inline char32_t to_lower(char32_t cp) {
  std::size_t lo = 0, hi = detail::kLowerPairCount;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (detail::kLowerPairs[mid][0] < cp) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < detail::kLowerPairCount && detail::kLowerPairs[lo][0] == cp) {
    return detail::kLowerPairs[lo][1];
  }
  return cp;
}

/// Strict UTF-8 decoder. Rejects overlong forms, surrogates, and values
/// past U+10FFFF. Throws DecodeError carrying the byte offset of the first
/// offending byte.
inline std::u32string decode_utf8(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  const auto n = bytes.size();
  while (i < n) {
    const auto b0 = static_cast<unsigned char>(bytes[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    int len;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      throw DecodeError(i);
    }
    if (i + static_cast<std::size_t>(len) > n) throw DecodeError(i);
    for (int k = 1; k < len; ++k) {
      const auto bk = static_cast<unsigned char>(bytes[i + k]);
      if ((bk & 0xC0) != 0x80) throw DecodeError(i + k);
      cp = (cp << 6) | (bk & 0x3F);
    }
    static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      throw DecodeError(i);
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string encode_utf8(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

}  // namespace drift::uni
