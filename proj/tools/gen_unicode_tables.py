#!/usr/bin/env python3
"""Regenerates include/drift/detail/unicode_tables.hpp.

Emits three frozen tables so tokenization behaves identically on every
platform regardless of the host's Unicode data:
  - inclusive code point ranges for the punctuation general categories (P*)
  - single-code-point lowercase mappings
  - whitespace code points
"""

import sys
import unicodedata

MAX_CP = 0x110000


def punct_ranges():
    ranges = []
    start = None
    for cp in range(MAX_CP):
        is_p = unicodedata.category(chr(cp)).startswith("P")
        if is_p and start is None:
            start = cp
        elif not is_p and start is not None:
            ranges.append((start, cp - 1))
            start = None
    if start is not None:
        ranges.append((start, MAX_CP - 1))
    return ranges


def lower_pairs():
    pairs = []
    for cp in range(MAX_CP):
        lo = chr(cp).lower()
        if len(lo) == 1 and ord(lo) != cp:
            pairs.append((cp, ord(lo)))
    return pairs


def space_cps():
    return [cp for cp in range(MAX_CP) if chr(cp).isspace()]


def main(out_path):
    ranges = punct_ranges()
    pairs = lower_pairs()
    spaces = space_cps()
    with open(out_path, "w") as f:
        w = f.write
        w("// Generated by tools/gen_unicode_tables.py (Unicode %s). Do not edit.\n"
          % unicodedata.unidata_version)
        w("#pragma once\n\n")
        w("#include <cstddef>\n#include <cstdint>\n\n")
        w("namespace drift::detail {\n\n")

        w("inline constexpr std::size_t kPunctRangeCount = %d;\n" % len(ranges))
        w("// [lo, hi] inclusive, sorted ascending, non-overlapping.\n")
        w("inline constexpr char32_t kPunctRanges[%d][2] = {\n" % len(ranges))
        for i in range(0, len(ranges), 6):
            row = ", ".join("{0x%X, 0x%X}" % r for r in ranges[i:i + 6])
            w("    %s,\n" % row)
        w("};\n\n")

        w("inline constexpr std::size_t kLowerPairCount = %d;\n" % len(pairs))
        w("// (code point, lowercase code point), sorted by first element.\n")
        w("inline constexpr char32_t kLowerPairs[%d][2] = {\n" % len(pairs))
        for i in range(0, len(pairs), 6):
            row = ", ".join("{0x%X, 0x%X}" % p for p in pairs[i:i + 6])
            w("    %s,\n" % row)
        w("};\n\n")

        w("inline constexpr std::size_t kSpaceCount = %d;\n" % len(spaces))
        w("inline constexpr char32_t kSpaceCps[%d] = {\n" % len(spaces))
        for i in range(0, len(spaces), 12):
            row = ", ".join("0x%X" % c for c in spaces[i:i + 12])
            w("    %s,\n" % row)
        w("};\n\n")
        w("}  // namespace drift::detail\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else
         "include/drift/detail/unicode_tables.hpp")
