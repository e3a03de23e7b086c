#!/usr/bin/env python3
"""Regenerates include/msri/unicode_data.inc from Python's unicodedata.

The .inc file carries three sorted tables consumed by src/unicode.cpp:
  - combining classes (nonzero ccc only)
  - full canonical decompositions (NFD expansion, Hangul excluded)
  - primary composition pairs (a, b) -> composite

Run from the repository root:  python3 tools/gen_unicode_tables.py
"""

import sys
import unicodedata

OUT = "include/msri/unicode_data.inc"

HANGUL_S_BASE = 0xAC00
HANGUL_S_COUNT = 11172


def main() -> None:
    ccc = []
    decomp = []  # (cp, [expansion])
    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        ch = chr(cp)
        c = unicodedata.combining(ch)
        if c:
            ccc.append((cp, c))
        if HANGUL_S_BASE <= cp < HANGUL_S_BASE + HANGUL_S_COUNT:
            continue  # algorithmic in C++
        d = unicodedata.decomposition(ch)
        if d and not d.startswith("<"):
            full = [ord(x) for x in unicodedata.normalize("NFD", ch)]
            decomp.append((cp, full))

    comp = []
    for cp, _ in decomp:
        raw = unicodedata.decomposition(chr(cp)).split()
        if len(raw) == 2:
            a, b = (int(x, 16) for x in raw)
            # normalize() agreeing means (a, b) -> cp is a primary composite
            # (this also filters the composition exclusions).
            if unicodedata.normalize("NFC", chr(a) + chr(b)) == chr(cp):
                comp.append((a, b, cp))
    comp.sort()

    flat = []
    index = []  # (cp, offset, len)
    for cp, full in decomp:
        index.append((cp, len(flat), len(full)))
        flat.extend(full)

    with open(OUT, "w", encoding="ascii") as f:
        w = f.write
        w("// Generated by tools/gen_unicode_tables.py -- do not edit.\n")
        w(f"// Unicode version: {unicodedata.unidata_version}\n\n")
        w(f"inline constexpr std::size_t kCccCount = {len(ccc)};\n")
        w("inline constexpr CccEntry kCcc[] = {\n")
        for cp, c in ccc:
            w(f"  {{0x{cp:X}, {c}}},\n")
        w("};\n\n")
        w(f"inline constexpr std::size_t kDecompCount = {len(index)};\n")
        w("inline constexpr DecompEntry kDecomp[] = {\n")
        for cp, off, n in index:
            w(f"  {{0x{cp:X}, {off}, {n}}},\n")
        w("};\n\n")
        w(f"inline constexpr std::size_t kDecompDataCount = {len(flat)};\n")
        w("inline constexpr char32_t kDecompData[] = {\n")
        for i in range(0, len(flat), 12):
            w("  " + ", ".join(f"0x{x:X}" for x in flat[i : i + 12]) + ",\n")
        w("};\n\n")
        w(f"inline constexpr std::size_t kCompCount = {len(comp)};\n")
        w("inline constexpr CompEntry kComp[] = {\n")
        for a, b, c in comp:
            w(f"  {{0x{a:X}, 0x{b:X}, 0x{c:X}}},\n")
        w("};\n")

    print(
        f"wrote {OUT}: {len(ccc)} ccc, {len(index)} decomp "
        f"({len(flat)} cps), {len(comp)} comp pairs",
        file=sys.stderr,
    )


if __name__ == "__main__":
    main()
