#include "msri/unicode.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>

namespace msri::uni {

namespace {

struct CccEntry {
  char32_t cp;
  std::uint8_t ccc;
};
struct DecompEntry {
  char32_t cp;
  std::uint32_t offset;
  std::uint32_t len;
};
struct CompEntry {
  char32_t first;
  char32_t second;
  char32_t composite;
};

#include "msri/unicode_data.inc"

// Hangul syllable composition/decomposition (UAX #15, algorithmic).
constexpr char32_t kSBase = 0xAC00;
constexpr char32_t kLBase = 0x1100;
constexpr char32_t kVBase = 0x1161;
constexpr char32_t kTBase = 0x11A7;
constexpr int kLCount = 19, kVCount = 21, kTCount = 28;
constexpr int kNCount = kVCount * kTCount;
constexpr int kSCount = kLCount * kNCount;

const DecompEntry* find_decomp(char32_t cp) {
  auto it = std::lower_bound(kDecomp, kDecomp + kDecompCount, cp,
                             [](const DecompEntry& e, char32_t c) { return e.cp < c; });
  if (it != kDecomp + kDecompCount && it->cp == cp) return it;
  return nullptr;
}

// Returns 0 when the pair does not form a primary composite.
char32_t compose_pair(char32_t a, char32_t b) {
  // Hangul L+V and LV+T.
  if (a >= kLBase && a < kLBase + kLCount && b >= kVBase && b < kVBase + kVCount) {
    return kSBase + ((a - kLBase) * kVCount + (b - kVBase)) * kTCount;
  }
  if (a >= kSBase && a < kSBase + kSCount && (a - kSBase) % kTCount == 0 &&
      b > kTBase && b < kTBase + kTCount) {
    return a + (b - kTBase);
  }
  auto it = std::lower_bound(kComp, kComp + kCompCount, std::pair<char32_t, char32_t>{a, b},
                             [](const CompEntry& e, const std::pair<char32_t, char32_t>& k) {
                               return e.first != k.first ? e.first < k.first
                                                         : e.second < k.second;
                             });
  if (it != kComp + kCompCount && it->first == a && it->second == b) return it->composite;
  return 0;
}

void decompose_into(char32_t cp, std::vector<char32_t>& out) {
  if (cp >= kSBase && cp < kSBase + kSCount) {
    const int s = static_cast<int>(cp - kSBase);
    out.push_back(kLBase + s / kNCount);
    out.push_back(kVBase + (s % kNCount) / kTCount);
    if (s % kTCount != 0) out.push_back(kTBase + s % kTCount);
    return;
  }
  if (const DecompEntry* e = find_decomp(cp)) {
    for (std::uint32_t i = 0; i < e->len; ++i) out.push_back(kDecompData[e->offset + i]);
    return;
  }
  out.push_back(cp);
}

}  // namespace

int combining_class(char32_t cp) {
  auto it = std::lower_bound(kCcc, kCcc + kCccCount, cp,
                             [](const CccEntry& e, char32_t c) { return e.cp < c; });
  if (it != kCcc + kCccCount && it->cp == cp) return it->ccc;
  return 0;
}

std::vector<char32_t> decode_utf8(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    char32_t cp = 0;
    std::size_t n = 0;
    if (b0 < 0x80) {
      cp = b0;
      n = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      n = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      n = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      n = 4;
    } else {
      throw std::invalid_argument("malformed UTF-8 lead byte");
    }
    if (i + n > s.size()) throw std::invalid_argument("truncated UTF-8 sequence");
    for (std::size_t j = 1; j < n; ++j) {
      const auto b = static_cast<unsigned char>(s[i + j]);
      if ((b & 0xC0) != 0x80) throw std::invalid_argument("malformed UTF-8 continuation");
      cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong encodings and surrogates.
    static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (n > 1 && cp < kMin[n]) throw std::invalid_argument("overlong UTF-8 encoding");
    if (cp >= 0xD800 && cp <= 0xDFFF) throw std::invalid_argument("surrogate in UTF-8");
    if (cp > 0x10FFFF) throw std::invalid_argument("out-of-range scalar value");
    out.push_back(cp);
    i += n;
  }
  return out;
}

std::string encode_utf8(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return out;
}

std::string encode_utf8(const std::vector<char32_t>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) out += encode_utf8(cp);
  return out;
}

std::vector<char32_t> nfc(const std::vector<char32_t>& cps) {
  // 1. Full canonical decomposition.
  std::vector<char32_t> buf;
  buf.reserve(cps.size());
  for (char32_t cp : cps) decompose_into(cp, buf);

  // 2. Canonical ordering: stable sort runs of nonzero-ccc marks.
  for (std::size_t i = 1; i < buf.size(); ++i) {
    const int cc = combining_class(buf[i]);
    if (cc == 0) continue;
    std::size_t j = i;
    while (j > 0 && combining_class(buf[j - 1]) > cc) {
      std::swap(buf[j - 1], buf[j]);
      --j;
    }
  }

  // 3. Canonical composition.
  std::vector<char32_t> out;
  out.reserve(buf.size());
  std::ptrdiff_t last_starter = -1;
  int last_cc = 0;
  for (char32_t c : buf) {
    const int cc = combining_class(c);
    if (last_starter >= 0) {
      const bool adjacent = static_cast<std::ptrdiff_t>(out.size()) - 1 == last_starter;
      if (adjacent || last_cc < cc) {
        if (char32_t comp = compose_pair(out[static_cast<std::size_t>(last_starter)], c)) {
          out[static_cast<std::size_t>(last_starter)] = comp;
          continue;
        }
      }
    }
    if (cc == 0) {
      last_starter = static_cast<std::ptrdiff_t>(out.size());
      last_cc = 0;
    } else {
      last_cc = cc;
    }
    out.push_back(c);
  }
  return out;
}

std::string nfc_utf8(std::string_view s) { return encode_utf8(nfc(decode_utf8(s))); }

}  // namespace msri::uni
