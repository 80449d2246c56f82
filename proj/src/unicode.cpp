// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "textnorm/unicode.hpp"

#include <algorithm>
#include <cstdint>

namespace textnorm::uni {

namespace {

struct LowerPair {
  char32_t cp;
  char32_t lower;
};
struct LowerSpecial {
  char32_t cp;
  char32_t lower[3];
  int n;
};
struct CccEntry {
  char32_t cp;
  std::uint8_t ccc;
};
struct DecompEntry {
  char32_t cp;
  std::uint32_t offset;
  std::uint8_t len;
};
struct CompEntry {
  char32_t first;
  char32_t second;
  char32_t composed;
};
struct Range {
  char32_t lo;
  char32_t hi;
};

#include "unicode_tables.inc"

template <typename T, std::size_t N>
const T* table_find(const T (&table)[N], char32_t cp) {
  auto it = std::lower_bound(std::begin(table), std::end(table), cp,
                             [](const T& e, char32_t c) { return e.cp < c; });
  if (it != std::end(table) && it->cp == cp) return it;
  return nullptr;
}

// Hangul syllable composition constants (UAX #15 §3.12).
constexpr char32_t kSBase = 0xAC00, kLBase = 0x1100, kVBase = 0x1161,
                   kTBase = 0x11A7;
constexpr int kLCount = 19, kVCount = 21, kTCount = 28;
constexpr int kNCount = kVCount * kTCount;
constexpr int kSCount = kLCount * kNCount;

bool hangul_decompose(char32_t c, std::u32string& out) {
  if (c < kSBase || c >= kSBase + kSCount) return false;
  int idx = static_cast<int>(c - kSBase);
  out.push_back(kLBase + idx / kNCount);
  out.push_back(kVBase + (idx % kNCount) / kTCount);
  if (idx % kTCount != 0) out.push_back(kTBase + idx % kTCount);
  return true;
}

char32_t compose_pair(char32_t a, char32_t b) {
  if (a >= kLBase && a < kLBase + kLCount && b >= kVBase &&
      b < kVBase + kVCount) {
    return kSBase + (static_cast<int>(a - kLBase) * kVCount +
                     static_cast<int>(b - kVBase)) *
                        kTCount;
  }
  if (a >= kSBase && a < kSBase + kSCount &&
      (a - kSBase) % kTCount == 0 && b > kTBase && b < kTBase + kTCount) {
    return a + (b - kTBase);
  }
  auto it = std::lower_bound(
      std::begin(kComp), std::end(kComp), std::pair<char32_t, char32_t>{a, b},
      [](const CompEntry& e, const std::pair<char32_t, char32_t>& k) {
        return e.first != k.first ? e.first < k.first : e.second < k.second;
      });
  if (it != std::end(kComp) && it->first == a && it->second == b)
    return it->composed;
  return 0;
}

void decompose_into(char32_t c, std::u32string& out) {
  if (hangul_decompose(c, out)) return;
  if (const DecompEntry* e = table_find(kDecomp, c)) {
    for (int i = 0; i < e->len; ++i) out.push_back(kDecompBuf[e->offset + i]);
    return;
  }
  out.push_back(c);
}

void canonical_order(std::u32string& s) {
  // Stable bubble over combining-class runs; runs are short in practice.
  for (std::size_t i = 1; i < s.size(); ++i) {
    int cc = combining_class(s[i]);
    if (cc == 0) continue;
    std::size_t j = i;
    while (j > 0 && combining_class(s[j - 1]) > cc) {
      std::swap(s[j - 1], s[j]);
      --j;
    }
  }
}

}  // namespace

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  const auto* p = reinterpret_cast<const unsigned char*>(s.data());
  std::size_t n = s.size();
  std::size_t i = 0;
  while (i < n) {
    unsigned char b = p[i];
    char32_t cp = 0;
    int len = 0;
    if (b < 0x80) {
      cp = b;
      len = 1;
    } else if ((b & 0xE0) == 0xC0) {
      cp = b & 0x1F;
      len = 2;
    } else if ((b & 0xF0) == 0xE0) {
      cp = b & 0x0F;
      len = 3;
    } else if ((b & 0xF8) == 0xF0) {
      cp = b & 0x07;
      len = 4;
    } else {
      throw InvalidUtf8("invalid UTF-8 lead byte at offset " +
                        std::to_string(i));
    }
    if (i + len > n) throw InvalidUtf8("truncated UTF-8 sequence");
    for (int k = 1; k < len; ++k) {
      unsigned char cb = p[i + k];
      if ((cb & 0xC0) != 0x80)
        throw InvalidUtf8("invalid UTF-8 continuation byte at offset " +
                          std::to_string(i + k));
      cp = (cp << 6) | (cb & 0x3F);
    }
    static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (len > 1 && cp < kMin[len])
      throw InvalidUtf8("overlong UTF-8 encoding");
    if (cp >= 0xD800 && cp <= 0xDFFF)
      throw InvalidUtf8("surrogate code point in UTF-8");
    if (cp > 0x10FFFF) throw InvalidUtf8("code point out of range");
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) {
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
  return out;
}

std::u32string to_lower(std::u32string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (char32_t c : s) {
    if (const LowerSpecial* sp = table_find(kLowerSpecial, c)) {
      for (int i = 0; i < sp->n; ++i) out.push_back(sp->lower[i]);
    } else if (const LowerPair* p = table_find(kLowerSimple, c)) {
      out.push_back(p->lower);
    } else {
      out.push_back(c);
    }
  }
  return out;
}

int combining_class(char32_t c) {
  if (const CccEntry* e = table_find(kCcc, c)) return e->ccc;
  return 0;
}

std::u32string nfd(std::u32string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (char32_t c : s) decompose_into(c, out);
  canonical_order(out);
  return out;
}

std::u32string nfc(std::u32string_view s) {
  std::u32string d = nfd(s);
  if (d.empty()) return d;
  std::u32string out;
  out.reserve(d.size());
  // UAX #15 canonical composition over the decomposed string.
  std::size_t last_starter = std::u32string::npos;
  int last_cc = 0;
  for (char32_t c : d) {
    int cc = combining_class(c);
    if (last_starter != std::u32string::npos &&
        (last_cc < cc || (last_cc == 0 && cc == 0))) {
      // not blocked from the last starter
      if (char32_t comp = compose_pair(out[last_starter], c)) {
        out[last_starter] = comp;
        // last_cc unchanged: the replaced char vanished
        continue;
      }
    }
    if (cc == 0) {
      last_starter = out.size();
      last_cc = 0;
    } else {
      last_cc = cc;
    }
    out.push_back(c);
  }
  return out;
}

bool is_punct_or_symbol(char32_t c) {
  auto it = std::lower_bound(std::begin(kPunctSymbol), std::end(kPunctSymbol),
                             c, [](const Range& r, char32_t cp) { return r.hi < cp; });
  return it != std::end(kPunctSymbol) && c >= it->lo;
}

bool is_whitespace(char32_t c) {
  switch (c) {
    case 0x09:
    case 0x0A:
    case 0x0B:
    case 0x0C:
    case 0x0D:
    case 0x20:
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

bool is_ascii_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

}  // namespace textnorm::uni
