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

#include "textnorm/pipeline.hpp"

#include <algorithm>

#include "textnorm/unicode.hpp"

namespace textnorm {

namespace {

// Internal stand-in for the reserved <UNK> token while a step runs.
constexpr char32_t kShield = 0xE000;
const std::u32string kUnk32 = U"<UNK>";

bool is_word_joiner(char32_t c) { return c == U'\'' || c == U'-'; }

bool is_space(char32_t c) { return uni::is_whitespace(c); }

struct TokenSpan {
  std::size_t begin, end;
};

std::vector<TokenSpan> token_spans(const std::u32string& s) {
  std::vector<TokenSpan> spans;
  std::size_t i = 0;
  while (i < s.size()) {
    if (is_space(s[i])) {
      ++i;
      continue;
    }
    std::size_t b = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    spans.push_back({b, i});
  }
  return spans;
}

// Replaces whole tokens equal to <UNK> by the shield scalar.
std::u32string shield_unk(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (is_space(s[i])) {
      out.push_back(s[i]);
      ++i;
      continue;
    }
    std::size_t b = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (s.compare(b, i - b, kUnk32) == 0)
      out.push_back(kShield);
    else
      out.append(s, b, i - b);
  }
  return out;
}

std::u32string unshield_unk(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size());
  for (char32_t c : s) {
    if (c == kShield)
      out.append(kUnk32);
    else
      out.push_back(c);
  }
  return out;
}

bool in_alphabet(char32_t c, const LanguageProfile& p) {
  for (auto [lo, hi] : p.alphabet)
    if (c >= lo && c <= hi) return true;
  return false;
}

std::u32string strip_edge_punct(std::u32string_view tok) {
  std::size_t b = 0, e = tok.size();
  while (b < e && uni::is_punct_or_symbol(tok[b])) ++b;
  while (e > b && uni::is_punct_or_symbol(tok[e - 1])) --e;
  return std::u32string(tok.substr(b, e - b));
}

bool valid_word_core(std::u32string_view core, const LanguageProfile& p) {
  if (core.empty()) return false;
  bool has_alpha = false;
  for (char32_t c : core) {
    if (in_alphabet(c, p)) {
      has_alpha = true;
    } else if (!uni::is_ascii_digit(c) && !is_word_joiner(c)) {
      return false;
    }
  }
  return has_alpha;
}

// 1-6 integer digits with optional comma grouping, optional "." + 1-4
// decimals.
bool valid_number(std::u32string_view core) {
  if (core.empty()) return false;
  std::size_t dot = core.find(U'.');
  std::u32string_view ip = core.substr(0, dot);
  std::u32string_view fp =
      dot == std::u32string_view::npos ? std::u32string_view() : core.substr(dot + 1);

  if (ip.empty()) return false;
  int digits = 0;
  if (ip.find(U',') == std::u32string_view::npos) {
    for (char32_t c : ip)
      if (uni::is_ascii_digit(c))
        ++digits;
      else
        return false;
  } else {
    // groups: 1-3 digits, then 3-digit groups
    std::size_t pos = 0;
    bool first = true;
    while (pos < ip.size()) {
      std::size_t comma = ip.find(U',', pos);
      std::u32string_view g = ip.substr(
          pos, comma == std::u32string_view::npos ? ip.size() - pos
                                                  : comma - pos);
      if (g.empty()) return false;
      for (char32_t c : g)
        if (!uni::is_ascii_digit(c)) return false;
      if (first) {
        if (g.size() > 3) return false;
        first = false;
      } else if (g.size() != 3) {
        return false;
      }
      digits += static_cast<int>(g.size());
      if (comma == std::u32string_view::npos) break;
      pos = comma + 1;
      if (pos == ip.size()) return false;  // trailing comma
    }
  }
  if (digits < 1 || digits > 6) return false;

  if (dot != std::u32string_view::npos) {
    if (fp.empty() || fp.size() > 4) return false;
    for (char32_t c : fp)
      if (!uni::is_ascii_digit(c)) return false;
  }
  return true;
}

// H:MM or HH:MM with optional :SS; H in 0-23, MM/SS in 00-59.
bool valid_time(std::u32string_view core) {
  std::vector<std::u32string_view> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t colon = core.find(U':', pos);
    if (colon == std::u32string_view::npos) {
      parts.push_back(core.substr(pos));
      break;
    }
    parts.push_back(core.substr(pos, colon - pos));
    pos = colon + 1;
  }
  if (parts.size() < 2 || parts.size() > 3) return false;
  auto num = [](std::u32string_view p, int* out) {
    if (p.empty() || p.size() > 2) return false;
    int v = 0;
    for (char32_t c : p) {
      if (!uni::is_ascii_digit(c)) return false;
      v = v * 10 + static_cast<int>(c - U'0');
    }
    *out = v;
    return true;
  };
  int h = 0;
  if (!num(parts[0], &h) || h > 23) return false;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    int v = 0;
    if (parts[i].size() != 2 || !num(parts[i], &v) || v > 59) return false;
  }
  return true;
}

bool ascii_lower_alpha(char32_t c) { return c >= U'a' && c <= U'z'; }
bool ascii_alnum(char32_t c) {
  return ascii_lower_alpha(c) || uni::is_ascii_digit(c);
}

bool valid_web_or_email(std::u32string_view core) {
  if (core.size() >= 5 && core.substr(0, 4) == U"www." ) return true;
  // scheme://rest
  std::size_t ss = core.find(U"://");
  if (ss != std::u32string_view::npos && ss >= 1 && ss + 3 < core.size()) {
    bool ok = ascii_lower_alpha(core[0]);
    for (std::size_t i = 1; ok && i < ss; ++i)
      ok = ascii_alnum(core[i]) || core[i] == U'+' || core[i] == U'.' ||
           core[i] == U'-';
    if (ok) return true;
  }
  // local@domain.tld
  std::size_t at = core.find(U'@');
  if (at == std::u32string_view::npos || at == 0 ||
      core.find(U'@', at + 1) != std::u32string_view::npos)
    return false;
  for (std::size_t i = 0; i < at; ++i)
    if (!ascii_alnum(core[i]) && core[i] != U'.' && core[i] != U'_' &&
        core[i] != U'-')
      return false;
  std::u32string_view domain = core.substr(at + 1);
  int labels = 0;
  std::size_t pos = 0;
  std::u32string_view last;
  while (pos <= domain.size()) {
    std::size_t dot = domain.find(U'.', pos);
    std::u32string_view label = domain.substr(
        pos, dot == std::u32string_view::npos ? domain.size() - pos
                                              : dot - pos);
    if (label.empty()) return false;
    for (char32_t c : label)
      if (!ascii_alnum(c) && c != U'-') return false;
    last = label;
    ++labels;
    if (dot == std::u32string_view::npos) break;
    pos = dot + 1;
  }
  if (labels < 2 || last.size() < 2) return false;
  for (char32_t c : last)
    if (!ascii_lower_alpha(c)) return false;
  return true;
}

bool token_valid_u32(std::u32string_view tok, const LanguageProfile& p) {
  if (tok.size() == 1 && tok[0] == kShield) return true;
  if (p.extra_valid_tokens.count(uni::encode_utf8(tok))) return true;
  std::u32string core = strip_edge_punct(tok);
  if (valid_word_core(core, p)) return true;
  if (valid_number(core)) return true;
  if (valid_time(core)) return true;
  if (valid_web_or_email(core)) return true;
  return false;
}

}  // namespace

void validate_profile(const LanguageProfile& profile) {
  if (profile.alphabet.empty())
    throw Error("profile " + profile.language + ": empty alphabet");
  for (const std::string& t : profile.extra_valid_tokens)
    for (char32_t c : uni::decode_utf8(t))
      if (is_space(c))
        throw Error("profile " + profile.language +
                    ": whitespace inside extra token");
  if (profile.direction && profile.language != "hausa" &&
      profile.language != "igbo")
    throw Error("profile " + profile.language +
                ": direction only applies to hausa/igbo");
}

std::string preprocess(std::string_view s) {
  std::u32string u = uni::decode_utf8(s);
  // the shield scalar is reserved; stray occurrences become U+FFFD
  for (char32_t& c : u)
    if (c == kShield) c = 0xFFFD;
  u = shield_unk(u);
  u = uni::to_lower(u);
  u = uni::nfc(u);
  for (char32_t& c : u) {
    switch (c) {
      case 0x2018:
      case 0x2019:
      case 0x02BC:
      case 0x02B9:
      case 0x00B4:
      case 0x0060:
        c = U'\'';
        break;
      default:
        break;
    }
  }
  return uni::encode_utf8(unshield_unk(u));
}

bool token_is_valid(std::string_view token, const LanguageProfile& profile) {
  std::u32string t = shield_unk(uni::decode_utf8(token));
  return token_valid_u32(t, profile);
}

NormalizedSentence filter(std::string_view s, const LanguageProfile& profile,
                          FilterMode mode) {
  std::u32string u = shield_unk(uni::decode_utf8(s));
  std::vector<TokenSpan> spans = token_spans(u);

  if (mode == FilterMode::kSentence) {
    for (const TokenSpan& t : spans) {
      std::u32string_view tok(u.data() + t.begin, t.end - t.begin);
      if (!token_valid_u32(tok, profile))
        return {std::string(s), SentenceStatus::kRejected, 0};
    }
    return {std::string(s), SentenceStatus::kKept, 0};
  }

  std::u32string out;
  out.reserve(u.size());
  std::size_t cur = 0;
  int replaced = 0;
  for (const TokenSpan& t : spans) {
    out.append(u, cur, t.begin - cur);
    std::u32string_view tok(u.data() + t.begin, t.end - t.begin);
    if (token_valid_u32(tok, profile)) {
      out.append(tok);
    } else {
      out.push_back(kShield);
      ++replaced;
    }
    cur = t.end;
  }
  out.append(u, cur, u.size() - cur);
  return {uni::encode_utf8(unshield_unk(out)), SentenceStatus::kKept,
          replaced};
}

std::string apply_language_rules(std::string_view s,
                                 const LanguageProfile& profile) {
  if (!profile.cascade) return std::string(s);
  std::u32string u = shield_unk(uni::decode_utf8(s));
  for (const CompiledRule& rule : profile.cascade->rules)
    u = fst::apply_u32(rule.fst, u);
  return uni::encode_utf8(unshield_unk(u));
}

std::string detach_punctuation(std::string_view s) {
  std::u32string u = shield_unk(uni::decode_utf8(s));
  std::u32string out;
  out.reserve(u.size());
  std::size_t cur = 0;
  for (const TokenSpan& t : token_spans(u)) {
    out.append(u, cur, t.begin - cur);
    std::u32string_view tok(u.data() + t.begin, t.end - t.begin);
    std::size_t b = 0, e = tok.size();
    while (b < e && uni::is_punct_or_symbol(tok[b]) && !is_word_joiner(tok[b]))
      ++b;
    while (e > b && uni::is_punct_or_symbol(tok[e - 1]) &&
           !is_word_joiner(tok[e - 1]))
      --e;
    if (b == e) {
      out.append(tok);  // token is pure punctuation; nothing to detach
    } else {
      if (b > 0) {
        out.append(tok.substr(0, b));
        out.push_back(U' ');
      }
      out.append(tok.substr(b, e - b));
      if (e < tok.size()) {
        out.push_back(U' ');
        out.append(tok.substr(e));
      }
    }
    cur = t.end;
  }
  out.append(u, cur, u.size() - cur);
  return uni::encode_utf8(unshield_unk(out));
}

std::string delete_freestanding_punct(std::string_view s) {
  std::u32string u = shield_unk(uni::decode_utf8(s));
  std::u32string out;
  out.reserve(u.size());
  std::size_t cur = 0;
  for (const TokenSpan& t : token_spans(u)) {
    out.append(u, cur, t.begin - cur);
    std::u32string_view tok(u.data() + t.begin, t.end - t.begin);
    bool all_punct = true;
    for (char32_t c : tok)
      if (!uni::is_punct_or_symbol(c)) all_punct = false;
    if (!all_punct) out.append(tok);
    cur = t.end;
  }
  out.append(u, cur, u.size() - cur);
  return uni::encode_utf8(unshield_unk(out));
}

std::string collapse_whitespace(std::string_view s) {
  std::u32string u = uni::decode_utf8(s);
  std::u32string out;
  out.reserve(u.size());
  bool pending_space = false;
  for (char32_t c : u) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(U' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return uni::encode_utf8(out);
}

NormalizeTrace normalize_trace(std::string_view s,
                               const LanguageProfile& profile,
                               FilterMode mode) {
  NormalizeTrace trace;
  std::string step1 = preprocess(s);
  trace.steps.push_back(step1);
  NormalizedSentence filtered = filter(step1, profile, mode);
  trace.steps.push_back(filtered.text);
  if (filtered.status == SentenceStatus::kRejected) {
    trace.result = std::move(filtered);
    return trace;
  }
  std::string step3 = apply_language_rules(filtered.text, profile);
  trace.steps.push_back(step3);
  std::string step4 = detach_punctuation(step3);
  trace.steps.push_back(step4);
  std::string step5 = delete_freestanding_punct(step4);
  trace.steps.push_back(step5);
  std::string step6 = collapse_whitespace(step5);
  trace.steps.push_back(step6);
  trace.result = {step6, SentenceStatus::kKept, filtered.replaced_tokens};
  return trace;
}

NormalizedSentence normalize(std::string_view s,
                             const LanguageProfile& profile, FilterMode mode) {
  return normalize_trace(s, profile, mode).result;
}

}  // namespace textnorm
