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

#include "textnorm/lang_rules.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "textnorm/rewrite.hpp"
#include "textnorm/unicode.hpp"

namespace textnorm::lang {

namespace {

using fst::Fst;
using fst::RewriteRule;

Fst ws_class() {
  return fst::char_class({{0x09, 0x0D},
                          {0x20, 0x20},
                          {0x85, 0x85},
                          {0xA0, 0xA0},
                          {0x1680, 0x1680},
                          {0x2000, 0x200A},
                          {0x2028, 0x2029},
                          {0x202F, 0x202F},
                          {0x205F, 0x205F},
                          {0x3000, 0x3000}});
}

Fst boundary_left() { return fst::union_of(fst::bos(), ws_class()); }
Fst boundary_right() { return fst::union_of(ws_class(), fst::eos()); }

Fst map_scalar(char32_t from, char32_t to) {
  return fst::cross(fst::literal_u32({&from, 1}), fst::literal_u32({&to, 1}));
}

Fst map_string(std::u32string_view from, std::u32string_view to) {
  return fst::cross(fst::literal_u32(from), fst::literal_u32(to));
}

CompiledRule compile(std::string name, RewriteRule rule) {
  Fst sigma = fst::star(fst::any_scalar());
  return {std::move(name), fst::compile_rewrite(rule, sigma)};
}

std::shared_ptr<const RuleCascade> make_cascade(
    std::string language, std::optional<std::string> direction,
    std::vector<CompiledRule> rules) {
  auto cascade = std::make_shared<RuleCascade>();
  cascade->language = std::move(language);
  cascade->direction = std::move(direction);
  cascade->rules = std::move(rules);
  return cascade;
}

}  // namespace

std::shared_ptr<const RuleCascade> amharic_cascade() {
  struct Series {
    char32_t from;
    int width;
    char32_t to;
  };
  // non-preferred series -> preferred series, aligned by vowel order;
  // the lone labiovelar base at offset 8 drops its labialization
  static constexpr Series kSeries[] = {
      {0x1210, 8, 0x1200},  // h
      {0x1280, 9, 0x1200},  // h
      {0x12B8, 8, 0x1200},  // h
      {0x12D0, 8, 0x12A0},  // glottal stop
      {0x1348, 8, 0x1338},  // ts
  };
  std::optional<Fst> tau;
  for (const Series& s : kSeries) {
    for (int k = 0; k < s.width; ++k) {
      Fst m = map_scalar(s.from + k, s.to + (k % 8));
      tau = tau ? fst::union_of(*tau, m) : std::move(m);
    }
  }
  std::vector<CompiledRule> rules;
  rules.push_back(compile("amharic-grapheme-series",
                          fst::context_free_rule(std::move(*tau))));
  return make_cascade("amharic", std::nullopt, std::move(rules));
}

const std::vector<std::string>& default_zulu_classifiers() {
  static const std::vector<std::string> kClassifiers = {
      "i",   "u",   "a",   "o",   "e",   "um",  "im",  "in",  "isi",
      "izi", "ama", "aba", "ubu", "uku", "ulu", "izin", "imi", "ili"};
  return kClassifiers;
}

std::shared_ptr<const RuleCascade> zulu_cascade(
    const std::vector<std::string>& classifiers) {
  if (classifiers.empty()) throw Error("zulu cascade: empty classifier list");
  std::optional<Fst> cls;
  for (const std::string& c : classifiers) {
    Fst m = fst::literal(c);
    cls = cls ? fst::union_of(*cls, m) : std::move(m);
  }
  RewriteRule rule{
      map_string(U"-", U""),
      fst::concat(boundary_left(), fst::optimize(*cls)),
      fst::char_class({{U'a', U'a'}, {U'e', U'e'}, {U'i', U'i'},
                       {U'o', U'o'}, {U'u', U'u'}})};
  std::vector<CompiledRule> rules;
  rules.push_back(compile("zulu-classifier-hyphen", std::move(rule)));
  return make_cascade("zulu", std::nullopt, std::move(rules));
}

std::shared_ptr<const RuleCascade> zulu_cascade() {
  return zulu_cascade(default_zulu_classifiers());
}

std::shared_ptr<const RuleCascade> malagasy_cascade() {
  std::vector<CompiledRule> rules;
  rules.push_back(compile(
      "malagasy-n-diaeresis",
      fst::context_free_rule(map_string(U"ñ", U"n̈"))));
  rules.push_back(compile(
      "malagasy-at-sign",
      RewriteRule{map_string(U"@", U"amin'ny"), boundary_left(),
                  boundary_right()}));
  return make_cascade("malagasy", std::nullopt, std::move(rules));
}

std::shared_ptr<const RuleCascade> afrikaans_cascade() {
  RewriteRule rule{
      fst::union_of(map_string(U"'t", U"het"), map_string(U"'k", U"ek")),
      boundary_left(), boundary_right()};
  std::vector<CompiledRule> rules;
  rules.push_back(compile("afrikaans-contractions", std::move(rule)));
  return make_cascade("afrikaans", std::nullopt, std::move(rules));
}

std::shared_ptr<const RuleCascade> hausa_cascade(std::string_view direction) {
  std::vector<CompiledRule> rules;
  if (direction == "niger") {
    rules.push_back(compile(
        "hausa-y-hook", fst::context_free_rule(map_string(U"'y", U"ƴ"))));
  } else if (direction == "nigeria") {
    rules.push_back(compile(
        "hausa-y-hook", fst::context_free_rule(map_string(U"ƴ", U"'y"))));
  } else {
    throw Error("hausa cascade: direction must be niger or nigeria");
  }
  return make_cascade("hausa", std::string(direction), std::move(rules));
}

std::shared_ptr<const RuleCascade> igbo_cascade(std::string_view direction) {
  // composed forms plus their combining-mark spellings
  struct Pair {
    std::u32string nsa_composed, nsa_decomposed;
    std::u32string onwu_composed, onwu_decomposed;
  };
  static const Pair kPairs[] = {
      {U"ö", U"ö", U"ọ", U"ọ"},
      {U"ü", U"ü", U"ụ", U"ụ"},
      {U"ñ", U"ñ", U"ṅ", U"ṅ"},
  };
  std::optional<Fst> tau;
  for (const Pair& p : kPairs) {
    Fst m1, m2;
    if (direction == "onwu") {
      m1 = map_string(p.nsa_composed, p.onwu_composed);
      m2 = map_string(p.nsa_decomposed, p.onwu_composed);
    } else if (direction == "new-standard") {
      m1 = map_string(p.onwu_composed, p.nsa_composed);
      m2 = map_string(p.onwu_decomposed, p.nsa_composed);
    } else {
      throw Error("igbo cascade: direction must be onwu or new-standard");
    }
    Fst m = fst::union_of(std::move(m1), std::move(m2));
    tau = tau ? fst::union_of(*tau, m) : std::move(m);
  }
  std::vector<CompiledRule> rules;
  rules.push_back(
      compile("igbo-orthography", fst::context_free_rule(std::move(*tau))));
  return make_cascade("igbo", std::string(direction), std::move(rules));
}

namespace {

std::vector<std::pair<char32_t, char32_t>> latin_alphabet() {
  return {{0x61, 0x7A}, {0xDF, 0xF6}, {0xF8, 0xFF}, {0x300, 0x36F}};
}

std::vector<std::pair<char32_t, char32_t>> amharic_alphabet() {
  return {{0x1200, 0x135A}, {0x135D, 0x135F}};
}

}  // namespace

std::vector<std::string> supported_languages() {
  return {"afrikaans", "amharic", "base",  "hausa", "igbo",
          "malagasy",  "somali",  "swahili", "zulu"};
}

LanguageProfile default_profile(std::string_view language,
                                std::optional<std::string> direction) {
  LanguageProfile p;
  p.language = std::string(language);
  p.alphabet = latin_alphabet();

  if (language == "amharic") {
    p.alphabet = amharic_alphabet();
    p.cascade = amharic_cascade();
  } else if (language == "zulu") {
    p.cascade = zulu_cascade();
  } else if (language == "malagasy") {
    p.extra_valid_tokens.insert("@");
    p.cascade = malagasy_cascade();
  } else if (language == "afrikaans") {
    p.cascade = afrikaans_cascade();
  } else if (language == "hausa") {
    p.alphabet.push_back({0x199, 0x199});
    p.alphabet.push_back({0x1B4, 0x1B4});
    p.alphabet.push_back({0x253, 0x253});
    p.alphabet.push_back({0x257, 0x257});
    p.direction = direction.value_or("niger");
    p.cascade = hausa_cascade(*p.direction);
  } else if (language == "igbo") {
    p.alphabet.push_back({0x1E45, 0x1E45});
    p.alphabet.push_back({0x1ECB, 0x1ECB});
    p.alphabet.push_back({0x1ECD, 0x1ECD});
    p.alphabet.push_back({0x1EE5, 0x1EE5});
    p.direction = direction.value_or("onwu");
    p.cascade = igbo_cascade(*p.direction);
  } else if (language == "somali" || language == "swahili" ||
             language == "base") {
    // quality-only languages: no rules
  } else {
    throw Error("unknown language: " + std::string(language));
  }
  validate_profile(p);
  return p;
}

// -- Profile files -------------------------------------------------------------

namespace {

std::string trim_copy(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::string t = trim_copy(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::vector<std::pair<char32_t, char32_t>> parse_ranges(const std::string& v) {
  std::vector<std::pair<char32_t, char32_t>> ranges;
  for (const std::string& item : split_list(v)) {
    std::size_t dash = item.find('-');
    auto hex = [&](const std::string& h) {
      return static_cast<char32_t>(std::stoul(h, nullptr, 16));
    };
    try {
      if (dash == std::string::npos) {
        char32_t c = hex(item);
        ranges.push_back({c, c});
      } else {
        ranges.push_back({hex(item.substr(0, dash)), hex(item.substr(dash + 1))});
      }
    } catch (const std::exception&) {
      throw ParseError("profile: bad alphabet range '" + item + "'");
    }
  }
  return ranges;
}

}  // namespace

LanguageProfile parse_profile(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    std::string t = trim_copy(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("profile: expected 'key = value': " + t);
    kv[trim_copy(t.substr(0, eq))] = trim_copy(t.substr(eq + 1));
  }

  std::string language = kv.count("language") ? kv["language"] : "base";
  std::optional<std::string> direction;
  if (kv.count("direction")) direction = kv["direction"];

  LanguageProfile p;
  bool known = true;
  try {
    p = default_profile(language, direction);
  } catch (const Error&) {
    known = false;
    p.language = language;
    p.alphabet = latin_alphabet();
    p.direction = direction;
  }

  if (kv.count("alphabet")) p.alphabet = parse_ranges(kv["alphabet"]);
  if (kv.count("extra_valid_tokens")) {
    p.extra_valid_tokens.clear();
    for (const std::string& t : split_list(kv["extra_valid_tokens"]))
      p.extra_valid_tokens.insert(t);
  }

  std::string cascade =
      kv.count("cascade") ? kv["cascade"] : (known ? "" : "none");
  if (cascade == "none") {
    p.cascade = nullptr;
  } else if (!cascade.empty()) {
    if (cascade == "amharic") {
      p.cascade = amharic_cascade();
    } else if (cascade == "zulu") {
      p.cascade = kv.count("classifiers")
                      ? zulu_cascade(split_list(kv["classifiers"]))
                      : zulu_cascade();
    } else if (cascade == "malagasy") {
      p.cascade = malagasy_cascade();
    } else if (cascade == "afrikaans") {
      p.cascade = afrikaans_cascade();
    } else if (cascade == "hausa") {
      p.cascade = hausa_cascade(direction.value_or("niger"));
    } else if (cascade == "igbo") {
      p.cascade = igbo_cascade(direction.value_or("onwu"));
    } else {
      throw ParseError("profile: unknown cascade '" + cascade + "'");
    }
  } else if (kv.count("classifiers") && language == "zulu") {
    p.cascade = zulu_cascade(split_list(kv["classifiers"]));
  }

  validate_profile(p);
  return p;
}

LanguageProfile load_profile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open profile file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_profile(ss.str());
}

}  // namespace textnorm::lang
