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

#include <random>

#include "doctest.h"
#include "textnorm/pipeline.hpp"

using namespace textnorm;

namespace {
#include "unicode_cases.inc"
}

TEST_CASE("utf8 codec round trip and validation") {
  std::u32string u = uni::decode_utf8("a\xc3\xb1\xe1\x88\x80\xf0\x9f\x99\x82");
  CHECK(u == U"añሀ\U0001F642");
  CHECK(uni::encode_utf8(u) == "a\xc3\xb1\xe1\x88\x80\xf0\x9f\x99\x82");

  CHECK_THROWS_AS(uni::decode_utf8("\xff"), InvalidUtf8);
  CHECK_THROWS_AS(uni::decode_utf8("\xc3"), InvalidUtf8);          // truncated
  CHECK_THROWS_AS(uni::decode_utf8("\xc0\xaf"), InvalidUtf8);      // overlong
  CHECK_THROWS_AS(uni::decode_utf8("\xed\xa0\x80"), InvalidUtf8);  // surrogate
}

TEST_CASE("nfc composes and orders marks") {
  CHECK(uni::nfc(U"ó") == U"ó");
  CHECK(uni::nfc(U"ó") == U"ó");
  // diaeresis on n has no precomposed form
  CHECK(uni::nfc(U"n̈") == U"n̈");
  // Cyrillic short i
  CHECK(uni::nfc(U"Й") == U"Й");
  // marks sorted by combining class: cedilla (202) before acute (230)
  CHECK(uni::nfd(U"ȩ́") == U"ȩ́");
}

TEST_CASE("lowercase uses full mappings") {
  CHECK(uni::to_lower(U"ABC") == U"abc");
  CHECK(uni::to_lower(U"İ") == U"i̇");  // dotted capital I
  CHECK(uni::to_lower(U"СОБ") == U"соб");
}

TEST_CASE("preprocess matches the reference implementation") {
  for (const auto& kase : kPreprocessCases) {
    CAPTURE(kase.in);
    CHECK(preprocess(kase.in) == kase.out);
  }
}

TEST_CASE("preprocess is idempotent on its own output") {
  for (const auto& kase : kPreprocessCases) {
    std::string once = preprocess(kase.in);
    CHECK(preprocess(once) == once);
  }
}

TEST_CASE("preprocess maps apostrophe-like scalars") {
  CHECK(preprocess("don\xe2\x80\x99t") == "don't");      // U+2019
  CHECK(preprocess("\xca\xbcyan") == "'yan");            // U+02BC
  CHECK(preprocess("a\xc2\xb4" "b\x60" "c") == "a'b'c");       // U+00B4, U+0060
}

TEST_CASE("preprocess keeps the reserved token intact") {
  CHECK(preprocess("<UNK> FIRY") == "<UNK> firy");
  // only whole tokens are reserved
  CHECK(preprocess("x<UNK>") == "x<unk>");
}

TEST_CASE("punctuation and symbol categories") {
  CHECK(uni::is_punct_or_symbol(U'?'));
  CHECK(uni::is_punct_or_symbol(U'@'));
  CHECK(uni::is_punct_or_symbol(0x00AB));  // «
  CHECK(uni::is_punct_or_symbol(0x1361));  // Ethiopic wordspace
  CHECK_FALSE(uni::is_punct_or_symbol(U'a'));
  CHECK_FALSE(uni::is_punct_or_symbol(0x1200));
  CHECK_FALSE(uni::is_punct_or_symbol(U'7'));
}

TEST_CASE("whitespace property") {
  CHECK(uni::is_whitespace(U' '));
  CHECK(uni::is_whitespace(U'\t'));
  CHECK(uni::is_whitespace(0x00A0));
  CHECK(uni::is_whitespace(0x2003));
  CHECK_FALSE(uni::is_whitespace(U'x'));
}
