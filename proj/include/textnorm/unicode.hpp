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

#ifndef TEXTNORM_UNICODE_HPP_
#define TEXTNORM_UNICODE_HPP_

#include <string>
#include <string_view>

#include "textnorm/errors.hpp"

namespace textnorm::uni {

// UTF-8 <-> scalar sequences. Decoding rejects malformed bytes, surrogates
// and overlong forms.
std::u32string decode_utf8(std::string_view s);  // throws InvalidUtf8
std::string encode_utf8(std::u32string_view s);

// Unicode default (non-locale) lowercase, including the one multi-scalar
// mapping (U+0130 -> "i" + U+0307). No Final_Sigma context handling.
std::u32string to_lower(std::u32string_view s);

// Normalization Form C: canonical decomposition, canonical ordering,
// canonical composition (including algorithmic Hangul).
std::u32string nfc(std::u32string_view s);
std::u32string nfd(std::u32string_view s);

int combining_class(char32_t c);

// General category in P* or S*.
bool is_punct_or_symbol(char32_t c);

// White_Space property.
bool is_whitespace(char32_t c);

bool is_ascii_digit(char32_t c);

}  // namespace textnorm::uni

#endif  // TEXTNORM_UNICODE_HPP_
