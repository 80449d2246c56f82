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

#ifndef TEXTNORM_LANG_RULES_HPP_
#define TEXTNORM_LANG_RULES_HPP_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "textnorm/pipeline.hpp"

namespace textnorm::lang {

// Collapses the Amharic grapheme series for /h/, /ts/ and the glottal stop
// onto the preferred series, aligned by vowel order within each block.
std::shared_ptr<const RuleCascade> amharic_cascade();

// Deletes a hyphen between a token-initial noun classifier and a following
// vowel.
std::shared_ptr<const RuleCascade> zulu_cascade(
    const std::vector<std::string>& classifiers);
std::shared_ptr<const RuleCascade> zulu_cascade();
const std::vector<std::string>& default_zulu_classifiers();

// n-tilde to n-diaeresis, and standalone "@" to "amin'ny".
std::shared_ptr<const RuleCascade> malagasy_cascade();

// Expands the contractions 't and 'k; 'n is left alone.
std::shared_ptr<const RuleCascade> afrikaans_cascade();

// direction "niger": 'y -> hooked y; "nigeria": the inverse.
std::shared_ptr<const RuleCascade> hausa_cascade(std::string_view direction);

// direction "onwu": NSA umlauts/tilde to subdot/overdot forms;
// "new-standard": the inverse.
std::shared_ptr<const RuleCascade> igbo_cascade(std::string_view direction);

// Profile with built-in alphabet, extras and cascade for the supported
// languages (afrikaans, amharic, hausa, igbo, malagasy, somali, swahili,
// zulu) plus "base" (Latin, no rules). Directions default to "niger" and
// "onwu".
LanguageProfile default_profile(std::string_view language,
                                std::optional<std::string> direction = {});

std::vector<std::string> supported_languages();

// Declarative key-value profile file (UTF-8, `key = value`, '#' comments):
//
//   language = zulu
//   alphabet = 0061-007A, 00F1
//   extra_valid_tokens = @
//   classifiers = i, u, ama
//   direction = niger
//   cascade = zulu            # or none
//
// Unspecified keys fall back to the language's built-in defaults.
LanguageProfile load_profile(const std::string& path);
LanguageProfile parse_profile(std::string_view text);

}  // namespace textnorm::lang

#endif  // TEXTNORM_LANG_RULES_HPP_
