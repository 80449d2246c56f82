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

#ifndef TEXTNORM_PIPELINE_HPP_
#define TEXTNORM_PIPELINE_HPP_

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "textnorm/fst.hpp"

namespace textnorm {

// The placeholder token substituted for invalid tokens. Reserved verbatim
// and exempt from every pipeline step.
inline constexpr std::string_view kUnk = "<UNK>";

struct CompiledRule {
  std::string name;
  fst::Fst fst;
};

// One pipeline step's worth of rewrite rules for one language, applied in
// order. Compiled once, immutable afterwards.
struct RuleCascade {
  std::string language;
  std::optional<std::string> direction;
  std::vector<CompiledRule> rules;
};

struct LanguageProfile {
  std::string language;
  // letters and combining marks, post-lowercasing; digits are universal
  std::vector<std::pair<char32_t, char32_t>> alphabet;
  std::set<std::string> extra_valid_tokens;
  std::shared_ptr<const RuleCascade> cascade;  // nullptr: no rules
  std::optional<std::string> direction;
};

// Throws Error when a profile invariant is broken (empty alphabet,
// whitespace inside an extra token, direction on a language without one).
void validate_profile(const LanguageProfile& profile);

enum class FilterMode { kSentence, kToken };

enum class SentenceStatus { kKept, kRejected };

struct NormalizedSentence {
  std::string text;
  SentenceStatus status = SentenceStatus::kKept;
  int replaced_tokens = 0;  // token mode only
};

// Step 1: lowercase, NFC, apostrophe-like scalars to U+0027.
std::string preprocess(std::string_view s);

// Step 2: every whitespace token is tested against the valid-token grammar
// (word with optional edge punctuation, time, capped number, web/email
// address, or a profile extra). Sentence mode rejects the whole sentence on
// any invalid token; token mode substitutes <UNK>.
NormalizedSentence filter(std::string_view s, const LanguageProfile& profile,
                          FilterMode mode);

// Step 3: the profile's rule cascade, in order; identity without one.
// <UNK> tokens are shielded from rewriting.
std::string apply_language_rules(std::string_view s,
                                 const LanguageProfile& profile);

// Step 4: moves maximal leading/trailing punctuation runs of each token into
// tokens of their own. U+0027 and U+002D are never detached.
std::string detach_punctuation(std::string_view s);

// Step 5: removes tokens made solely of punctuation, keeping the spacing
// around them for step 6.
std::string delete_freestanding_punct(std::string_view s);

// Step 6: whitespace runs to one U+0020, ends trimmed.
std::string collapse_whitespace(std::string_view s);

// Steps 1-6 in order; rejected sentences (sentence mode) skip steps 3-6 and
// carry the preprocessed text.
NormalizedSentence normalize(std::string_view s,
                             const LanguageProfile& profile, FilterMode mode);

struct NormalizeTrace {
  std::vector<std::string> steps;  // six entries, one per step
  NormalizedSentence result;
};

NormalizeTrace normalize_trace(std::string_view s,
                               const LanguageProfile& profile,
                               FilterMode mode);

// Token-grammar entry point, exposed for tests and tooling.
bool token_is_valid(std::string_view token, const LanguageProfile& profile);

}  // namespace textnorm

#endif  // TEXTNORM_PIPELINE_HPP_
