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

#ifndef TEXTNORM_REWRITE_HPP_
#define TEXTNORM_REWRITE_HPP_

#include <string_view>
#include <vector>

#include "textnorm/fst.hpp"

namespace textnorm::fst {

// A context-dependent rewrite rule: tau applied obligatorily, scanning left
// to right with the longest match at each position, wherever the left and
// right context acceptors hold. Contexts are matched against the original
// input string: `left` against some suffix of the input consumed so far
// (kBos marks the string start), `right` against a prefix of the remaining
// input (kEos marks the string end). Replaced spans are not rescanned.
struct RewriteRule {
  Fst tau;    // the replacement transduction
  Fst left;   // left-context acceptor
  Fst right;  // right-context acceptor
};

// Rule with both contexts empty (match everywhere).
RewriteRule context_free_rule(Fst tau);

// Compiles the rule into a single functional transducer, total over sigma*
// (and over any other scalar input; unmatched spans pass through
// identically). sigma is the closure of an alphabet acceptor; its explicit
// labels join the rule's working alphabet. Throws BadRule for structural
// violations (non-acceptor contexts, boundary labels inside tau, an
// epsilon-matching tau with a trivial context) and AmbiguousRule if the
// compiled transducer is not functional.
Fst compile_rewrite(const RewriteRule& rule, const Fst& sigma);

// Textual rule format, one rule per line:
//
//   LHS -> RHS
//   LHS -> RHS / LEFT _ RIGHT
//
// Fields are UTF-8 literals; empty contexts are permitted. [BOS] and [EOS]
// mark the string boundaries inside context fields. Escapes: \s (space),
// \t, \\ and \[.
RewriteRule parse_rule(std::string_view line);

// Parses a whole rule file; blank lines and lines starting with '#' are
// skipped.
std::vector<RewriteRule> parse_rules(std::string_view text);

}  // namespace textnorm::fst

#endif  // TEXTNORM_REWRITE_HPP_
