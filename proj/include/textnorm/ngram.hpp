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

#ifndef TEXTNORM_NGRAM_HPP_
#define TEXTNORM_NGRAM_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "textnorm/errors.hpp"

namespace textnorm::ngram {

inline constexpr std::string_view kSentStart = "<s>";
inline constexpr std::string_view kSentEnd = "</s>";
inline constexpr std::string_view kUnkToken = "<UNK>";

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

struct SplitResult {
  std::vector<std::string> train;
  std::vector<std::string> test;
  bool degenerate = false;  // one side ended up empty
};

// Deterministic seeded shuffle, first floor(fraction*n) sentences to train.
// Throws EmptyCorpus.
SplitResult split(const std::vector<std::string>& corpus,
                  const SplitSpec& spec);

// Unigram/bigram counts over <s> ... </s> padded sentences, with Laplace
// smoothing on lookup. Counts are plain data; fit() fills them.
struct NgramModel {
  std::set<std::string> vocabulary;  // observed types + reserved tokens
  std::map<std::string, std::int64_t> unigrams;
  std::map<std::pair<std::string, std::string>, std::int64_t> bigrams;
  std::int64_t total_tokens = 0;  // padded training token count

  std::int64_t unigram_count(std::string_view w) const;
  std::int64_t bigram_count(std::string_view h, std::string_view w) const;
  // outgoing bigram total for a history; equals unigram_count(h) for every
  // history that is never sentence-final, and keeps the conditional
  // distribution normalized for </s>
  std::int64_t context_count(std::string_view h) const;
  // maps out-of-vocabulary tokens to <UNK>
  std::string_view intern(std::string_view w) const;
};

// Throws EmptyTraining.
NgramModel fit(const std::vector<std::string>& train);

// P(w | h) = (c(h,w) + 1) / (c(h) + |V|), with c(h) the history's outgoing
// bigram total.
double prob(const NgramModel& m, std::string_view h, std::string_view w);

// P(w) = (c(w) + 1) / (N + |V|).
double unigram_prob(const NgramModel& m, std::string_view w);

enum class Scoring { kBigrams, kEverygrams };

struct PerplexityReport {
  double perplexity = 0.0;
  std::size_t ngrams = 0;
  double log_prob_sum = 0.0;
};

// Geometric-mean perplexity over all padded bigrams (kBigrams) or all
// padded unigrams plus bigrams (kEverygrams). Throws EmptyTest.
PerplexityReport perplexity(const NgramModel& m,
                            const std::vector<std::string>& test,
                            Scoring scoring = Scoring::kEverygrams);

// Text format: a `#vocab` section, then `#unigrams` w<TAB>count lines, then
// `#bigrams` w1<TAB>w2<TAB>count lines.
void save_model(const NgramModel& m, std::ostream& out);
NgramModel load_model(std::istream& in);

}  // namespace textnorm::ngram

#endif  // TEXTNORM_NGRAM_HPP_
