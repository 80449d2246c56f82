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

#include "textnorm/ngram.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>

namespace textnorm::ngram {

namespace {

std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < sentence.size()) {
    std::size_t sp = sentence.find(' ', pos);
    std::string_view tok = sentence.substr(
        pos, sp == std::string_view::npos ? sentence.size() - pos : sp - pos);
    if (!tok.empty()) tokens.emplace_back(tok);
    if (sp == std::string_view::npos) break;
    pos = sp + 1;
  }
  return tokens;
}

std::vector<std::string> padded(std::string_view sentence) {
  std::vector<std::string> tokens;
  tokens.emplace_back(kSentStart);
  for (std::string& t : tokenize(sentence)) tokens.push_back(std::move(t));
  tokens.emplace_back(kSentEnd);
  return tokens;
}

}  // namespace

SplitResult split(const std::vector<std::string>& corpus,
                  const SplitSpec& spec) {
  if (corpus.empty()) throw EmptyCorpus("split: empty corpus");
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // Fisher-Yates with an explicitly specified generator: the partition is
  // reproducible across platforms for a given seed.
  std::mt19937_64 gen(spec.seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::size_t j = static_cast<std::size_t>(gen() % (i + 1));
    std::swap(order[i], order[j]);
  }
  std::size_t train_n = static_cast<std::size_t>(
      std::floor(spec.train_fraction * static_cast<double>(corpus.size())));
  SplitResult result;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i < train_n)
      result.train.push_back(corpus[order[i]]);
    else
      result.test.push_back(corpus[order[i]]);
  }
  result.degenerate = result.train.empty() || result.test.empty();
  return result;
}

std::int64_t NgramModel::unigram_count(std::string_view w) const {
  auto it = unigrams.find(std::string(w));
  return it == unigrams.end() ? 0 : it->second;
}

std::int64_t NgramModel::bigram_count(std::string_view h,
                                      std::string_view w) const {
  auto it = bigrams.find({std::string(h), std::string(w)});
  return it == bigrams.end() ? 0 : it->second;
}

std::int64_t NgramModel::context_count(std::string_view h) const {
  std::string key(h);
  std::int64_t total = 0;
  for (auto it = bigrams.lower_bound({key, ""});
       it != bigrams.end() && it->first.first == key; ++it)
    total += it->second;
  return total;
}

std::string_view NgramModel::intern(std::string_view w) const {
  if (vocabulary.count(std::string(w))) return w;
  return kUnkToken;
}

NgramModel fit(const std::vector<std::string>& train) {
  if (train.empty()) throw EmptyTraining("fit: empty training corpus");
  NgramModel m;
  for (const std::string& sentence : train) {
    std::vector<std::string> toks = padded(sentence);
    for (std::size_t i = 0; i < toks.size(); ++i) {
      ++m.unigrams[toks[i]];
      ++m.total_tokens;
      if (i + 1 < toks.size()) ++m.bigrams[{toks[i], toks[i + 1]}];
      m.vocabulary.insert(toks[i]);
    }
  }
  m.vocabulary.insert(std::string(kSentStart));
  m.vocabulary.insert(std::string(kSentEnd));
  m.vocabulary.insert(std::string(kUnkToken));
  return m;
}

double prob(const NgramModel& m, std::string_view h, std::string_view w) {
  std::string_view hh = m.intern(h);
  std::string_view ww = m.intern(w);
  double num = static_cast<double>(m.bigram_count(hh, ww)) + 1.0;
  double den = static_cast<double>(m.context_count(hh)) +
               static_cast<double>(m.vocabulary.size());
  return num / den;
}

double unigram_prob(const NgramModel& m, std::string_view w) {
  std::string_view ww = m.intern(w);
  double num = static_cast<double>(m.unigram_count(ww)) + 1.0;
  double den = static_cast<double>(m.total_tokens) +
               static_cast<double>(m.vocabulary.size());
  return num / den;
}

PerplexityReport perplexity(const NgramModel& m,
                            const std::vector<std::string>& test,
                            Scoring scoring) {
  if (test.empty()) throw EmptyTest("perplexity: empty test corpus");
  PerplexityReport report;
  for (const std::string& sentence : test) {
    std::vector<std::string> toks = padded(sentence);
    if (scoring == Scoring::kEverygrams) {
      for (const std::string& t : toks) {
        report.log_prob_sum += std::log(unigram_prob(m, t));
        ++report.ngrams;
      }
    }
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
      report.log_prob_sum += std::log(prob(m, toks[i], toks[i + 1]));
      ++report.ngrams;
    }
  }
  report.perplexity =
      std::exp(-report.log_prob_sum / static_cast<double>(report.ngrams));
  return report;
}

void save_model(const NgramModel& m, std::ostream& out) {
  out << "#vocab\n";
  for (const std::string& w : m.vocabulary) out << w << "\n";
  out << "#unigrams\n";
  for (const auto& [w, c] : m.unigrams) out << w << "\t" << c << "\n";
  out << "#bigrams\n";
  for (const auto& [ww, c] : m.bigrams)
    out << ww.first << "\t" << ww.second << "\t" << c << "\n";
}

NgramModel load_model(std::istream& in) {
  NgramModel m;
  std::string line;
  int section = 0;  // 1 vocab, 2 unigrams, 3 bigrams
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "#vocab") {
      section = 1;
      continue;
    }
    if (line == "#unigrams") {
      section = 2;
      continue;
    }
    if (line == "#bigrams") {
      section = 3;
      continue;
    }
    if (line.empty()) continue;
    auto fail = [&](const char* what) {
      throw ParseError("model line " + std::to_string(lineno) + ": " + what);
    };
    switch (section) {
      case 1:
        m.vocabulary.insert(line);
        break;
      case 2: {
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos) fail("expected w<TAB>count");
        std::int64_t c = std::stoll(line.substr(tab + 1));
        m.unigrams[line.substr(0, tab)] = c;
        m.total_tokens += c;
        break;
      }
      case 3: {
        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string::npos ? std::string::npos
                                                 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) fail("expected w1<TAB>w2<TAB>count");
        m.bigrams[{line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1)}] =
            std::stoll(line.substr(t2 + 1));
        break;
      }
      default:
        fail("content before a section header");
    }
  }
  return m;
}

}  // namespace textnorm::ngram
