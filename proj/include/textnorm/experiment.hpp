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

#ifndef TEXTNORM_EXPERIMENT_HPP_
#define TEXTNORM_EXPERIMENT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "textnorm/corpus_io.hpp"
#include "textnorm/ngram.hpp"
#include "textnorm/pipeline.hpp"

namespace textnorm::expt {

enum class RelativeDivisor { kNgrams, kBasePerplexity };

struct ExperimentOptions {
  FilterMode mode = FilterMode::kSentence;
  std::uint64_t seed = 0;
  ngram::Scoring scoring = ngram::Scoring::kEverygrams;
  RelativeDivisor divisor = RelativeDivisor::kNgrams;
};

struct ExperimentReport {
  std::string language;
  std::string source;
  double base_pp = 0.0;
  double exp_pp = 0.0;
  double raw_diff = 0.0;
  double relative_diff = 0.0;
  double diff_from_median = 0.0;
  std::size_t n_test_ngrams = 0;
  std::size_t kept = 0;
  std::size_t rejected = 0;
  double pct_rejected = 0.0;
};

// 100 * rejected / (kept + rejected), rounded half-up to 2 decimals.
// Throws EmptyCorpus when both are zero.
double rejection_stats(std::size_t kept, std::size_t rejected);

// raw = exp - base; relative = raw / divisor; from_median =
// median(all_relative_diffs) - relative.
std::tuple<double, double, double> compute_metrics(
    double base_pp, double exp_pp, std::size_t n_test_ngrams,
    const std::vector<double>& all_relative_diffs,
    RelativeDivisor divisor = RelativeDivisor::kNgrams);

double median(std::vector<double> values);

// Runs the base normalizer (steps 1,2,4,5,6) and the experiment normalizer
// (all six steps) over the sentences, filters rejected sentences out,
// partitions both with the same seed, fits and scores both models.
// diff_from_median is left at 0; finalize_medians fills it per run set.
// Throws EmptyAfterFiltering when nothing survives.
ExperimentReport run_experiment(const std::vector<std::string>& sentences,
                                const LanguageProfile& profile,
                                const std::string& source_label,
                                const ExperimentOptions& options);

// Computes the global median of relative differences over one invocation's
// reports and fills every diff_from_median.
void finalize_medians(std::vector<ExperimentReport>& reports);

struct SourceSummary {
  std::string source;
  double average = 0.0;
  double median = 0.0;
};

// Mean and median of pct_rejected grouped by source label, in first-seen
// order.
std::vector<SourceSummary> summarize_by_source(
    const std::vector<ExperimentReport>& reports);

// One experiment to run: a corpus file plus profile selection.
struct RunSpec {
  std::string language;
  corpus::SourceKind kind = corpus::SourceKind::kPlain;
  std::string label;
  std::string path;
  std::string words_path;  // ac only
  std::optional<std::string> direction;
  std::optional<std::size_t> line_limit;
};

// Runs every spec (concurrently across specs), then fills medians. Reader
// warnings are appended to *warnings when given.
std::vector<ExperimentReport> run_manifest(
    const std::vector<RunSpec>& specs, const ExperimentOptions& options,
    std::vector<std::string>* warnings = nullptr);

// TSV rendering (tab separated, header row); render_table aligns columns
// for terminals.
std::string report_tsv(const std::vector<ExperimentReport>& reports);
std::string summary_tsv(const std::vector<SourceSummary>& summaries);
std::string render_table(const std::string& tsv);

}  // namespace textnorm::expt

#endif  // TEXTNORM_EXPERIMENT_HPP_
