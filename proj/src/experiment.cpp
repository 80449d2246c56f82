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

#include "textnorm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <map>
#include <sstream>

#include "textnorm/lang_rules.hpp"

namespace textnorm::expt {

namespace {

std::string fmt(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace

double rejection_stats(std::size_t kept, std::size_t rejected) {
  if (kept + rejected == 0)
    throw EmptyCorpus("rejection_stats: no sentences");
  double pct = 100.0 * static_cast<double>(rejected) /
               static_cast<double>(kept + rejected);
  return std::floor(pct * 100.0 + 0.5) / 100.0;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error("median of an empty set");
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

std::tuple<double, double, double> compute_metrics(
    double base_pp, double exp_pp, std::size_t n_test_ngrams,
    const std::vector<double>& all_relative_diffs, RelativeDivisor divisor) {
  double raw = exp_pp - base_pp;
  double rel = divisor == RelativeDivisor::kNgrams
                   ? raw / static_cast<double>(n_test_ngrams)
                   : raw / base_pp;
  double from_median = median(all_relative_diffs) - rel;
  return {raw, rel, from_median};
}

ExperimentReport run_experiment(const std::vector<std::string>& sentences,
                                const LanguageProfile& profile,
                                const std::string& source_label,
                                const ExperimentOptions& options) {
  LanguageProfile base_profile = profile;
  base_profile.cascade = nullptr;

  std::vector<std::string> base_kept, exp_kept;
  std::size_t rejected = 0;
  for (const std::string& s : sentences) {
    NormalizedSentence b = normalize(s, base_profile, options.mode);
    NormalizedSentence e = normalize(s, profile, options.mode);
    if (b.status != e.status)
      throw Error("rule application changed sentence validity");
    if (b.status == SentenceStatus::kRejected) {
      ++rejected;
      continue;
    }
    base_kept.push_back(std::move(b.text));
    exp_kept.push_back(std::move(e.text));
  }
  if (base_kept.empty())
    throw EmptyAfterFiltering("experiment " + source_label +
                              ": no sentences survive filtering");

  ngram::SplitSpec spec{0.8, options.seed};
  ngram::SplitResult base_split = ngram::split(base_kept, spec);
  ngram::SplitResult exp_split = ngram::split(exp_kept, spec);

  ExperimentReport report;
  report.language = profile.language;
  report.source = source_label;
  report.kept = base_kept.size();
  report.rejected = rejected;
  report.pct_rejected = rejection_stats(report.kept, report.rejected);

  if (base_split.degenerate)
    throw EmptyAfterFiltering("experiment " + source_label +
                              ": degenerate train/test split");

  ngram::NgramModel base_model = ngram::fit(base_split.train);
  ngram::NgramModel exp_model = ngram::fit(exp_split.train);
  ngram::PerplexityReport base_pp =
      ngram::perplexity(base_model, base_split.test, options.scoring);
  ngram::PerplexityReport exp_pp =
      ngram::perplexity(exp_model, exp_split.test, options.scoring);
  if (base_pp.ngrams != exp_pp.ngrams)
    throw Error("rule application changed the scored ngram count");

  report.base_pp = base_pp.perplexity;
  report.exp_pp = exp_pp.perplexity;
  report.n_test_ngrams = base_pp.ngrams;
  report.raw_diff = report.exp_pp - report.base_pp;
  report.relative_diff =
      options.divisor == RelativeDivisor::kNgrams
          ? report.raw_diff / static_cast<double>(report.n_test_ngrams)
          : report.raw_diff / report.base_pp;
  return report;
}

void finalize_medians(std::vector<ExperimentReport>& reports) {
  if (reports.empty()) return;
  std::vector<double> rel;
  rel.reserve(reports.size());
  for (const ExperimentReport& r : reports) rel.push_back(r.relative_diff);
  double med = median(std::move(rel));
  for (ExperimentReport& r : reports)
    r.diff_from_median = med - r.relative_diff;
}

std::vector<SourceSummary> summarize_by_source(
    const std::vector<ExperimentReport>& reports) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> groups;
  for (const ExperimentReport& r : reports) {
    if (!groups.count(r.source)) order.push_back(r.source);
    groups[r.source].push_back(r.pct_rejected);
  }
  std::vector<SourceSummary> out;
  for (const std::string& src : order) {
    const std::vector<double>& v = groups[src];
    double sum = 0.0;
    for (double x : v) sum += x;
    out.push_back({src, sum / static_cast<double>(v.size()), median(v)});
  }
  return out;
}

std::vector<ExperimentReport> run_manifest(
    const std::vector<RunSpec>& specs, const ExperimentOptions& options,
    std::vector<std::string>* warnings) {
  std::vector<std::future<std::pair<ExperimentReport, corpus::ReadStats>>>
      futures;
  for (const RunSpec& spec : specs) {
    futures.push_back(std::async(std::launch::async, [&options, spec]() {
      corpus::ReadStats stats;
      std::vector<std::string> sentences = corpus::read_source(
          spec.kind, spec.path, spec.words_path, spec.line_limit, &stats);
      LanguageProfile profile =
          lang::default_profile(spec.language, spec.direction);
      ExperimentReport report =
          run_experiment(sentences, profile, spec.label, options);
      return std::make_pair(std::move(report), std::move(stats));
    }));
  }
  std::vector<ExperimentReport> reports;
  for (std::size_t i = 0; i < futures.size(); ++i) {
    auto [report, stats] = futures[i].get();
    if (warnings)
      for (const std::string& w : stats.warnings)
        warnings->push_back(specs[i].label + ": " + w);
    reports.push_back(std::move(report));
  }
  finalize_medians(reports);
  return reports;
}

std::string report_tsv(const std::vector<ExperimentReport>& reports) {
  std::ostringstream out;
  out << "language\tsource\tbase_pp\texp_pp\traw_diff\trelative_diff"
         "\tdiff_from_median\tn_test_ngrams\tkept\trejected\tpct_rejected\n";
  for (const ExperimentReport& r : reports) {
    out << r.language << "\t" << r.source << "\t" << fmt(r.base_pp, 2) << "\t"
        << fmt(r.exp_pp, 2) << "\t" << fmt(r.raw_diff, 2) << "\t"
        << fmt(r.relative_diff, 8) << "\t" << fmt(r.diff_from_median, 8)
        << "\t" << r.n_test_ngrams << "\t" << r.kept << "\t" << r.rejected
        << "\t" << fmt(r.pct_rejected, 2) << "\n";
  }
  return out.str();
}

std::string summary_tsv(const std::vector<SourceSummary>& summaries) {
  std::ostringstream out;
  out << "source\taverage_pct_rejected\tmedian_pct_rejected\n";
  for (const SourceSummary& s : summaries)
    out << s.source << "\t" << fmt(s.average, 2) << "\t" << fmt(s.median, 2)
        << "\n";
  return out.str();
}

std::string render_table(const std::string& tsv) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(tsv);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
      std::size_t tab = line.find('\t', pos);
      cells.push_back(line.substr(
          pos, tab == std::string::npos ? std::string::npos : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    rows.push_back(std::move(cells));
  }
  std::vector<std::size_t> widths;
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (widths.size() <= i) widths.resize(i + 1, 0);
      widths[i] = std::max(widths[i], row[i].size());
    }
  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << "  ";
      out << row[i];
      if (i + 1 < row.size())
        out << std::string(widths[i] - row[i].size(), ' ');
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace textnorm::expt
