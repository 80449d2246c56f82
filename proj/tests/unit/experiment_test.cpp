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

#include <cmath>
#include <random>

#include "doctest.h"
#include "textnorm/lang_rules.hpp"

using namespace textnorm;
using namespace textnorm::expt;

namespace {

// sentences over a small clean vocabulary, seeded
std::vector<std::string> synthetic_corpus(std::size_t n, std::uint64_t seed,
                                          bool with_contractions,
                                          double contraction_rate = 0.5) {
  const char* vocab[] = {"die", "man", "loop", "straat", "op", "en",
                         "vrou", "sien", "hond", "groot", "was", "goed"};
  std::mt19937_64 gen(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string s;
    int len = 4 + static_cast<int>(gen() % 5);
    for (int k = 0; k < len; ++k) {
      if (k) s += " ";
      s += vocab[gen() % 12];
    }
    // a "het" token in every sentence, written 't half the time
    s += " ";
    bool contract = with_contractions && (gen() % 1000) <
                                             contraction_rate * 1000;
    s += contract ? "'t" : "het";
    s += " ";
    s += vocab[gen() % 12];
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("rejection arithmetic matches printed rows") {
  CHECK(rejection_stats(1047, 27) == doctest::Approx(2.51).epsilon(1e-12));
  CHECK(rejection_stats(8, 171) == doctest::Approx(95.53).epsilon(1e-12));
  CHECK(rejection_stats(41276, 8724) == doctest::Approx(17.45).epsilon(1e-12));
  CHECK(rejection_stats(100, 0) == 0.0);
  CHECK_THROWS_AS(rejection_stats(0, 0), EmptyCorpus);
}

TEST_CASE("metric columns") {
  std::vector<double> all = {-0.00302080, -0.00003489, -0.00003489};
  auto [raw, rel, from_median] =
      compute_metrics(2248.49, 2241.58, 2288, all, RelativeDivisor::kNgrams);
  CHECK(raw == doctest::Approx(-6.91).epsilon(1e-9));
  CHECK(from_median == doctest::Approx(-0.00003489 - rel).epsilon(1e-12));

  // relative equal to the median: difference is zero
  auto [r2, rel2, fm2] =
      compute_metrics(100.0, 100.0 - 0.00003489 * 1.0, 1,
                      std::vector<double>{-0.00003489}, RelativeDivisor::kNgrams);
  CHECK(r2 == doctest::Approx(-0.00003489));
  CHECK(fm2 == doctest::Approx(0.0).epsilon(1e-12));

  // zero-change row against a negative median
  auto [r3, rel3, fm3] = compute_metrics(
      5298.80, 5298.80, 100, std::vector<double>{-0.00003489, 0.0},
      RelativeDivisor::kNgrams);
  CHECK(r3 == 0.0);
  CHECK(rel3 == 0.0);
  CHECK(fm3 == doctest::Approx((-0.00003489 + 0.0) / 2).epsilon(1e-12));

  // alternate divisor
  auto [r4, rel4, fm4] = compute_metrics(200.0, 150.0, 1000,
                                         std::vector<double>{0.0},
                                         RelativeDivisor::kBasePerplexity);
  CHECK(rel4 == doctest::Approx(-0.25));
  (void)fm4;
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK(median({7.5}) == 7.5);
  CHECK_THROWS_AS(median({}), Error);
}

TEST_CASE("summarize_by_source") {
  std::vector<ExperimentReport> reports(3);
  reports[0].source = "AC";
  reports[0].pct_rejected = 17.45;
  reports[1].source = "AC";
  reports[1].pct_rejected = 18.48;
  reports[2].source = "UD";
  reports[2].pct_rejected = 2.51;
  std::vector<SourceSummary> sum = summarize_by_source(reports);
  REQUIRE(sum.size() == 2);
  CHECK(sum[0].source == "AC");
  CHECK(sum[0].average == doctest::Approx(17.965));
  CHECK(sum[0].median == doctest::Approx(17.965));
  CHECK(sum[1].source == "UD");
  CHECK(sum[1].average == doctest::Approx(2.51));
  CHECK(sum[1].median == doctest::Approx(2.51));
}

TEST_CASE("empty cascade: base and experiment outputs are identical") {
  LanguageProfile somali = lang::default_profile("somali");
  std::vector<std::string> corpus = synthetic_corpus(60, 4, false);
  LanguageProfile base = somali;
  base.cascade = nullptr;
  for (const std::string& s : corpus) {
    CHECK(normalize(s, base, FilterMode::kSentence).text ==
          normalize(s, somali, FilterMode::kSentence).text);
  }
  ExperimentOptions opt;
  ExperimentReport r = run_experiment(corpus, somali, "synthetic", opt);
  CHECK(r.raw_diff == 0.0);
  CHECK(r.base_pp == r.exp_pp);
}

TEST_CASE("contraction expansion lowers perplexity on a crafted corpus") {
  LanguageProfile afrikaans = lang::default_profile("afrikaans");
  std::vector<std::string> corpus = synthetic_corpus(400, 7, true);
  ExperimentOptions opt;
  opt.seed = 0;
  ExperimentReport r = run_experiment(corpus, afrikaans, "crafted", opt);
  CHECK(r.exp_pp < r.base_pp);
  CHECK(r.kept == 400);
  CHECK(r.rejected == 0);
  CHECK(r.n_test_ngrams > 0);

  // zero contractions: the cascade has nothing to do
  std::vector<std::string> clean = synthetic_corpus(400, 7, false);
  ExperimentReport rc = run_experiment(clean, afrikaans, "clean", opt);
  CHECK(rc.exp_pp == rc.base_pp);
  CHECK(rc.raw_diff == 0.0);
}

TEST_CASE("experiment with nothing surviving the filter") {
  LanguageProfile base = lang::default_profile("base");
  std::vector<std::string> corpus = {
      "\xd1\x81\xd0\xbe\xd0\xb1\xd0\xb0\xd0\xba\xd0\xb0",
      "1234567 9999999"};
  ExperimentOptions opt;
  CHECK_THROWS_AS(run_experiment(corpus, base, "bad", opt),
                  EmptyAfterFiltering);
}

TEST_CASE("experiments are deterministic") {
  LanguageProfile afrikaans = lang::default_profile("afrikaans");
  std::vector<std::string> corpus = synthetic_corpus(150, 9, true);
  ExperimentOptions opt;
  opt.seed = 42;
  ExperimentReport a = run_experiment(corpus, afrikaans, "x", opt);
  ExperimentReport b = run_experiment(corpus, afrikaans, "x", opt);
  CHECK(a.base_pp == b.base_pp);
  CHECK(a.exp_pp == b.exp_pp);
  CHECK(a.n_test_ngrams == b.n_test_ngrams);
}

TEST_CASE("injected invalid sentences set the rejection rate exactly") {
  std::vector<std::string> corpus = synthetic_corpus(95, 12, false);
  for (int i = 0; i < 5; ++i)
    corpus.insert(corpus.begin() + i * 17,
                  "\xd1\x81\xd0\xbe\xd0\xb1\xd0\xb0\xd0\xba\xd0\xb0 "
                  "nommer 1234567");
  REQUIRE(corpus.size() == 100);
  LanguageProfile base = lang::default_profile("base");
  std::size_t kept = 0, rejected = 0;
  for (const std::string& s : corpus) {
    if (normalize(s, base, FilterMode::kSentence).status ==
        SentenceStatus::kRejected)
      ++rejected;
    else
      ++kept;
  }
  CHECK(rejected == 5);
  CHECK(rejection_stats(kept, rejected) == doctest::Approx(5.0));
}

TEST_CASE("finalize_medians recovers each relative difference") {
  std::vector<ExperimentReport> reports(4);
  reports[0].relative_diff = -0.004;
  reports[1].relative_diff = -0.001;
  reports[2].relative_diff = 0.0;
  reports[3].relative_diff = -0.002;
  finalize_medians(reports);
  double med = median({-0.004, -0.001, 0.0, -0.002});
  for (const ExperimentReport& r : reports)
    CHECK(med - r.diff_from_median == doctest::Approx(r.relative_diff));
}

TEST_CASE("run_manifest over plain files") {
  std::vector<std::string> corpus = synthetic_corpus(80, 3, true);
  std::string path = "/tmp/textnorm_manifest_test.txt";
  corpus::write_plain(path, corpus);
  RunSpec spec;
  spec.language = "afrikaans";
  spec.kind = corpus::SourceKind::kPlain;
  spec.label = "crafted-plain";
  spec.path = path;
  ExperimentOptions opt;
  std::vector<std::string> warnings;
  std::vector<ExperimentReport> reports =
      run_manifest({spec, spec}, opt, &warnings);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].base_pp == reports[1].base_pp);
  CHECK(reports[0].diff_from_median == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("tsv rendering") {
  std::vector<ExperimentReport> reports(1);
  reports[0].language = "amharic";
  reports[0].source = "UD";
  reports[0].base_pp = 2248.49;
  reports[0].exp_pp = 2241.58;
  reports[0].raw_diff = -6.91;
  reports[0].relative_diff = -0.00302080;
  reports[0].diff_from_median = 0.00298591;
  reports[0].n_test_ngrams = 2288;
  reports[0].kept = 1047;
  reports[0].rejected = 27;
  reports[0].pct_rejected = 2.51;
  std::string tsv = report_tsv(reports);
  CHECK(tsv.find("amharic\tUD\t2248.49\t2241.58\t-6.91\t-0.00302080\t"
                 "0.00298591\t2288\t1047\t27\t2.51") != std::string::npos);
  std::string table = render_table(tsv);
  CHECK(table.find("amharic") != std::string::npos);
}
