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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "textnorm/experiment.hpp"
#include "textnorm/lang_rules.hpp"
#include "textnorm/ngram.hpp"
#include "textnorm/pipeline.hpp"
#include "textnorm/rewrite.hpp"

namespace py = pybind11;
using namespace textnorm;

namespace {

LanguageProfile resolve_profile(const std::string& language,
                                const std::optional<std::string>& direction) {
  return lang::default_profile(language, direction);
}

FilterMode parse_mode(const std::string& mode) {
  if (mode == "sentence") return FilterMode::kSentence;
  if (mode == "token") return FilterMode::kToken;
  throw Error("mode must be 'sentence' or 'token'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Text normalization and corpus quality toolkit";

  py::register_exception<Error>(m, "TextnormError");

  m.def("preprocess", &preprocess, py::arg("text"),
        "Lowercase, NFC-normalize and fold apostrophe-like characters");

  m.def(
      "normalize",
      [](const std::string& text, const std::string& language,
         const std::string& mode, std::optional<std::string> direction) {
        LanguageProfile p = resolve_profile(language, direction);
        NormalizedSentence n = normalize(text, p, parse_mode(mode));
        return py::make_tuple(n.text, n.status == SentenceStatus::kKept,
                              n.replaced_tokens);
      },
      py::arg("text"), py::arg("language") = "base",
      py::arg("mode") = "sentence", py::arg("direction") = std::nullopt,
      "Returns (text, kept, replaced_tokens)");

  m.def(
      "normalize_trace",
      [](const std::string& text, const std::string& language,
         const std::string& mode, std::optional<std::string> direction) {
        LanguageProfile p = resolve_profile(language, direction);
        NormalizeTrace t = normalize_trace(text, p, parse_mode(mode));
        return py::make_tuple(t.steps,
                              t.result.status == SentenceStatus::kKept,
                              t.result.text);
      },
      py::arg("text"), py::arg("language") = "base",
      py::arg("mode") = "sentence", py::arg("direction") = std::nullopt,
      "Returns (steps, kept, text)");

  m.def(
      "apply_rules",
      [](const std::string& text, const std::string& language,
         std::optional<std::string> direction) {
        return apply_language_rules(text,
                                    resolve_profile(language, direction));
      },
      py::arg("text"), py::arg("language"),
      py::arg("direction") = std::nullopt,
      "Apply only the language-specific rule cascade");

  m.def(
      "token_is_valid",
      [](const std::string& token, const std::string& language) {
        return token_is_valid(token, resolve_profile(language, std::nullopt));
      },
      py::arg("token"), py::arg("language") = "base");

  m.def("supported_languages", &lang::supported_languages);

  m.def(
      "rewrite",
      [](const std::string& rule_line, const std::string& text) {
        fst::RewriteRule rule = fst::parse_rule(rule_line);
        fst::Fst t = fst::compile_rewrite(rule, fst::star(fst::any_scalar()));
        return fst::apply(t, text);
      },
      py::arg("rule"), py::arg("text"),
      "Compile `LHS -> RHS / LEFT _ RIGHT` and apply it to text");

  py::class_<ngram::NgramModel>(m, "NgramModel")
      .def_readonly("total_tokens", &ngram::NgramModel::total_tokens)
      .def_property_readonly(
          "vocabulary_size",
          [](const ngram::NgramModel& model) { return model.vocabulary.size(); })
      .def("prob",
           [](const ngram::NgramModel& model, const std::string& h,
              const std::string& w) { return ngram::prob(model, h, w); })
      .def("unigram_prob",
           [](const ngram::NgramModel& model, const std::string& w) {
             return ngram::unigram_prob(model, w);
           });

  m.def("fit", &ngram::fit, py::arg("sentences"));

  m.def(
      "split",
      [](const std::vector<std::string>& corpus, std::uint64_t seed,
         double train_fraction) {
        ngram::SplitResult r =
            ngram::split(corpus, {train_fraction, seed});
        return py::make_tuple(r.train, r.test, r.degenerate);
      },
      py::arg("corpus"), py::arg("seed") = 0,
      py::arg("train_fraction") = 0.8);

  m.def(
      "perplexity",
      [](const ngram::NgramModel& model,
         const std::vector<std::string>& test, const std::string& scoring) {
        ngram::Scoring s = scoring == "bigrams" ? ngram::Scoring::kBigrams
                                                : ngram::Scoring::kEverygrams;
        ngram::PerplexityReport r = ngram::perplexity(model, test, s);
        return py::make_tuple(r.perplexity, r.ngrams, r.log_prob_sum);
      },
      py::arg("model"), py::arg("test"), py::arg("scoring") = "everygrams",
      "Returns (perplexity, ngram_count, log_prob_sum)");

  m.def("rejection_stats", &expt::rejection_stats, py::arg("kept"),
        py::arg("rejected"));

  m.def(
      "run_experiment",
      [](const std::vector<std::string>& sentences,
         const std::string& language, std::optional<std::string> direction,
         const std::string& mode, std::uint64_t seed,
         const std::string& scoring, const std::string& divisor) {
        expt::ExperimentOptions options;
        options.mode = parse_mode(mode);
        options.seed = seed;
        options.scoring = scoring == "bigrams" ? ngram::Scoring::kBigrams
                                               : ngram::Scoring::kEverygrams;
        options.divisor = divisor == "base"
                              ? expt::RelativeDivisor::kBasePerplexity
                              : expt::RelativeDivisor::kNgrams;
        expt::ExperimentReport r = expt::run_experiment(
            sentences, resolve_profile(language, direction), "api", options);
        py::dict d;
        d["language"] = r.language;
        d["base_pp"] = r.base_pp;
        d["exp_pp"] = r.exp_pp;
        d["raw_diff"] = r.raw_diff;
        d["relative_diff"] = r.relative_diff;
        d["n_test_ngrams"] = r.n_test_ngrams;
        d["kept"] = r.kept;
        d["rejected"] = r.rejected;
        d["pct_rejected"] = r.pct_rejected;
        return d;
      },
      py::arg("sentences"), py::arg("language"),
      py::arg("direction") = std::nullopt, py::arg("mode") = "sentence",
      py::arg("seed") = 0, py::arg("scoring") = "everygrams",
      py::arg("divisor") = "ngrams");
}
