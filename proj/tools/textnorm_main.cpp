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

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "textnorm/corpus_io.hpp"
#include "textnorm/experiment.hpp"
#include "textnorm/lang_rules.hpp"
#include "textnorm/ngram.hpp"
#include "textnorm/pipeline.hpp"

namespace {

using namespace textnorm;

struct ProfileArgs {
  std::string language = "base";
  std::string profile_file;
  std::string direction;

  LanguageProfile resolve() const {
    if (!profile_file.empty()) return lang::load_profile(profile_file);
    std::optional<std::string> dir;
    if (!direction.empty()) dir = direction;
    return lang::default_profile(language, dir);
  }
};

void add_profile_flags(CLI::App* cmd, ProfileArgs* args) {
  cmd->add_option("--language,-l", args->language,
                  "Built-in language profile (default: base)");
  cmd->add_option("--profile-file", args->profile_file,
                  "Load the profile from a key-value file instead");
  cmd->add_option("--direction", args->direction,
                  "hausa: niger|nigeria; igbo: onwu|new-standard");
}

FilterMode parse_mode(const std::string& mode) {
  if (mode == "sentence") return FilterMode::kSentence;
  if (mode == "token") return FilterMode::kToken;
  throw CLI::ValidationError("--filter-mode", "expected sentence or token");
}

std::vector<std::string> read_input_lines(const std::string& path) {
  if (path.empty() || path == "-") {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(std::cin, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
    return lines;
  }
  return corpus::read_lines(path);
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw Error("cannot write " + path);
  return file;
}

int cmd_normalize(const ProfileArgs& pargs, const std::string& mode_name,
                  const std::string& input, const std::string& output,
                  const std::string& rejected_out, bool trace) {
  LanguageProfile profile = pargs.resolve();
  FilterMode mode = parse_mode(mode_name);
  std::vector<std::string> lines = read_input_lines(input);

  std::ofstream out_file, rej_file;
  std::ostream& out = open_out(out_file, output);
  std::ostream* rej = nullptr;
  if (!rejected_out.empty()) {
    rej_file.open(rejected_out, std::ios::binary);
    if (!rej_file) throw Error("cannot write " + rejected_out);
    rej = &rej_file;
  }

  static const char* kStepNames[] = {
      "preprocessing", "token/sentence filtering", "language-specific rules",
      "detaching punctuation", "deleting freestanding punctuation",
      "deleting extra whitespace"};

  std::size_t kept = 0, rejected = 0;
  for (const std::string& line : lines) {
    if (trace) {
      NormalizeTrace t = normalize_trace(line, profile, mode);
      std::cerr << "INPUT\t<" << line << ">\n";
      for (std::size_t i = 0; i < t.steps.size(); ++i)
        std::cerr << i + 1 << " " << kStepNames[i] << "\t<" << t.steps[i]
                  << ">\n";
      std::cerr << "OUTPUT\t<" << t.result.text << ">\n";
      if (t.result.status == SentenceStatus::kRejected)
        std::cerr << "REJECTED\n";
      std::cerr << "\n";
    }
    NormalizedSentence n = normalize(line, profile, mode);
    if (n.status == SentenceStatus::kRejected) {
      ++rejected;
      if (rej) *rej << line << "\n";
      continue;
    }
    ++kept;
    out << n.text << "\n";
  }
  std::cerr << "kept\t" << kept << "\trejected\t" << rejected << "\n";
  return 0;
}

corpus::ReadStats print_warnings(const corpus::ReadStats& stats,
                                 const std::string& label) {
  for (const std::string& w : stats.warnings)
    std::cerr << "warning\t" << label << "\t" << w << "\n";
  return stats;
}

int cmd_stats(const ProfileArgs& pargs, const std::string& kind_name,
              const std::string& input, const std::string& words,
              const std::string& label, std::optional<std::size_t> line_limit,
              const std::string& output) {
  LanguageProfile profile = pargs.resolve();
  corpus::SourceKind kind = corpus::parse_source_kind(kind_name);
  corpus::ReadStats stats;
  std::vector<std::string> sentences =
      corpus::read_source(kind, input, words, line_limit, &stats);
  print_warnings(stats, label.empty() ? input : label);

  std::size_t kept = 0, rejected = 0;
  for (const std::string& s : sentences) {
    if (normalize(s, profile, FilterMode::kSentence).status ==
        SentenceStatus::kRejected)
      ++rejected;
    else
      ++kept;
  }
  std::ofstream out_file;
  std::ostream& out = open_out(out_file, output);
  out << "language\tsource\tkept\trejected\tpct_rejected\n";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f",
                expt::rejection_stats(kept, rejected));
  out << profile.language << "\t" << (label.empty() ? input : label) << "\t"
      << kept << "\t" << rejected << "\t" << buf << "\n";
  return 0;
}

int cmd_eval(const ProfileArgs& pargs, bool do_normalize,
             const std::string& input, std::uint64_t seed,
             const std::string& scoring_name, const std::string& save_model,
             const std::string& load_model, const std::string& output) {
  std::vector<std::string> lines = read_input_lines(input);
  std::vector<std::string> sentences;
  if (do_normalize) {
    LanguageProfile profile = pargs.resolve();
    for (const std::string& s : lines) {
      NormalizedSentence n = normalize(s, profile, FilterMode::kSentence);
      if (n.status == SentenceStatus::kKept) sentences.push_back(n.text);
    }
  } else {
    sentences = lines;
  }
  ngram::Scoring scoring = scoring_name == "bigrams"
                               ? ngram::Scoring::kBigrams
                               : ngram::Scoring::kEverygrams;
  ngram::NgramModel model;
  std::size_t n_train = 0;
  std::vector<std::string> test;
  if (!load_model.empty()) {
    // score every input sentence against the stored model
    std::ifstream in(load_model, std::ios::binary);
    if (!in) throw Error("cannot open " + load_model);
    model = ngram::load_model(in);
    test = std::move(sentences);
  } else {
    ngram::SplitResult split = ngram::split(sentences, {0.8, seed});
    model = ngram::fit(split.train);
    n_train = split.train.size();
    test = std::move(split.test);
  }
  ngram::PerplexityReport pp = ngram::perplexity(model, test, scoring);
  if (!save_model.empty()) {
    std::ofstream out(save_model, std::ios::binary);
    if (!out) throw Error("cannot write " + save_model);
    ngram::save_model(model, out);
  }

  std::ofstream out_file;
  std::ostream& out = open_out(out_file, output);
  out << "sentences\ttrain\ttest\tvocab\tngrams\tperplexity\n";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", pp.perplexity);
  out << (test.size() + n_train) << "\t" << n_train << "\t" << test.size()
      << "\t" << model.vocabulary.size() << "\t" << pp.ngrams << "\t" << buf
      << "\n";
  return 0;
}

std::vector<expt::RunSpec> parse_manifest(const std::string& path) {
  std::vector<expt::RunSpec> specs;
  std::size_t lineno = 0;
  for (const std::string& line : corpus::read_lines(path)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::size_t pos = 0;
    while (true) {
      std::size_t tab = line.find('\t', pos);
      cols.push_back(line.substr(
          pos, tab == std::string::npos ? std::string::npos : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (cols.size() < 4)
      throw ParseError("manifest line " + std::to_string(lineno) +
                       ": expected language<TAB>kind<TAB>label<TAB>path");
    expt::RunSpec spec;
    spec.language = cols[0];
    spec.kind = corpus::parse_source_kind(cols[1]);
    spec.label = cols[2];
    spec.path = cols[3];
    for (std::size_t i = 4; i < cols.size(); ++i) {
      std::size_t eq = cols[i].find('=');
      if (eq == std::string::npos)
        throw ParseError("manifest line " + std::to_string(lineno) +
                         ": expected key=value, got " + cols[i]);
      std::string key = cols[i].substr(0, eq), value = cols[i].substr(eq + 1);
      if (key == "words")
        spec.words_path = value;
      else if (key == "direction")
        spec.direction = value;
      else if (key == "line-limit")
        spec.line_limit = std::stoull(value);
      else
        throw ParseError("manifest line " + std::to_string(lineno) +
                         ": unknown key " + key);
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

int cmd_experiment(const std::string& manifest, expt::RunSpec single,
                   bool have_single, const expt::ExperimentOptions& options,
                   bool with_summary, const std::string& output) {
  std::vector<expt::RunSpec> specs;
  if (!manifest.empty()) specs = parse_manifest(manifest);
  if (have_single) specs.push_back(std::move(single));
  if (specs.empty())
    throw Error("experiment: give --manifest or --input with --source-kind");

  std::vector<std::string> warnings;
  std::vector<expt::ExperimentReport> reports =
      expt::run_manifest(specs, options, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning\t" << w << "\n";

  std::ofstream out_file;
  std::ostream& out = open_out(out_file, output);
  out << expt::report_tsv(reports);
  if (with_summary) {
    out << "\n";
    out << expt::summary_tsv(expt::summarize_by_source(reports));
  }
  return 0;
}

int cmd_report(const std::string& input) {
  std::string tsv;
  if (input.empty() || input == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    tsv = ss.str();
  } else {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw Error("cannot open " + input);
    std::stringstream ss;
    ss << in.rdbuf();
    tsv = ss.str();
  }
  std::cout << expt::render_table(tsv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text normalization and corpus quality toolkit"};
  app.require_subcommand(1);

  // normalize
  ProfileArgs norm_profile;
  std::string norm_mode = "sentence", norm_in, norm_out, norm_rej;
  bool norm_trace = false;
  CLI::App* norm = app.add_subcommand(
      "normalize", "Normalize text, one sentence per line");
  add_profile_flags(norm, &norm_profile);
  norm->add_option("--filter-mode", norm_mode, "sentence|token");
  norm->add_option("--input,-i", norm_in, "Input file (default: stdin)");
  norm->add_option("--output,-o", norm_out, "Output file (default: stdout)");
  norm->add_option("--rejected-out", norm_rej,
                   "Write rejected sentences to this file");
  norm->add_flag("--trace", norm_trace,
                 "Print the six-step derivation per line to stderr");

  // stats
  ProfileArgs stats_profile;
  std::string stats_kind = "plain", stats_in, stats_words, stats_label,
              stats_out;
  std::optional<std::size_t> stats_limit;
  CLI::App* stats =
      app.add_subcommand("stats", "Kept/rejected sentence statistics");
  add_profile_flags(stats, &stats_profile);
  stats->add_option("--source-kind", stats_kind, "ud|lcc|oscar|ac|plain");
  stats->add_option("--input,-i", stats_in, "Corpus file")->required();
  stats->add_option("--words", stats_words, "ac: words file");
  stats->add_option("--label", stats_label, "Source label for the report");
  stats->add_option("--line-limit", stats_limit, "Read at most N units");
  stats->add_option("--output,-o", stats_out, "Output file (default: stdout)");

  // eval
  ProfileArgs eval_profile;
  std::string eval_in, eval_scoring = "everygrams", eval_out;
  std::string eval_save, eval_load;
  std::uint64_t eval_seed = 0;
  bool eval_norm = false;
  CLI::App* eval =
      app.add_subcommand("eval", "Fit a language model and report perplexity");
  add_profile_flags(eval, &eval_profile);
  eval->add_option("--input,-i", eval_in, "Sentences, one per line");
  eval->add_option("--seed", eval_seed, "Split seed (default 0)");
  eval->add_option("--scoring", eval_scoring, "bigrams|everygrams");
  eval->add_flag("--normalize", eval_norm,
                 "Normalize (sentence mode) before fitting");
  eval->add_option("--save-model", eval_save, "Write the fitted counts here");
  eval->add_option("--load-model", eval_load,
                   "Score the input against stored counts instead of fitting");
  eval->add_option("--output,-o", eval_out, "Output file (default: stdout)");

  // experiment
  std::string exp_manifest, exp_kind, exp_in, exp_words, exp_label, exp_out;
  ProfileArgs exp_profile;
  std::optional<std::size_t> exp_limit;
  std::string exp_mode = "sentence", exp_scoring = "everygrams",
              exp_divisor = "ngrams";
  std::uint64_t exp_seed = 0;
  bool exp_summary = false;
  CLI::App* exp = app.add_subcommand(
      "experiment", "Base-vs-experiment normalization comparison");
  exp->add_option("--manifest", exp_manifest,
                  "TSV: language, kind, label, path[, key=value...]");
  add_profile_flags(exp, &exp_profile);
  exp->add_option("--source-kind", exp_kind, "ud|lcc|oscar|ac|plain");
  exp->add_option("--input,-i", exp_in, "Corpus file (single run)");
  exp->add_option("--words", exp_words, "ac: words file");
  exp->add_option("--label", exp_label, "Source label");
  exp->add_option("--line-limit", exp_limit, "Read at most N units");
  exp->add_option("--filter-mode", exp_mode, "sentence|token");
  exp->add_option("--seed", exp_seed, "Split seed (default 0)");
  exp->add_option("--scoring", exp_scoring, "bigrams|everygrams");
  exp->add_option("--relative-divisor", exp_divisor, "ngrams|base");
  exp->add_flag("--summary", exp_summary, "Append per-source summary");
  exp->add_option("--output,-o", exp_out, "Output file (default: stdout)");

  // report
  std::string report_in;
  CLI::App* report =
      app.add_subcommand("report", "Render a TSV report as an aligned table");
  report->add_option("--input,-i", report_in, "TSV file (default: stdin)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (norm->parsed())
      return cmd_normalize(norm_profile, norm_mode, norm_in, norm_out,
                           norm_rej, norm_trace);
    if (stats->parsed())
      return cmd_stats(stats_profile, stats_kind, stats_in, stats_words,
                       stats_label, stats_limit, stats_out);
    if (eval->parsed())
      return cmd_eval(eval_profile, eval_norm, eval_in, eval_seed,
                      eval_scoring, eval_save, eval_load, eval_out);
    if (exp->parsed()) {
      expt::ExperimentOptions options;
      options.mode = parse_mode(exp_mode);
      options.seed = exp_seed;
      options.scoring = exp_scoring == "bigrams" ? ngram::Scoring::kBigrams
                                                 : ngram::Scoring::kEverygrams;
      if (exp_divisor == "base")
        options.divisor = expt::RelativeDivisor::kBasePerplexity;
      else if (exp_divisor != "ngrams")
        throw Error("--relative-divisor: expected ngrams or base");
      expt::RunSpec single;
      bool have_single = !exp_in.empty();
      if (have_single) {
        single.language = exp_profile.language;
        single.kind = corpus::parse_source_kind(
            exp_kind.empty() ? "plain" : exp_kind);
        single.label = exp_label.empty() ? exp_in : exp_label;
        single.path = exp_in;
        single.words_path = exp_words;
        if (!exp_profile.direction.empty())
          single.direction = exp_profile.direction;
        single.line_limit = exp_limit;
      }
      return cmd_experiment(exp_manifest, std::move(single), have_single,
                            options, exp_summary, exp_out);
    }
    if (report->parsed()) return cmd_report(report_in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
