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

#include "textnorm/corpus_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <sstream>

namespace textnorm::corpus {

namespace {

bool ends_with(const std::string& s, const char* suffix) {
  std::size_t n = std::strlen(suffix);
  return s.size() >= n && s.compare(s.size() - n, n, suffix) == 0;
}

std::vector<std::string> split_lines(const std::string& data) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= data.size()) {
    std::size_t nl = data.find('\n', pos);
    if (nl == std::string::npos) {
      if (pos < data.size()) lines.push_back(data.substr(pos));
      break;
    }
    std::string line = data.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    pos = nl + 1;
  }
  return lines;
}

std::string trim_ws(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

// whitespace-separated fields
std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (ss >> f) out.push_back(std::move(f));
  return out;
}

}  // namespace

void ReadStats::warn(std::size_t line, const std::string& what) {
  warnings.push_back("line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::string data;
  if (ends_with(path, ".gz")) {
    gzFile gz = gzopen(path.c_str(), "rb");
    if (!gz) throw Error("cannot open " + path);
    char buf[1 << 16];
    int n;
    while ((n = gzread(gz, buf, sizeof buf)) > 0) data.append(buf, n);
    bool ok = n == 0;
    gzclose(gz);
    if (!ok) throw Error("gzip read error in " + path);
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    data = ss.str();
  }
  return split_lines(data);
}

std::vector<std::string> read_ud(const std::string& path, ReadStats* stats) {
  ReadStats local;
  ReadStats& st = stats ? *stats : local;
  std::vector<std::string> sentences;
  bool block_content = false, block_text = false;
  std::size_t block_start = 0;
  auto close_block = [&](std::size_t lineno) {
    if (block_content && !block_text) {
      ++st.malformed;
      st.warn(block_start, "sentence block without a text comment");
    }
    block_content = block_text = false;
  };
  std::size_t lineno = 0;
  for (const std::string& line : read_lines(path)) {
    ++lineno;
    ++st.lines_read;
    if (trim_ws(line).empty()) {
      close_block(lineno);
      continue;
    }
    if (!block_content) block_start = lineno;
    block_content = true;
    constexpr const char* kTextPrefix = "# text =";
    if (line.rfind(kTextPrefix, 0) == 0) {
      if (!block_text) {
        std::string text = line.substr(std::strlen(kTextPrefix));
        if (!text.empty() && text.front() == ' ') text.erase(0, 1);
        sentences.push_back(text);
        block_text = true;
      }
    }
  }
  close_block(lineno + 1);
  return sentences;
}

std::vector<std::string> read_lcc(const std::string& path, ReadStats* stats) {
  ReadStats local;
  ReadStats& st = stats ? *stats : local;
  std::vector<std::string> sentences;
  std::size_t lineno = 0;
  for (const std::string& line : read_lines(path)) {
    ++lineno;
    ++st.lines_read;
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      st.warn(lineno, "no tab separator; keeping whole line");
      sentences.push_back(line);
    } else {
      sentences.push_back(line.substr(tab + 1));
    }
  }
  return sentences;
}

std::vector<std::string> read_oscar(const std::string& path,
                                    std::optional<std::size_t> line_limit,
                                    ReadStats* stats) {
  ReadStats local;
  ReadStats& st = stats ? *stats : local;
  std::vector<std::string> units;
  for (const std::string& line : read_lines(path)) {
    ++st.lines_read;
    if (trim_ws(line).empty()) continue;
    if (line_limit && units.size() >= *line_limit) break;
    units.push_back(line);
  }
  return units;
}

std::vector<WordEntry> read_ac_words(const std::string& path,
                                     ReadStats* stats) {
  ReadStats local;
  ReadStats& st = stats ? *stats : local;
  std::vector<WordEntry> words;
  std::size_t lineno = 0;
  for (const std::string& line : read_lines(path)) {
    ++lineno;
    ++st.lines_read;
    if (trim_ws(line).empty()) continue;
    std::vector<std::string> f = fields(line);
    if (f.size() != 2) {
      ++st.malformed;
      st.warn(lineno, "expected word and count");
      continue;
    }
    try {
      words.push_back({f[0], std::stoll(f[1])});
    } catch (const std::exception&) {
      ++st.malformed;
      st.warn(lineno, "bad count '" + f[1] + "'");
    }
  }
  return words;
}

std::vector<std::string> read_ac(const std::string& words_path,
                                 const std::string& bigrams_path,
                                 bool expand_frequencies, ReadStats* stats) {
  ReadStats local;
  ReadStats& st = stats ? *stats : local;
  if (!words_path.empty()) read_ac_words(words_path, &st);

  std::vector<std::string> sentences;
  std::size_t lineno = 0;
  for (const std::string& line : read_lines(bigrams_path)) {
    ++lineno;
    ++st.lines_read;
    if (trim_ws(line).empty()) continue;
    std::vector<std::string> f = fields(line);
    if (f.size() != 3) {
      ++st.malformed;
      st.warn(lineno, "expected two tokens and a count");
      continue;
    }
    std::int64_t count = 1;
    try {
      count = std::stoll(f[2]);
    } catch (const std::exception&) {
      ++st.malformed;
      st.warn(lineno, "bad count '" + f[2] + "'");
      continue;
    }
    std::string sentence = f[0] + " " + f[1];
    if (expand_frequencies) {
      for (std::int64_t i = 0; i < count; ++i) sentences.push_back(sentence);
    } else {
      sentences.push_back(std::move(sentence));
    }
  }
  return sentences;
}

std::vector<std::string> read_plain(const std::string& path,
                                    ReadStats* stats) {
  ReadStats local;
  ReadStats& st = stats ? *stats : local;
  std::vector<std::string> sentences = read_lines(path);
  st.lines_read += sentences.size();
  return sentences;
}

void write_plain(const std::string& path,
                 const std::vector<std::string>& sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  for (const std::string& s : sentences) out << s << "\n";
}

SourceKind parse_source_kind(const std::string& name) {
  if (name == "ud") return SourceKind::kUd;
  if (name == "lcc") return SourceKind::kLcc;
  if (name == "oscar") return SourceKind::kOscar;
  if (name == "ac") return SourceKind::kAc;
  if (name == "plain") return SourceKind::kPlain;
  throw Error("unknown source kind: " + name +
              " (expected ud, lcc, oscar, ac or plain)");
}

std::string source_kind_name(SourceKind kind) {
  switch (kind) {
    case SourceKind::kUd:
      return "ud";
    case SourceKind::kLcc:
      return "lcc";
    case SourceKind::kOscar:
      return "oscar";
    case SourceKind::kAc:
      return "ac";
    case SourceKind::kPlain:
      return "plain";
  }
  return "?";
}

std::vector<std::string> read_source(SourceKind kind, const std::string& path,
                                     const std::string& words_path,
                                     std::optional<std::size_t> line_limit,
                                     ReadStats* stats) {
  switch (kind) {
    case SourceKind::kUd:
      return read_ud(path, stats);
    case SourceKind::kLcc:
      return read_lcc(path, stats);
    case SourceKind::kOscar:
      return read_oscar(path, line_limit, stats);
    case SourceKind::kAc:
      return read_ac(words_path, path, false, stats);
    case SourceKind::kPlain:
      return read_plain(path, stats);
  }
  throw Error("unreachable source kind");
}

}  // namespace textnorm::corpus
