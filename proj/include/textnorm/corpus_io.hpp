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

#ifndef TEXTNORM_CORPUS_IO_HPP_
#define TEXTNORM_CORPUS_IO_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "textnorm/errors.hpp"

namespace textnorm::corpus {

// Non-fatal observations made while reading; readers never throw on
// malformed content, only on unreadable files.
struct ReadStats {
  std::size_t lines_read = 0;
  std::size_t malformed = 0;
  std::vector<std::string> warnings;

  void warn(std::size_t line, const std::string& what);
};

// Reads a whole file line by line; paths ending in .gz are decompressed
// transparently.
std::vector<std::string> read_lines(const std::string& path);

// CoNLL-U: one sentence per `# text = ...` comment; a sentence block without
// one is counted as malformed and skipped.
std::vector<std::string> read_ud(const std::string& path,
                                 ReadStats* stats = nullptr);

// Leipzig corpora sentence files: `ID<TAB>sentence`; a line without a tab is
// kept whole with a warning.
std::vector<std::string> read_lcc(const std::string& path,
                                  ReadStats* stats = nullptr);

// Plain text, one document line per unit, blank lines skipped, at most
// line_limit units.
std::vector<std::string> read_oscar(const std::string& path,
                                    std::optional<std::size_t> line_limit,
                                    ReadStats* stats = nullptr);

struct WordEntry {
  std::string word;
  std::int64_t count = 0;
};

// The words file of a crawl frequency list: `word<WS>count` per line.
std::vector<WordEntry> read_ac_words(const std::string& path,
                                     ReadStats* stats = nullptr);

// The bigrams file: `w1<WS>w2<WS>count` per line, one two-token sentence per
// line. With expand_frequencies each sentence is repeated count times.
std::vector<std::string> read_ac(const std::string& words_path,
                                 const std::string& bigrams_path,
                                 bool expand_frequencies = false,
                                 ReadStats* stats = nullptr);

// Our own output format: one sentence per line.
std::vector<std::string> read_plain(const std::string& path,
                                    ReadStats* stats = nullptr);
void write_plain(const std::string& path,
                 const std::vector<std::string>& sentences);

enum class SourceKind { kUd, kLcc, kOscar, kAc, kPlain };

SourceKind parse_source_kind(const std::string& name);
std::string source_kind_name(SourceKind kind);

// Dispatches on kind. For kAc, `path` is the bigrams file and `words_path`
// (optional) the words file.
std::vector<std::string> read_source(SourceKind kind, const std::string& path,
                                     const std::string& words_path = "",
                                     std::optional<std::size_t> line_limit = {},
                                     ReadStats* stats = nullptr);

}  // namespace textnorm::corpus

#endif  // TEXTNORM_CORPUS_IO_HPP_
