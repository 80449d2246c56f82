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

#ifndef TEXTNORM_ERRORS_HPP_
#define TEXTNORM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace textnorm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidUtf8 : Error {
  using Error::Error;
};

// fst
struct EmptyClass : Error {
  using Error::Error;
};
struct NotAcceptor : Error {
  using Error::Error;
};
struct BadRule : Error {
  using Error::Error;
};
struct AmbiguousRule : Error {
  using Error::Error;
};
struct NoPath : Error {
  using Error::Error;
};
struct NonFunctional : Error {
  using Error::Error;
};

// ngram / experiments
struct EmptyCorpus : Error {
  using Error::Error;
};
struct EmptyTraining : Error {
  using Error::Error;
};
struct EmptyTest : Error {
  using Error::Error;
};
struct EmptyAfterFiltering : Error {
  using Error::Error;
};

// file formats
struct ParseError : Error {
  using Error::Error;
};

}  // namespace textnorm

#endif  // TEXTNORM_ERRORS_HPP_
