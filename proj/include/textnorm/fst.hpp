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

#ifndef TEXTNORM_FST_HPP_
#define TEXTNORM_FST_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "textnorm/errors.hpp"

namespace textnorm::fst {

// Arc labels are Unicode scalar values (0..0x10FFFF) plus a handful of
// reserved labels. kOther matches any scalar value not matched by a sibling
// arc of the same state and maps it to itself on the output side unless
// crossed away. kBos/kEos are virtual boundary symbols; they are only
// meaningful inside rewrite-rule context acceptors.
using Label = std::uint32_t;
using StateId = std::uint32_t;

inline constexpr Label kEpsilon = 0xFFFFFFFEu;
inline constexpr Label kOther = 0xFFFFFFFDu;
inline constexpr Label kBos = 0x110000u;
inline constexpr Label kEos = 0x110001u;

inline constexpr bool is_scalar_label(Label l) { return l <= 0x10FFFFu; }
inline constexpr bool is_sentinel_label(Label l) {
  return l == kBos || l == kEos;
}

struct Arc {
  Label ilabel;
  Label olabel;
  StateId target;

  friend bool operator==(const Arc&, const Arc&) = default;
};

// A codepoint-labeled finite-state transducer. Acceptors are transducers
// whose every arc carries identical input and output labels.
//
// A state may hold explicit arcs to a dead (non-final, arcless) state; these
// shadow the sibling kOther arc so that the shadowed scalar is rejected
// rather than falling through the open class.
class Fst {
 public:
  StateId add_state();
  void add_arc(StateId from, Arc arc);
  void set_start(StateId s);
  void set_final(StateId s, bool final = true);

  StateId start() const { return start_; }
  bool is_final(StateId s) const { return finals_[s]; }
  std::size_t num_states() const { return arcs_.size(); }
  const std::vector<Arc>& arcs(StateId s) const { return arcs_[s]; }

  bool functional_hint() const { return functional_; }
  void set_functional_hint(bool f) { functional_ = f; }

  std::size_t num_arcs() const;

 private:
  std::vector<std::vector<Arc>> arcs_;
  std::vector<bool> finals_;
  StateId start_ = 0;
  bool functional_ = false;
};

// -- Construction ------------------------------------------------------------

// Acceptor whose language is exactly {s}. Accepts the empty string for "".
Fst literal(std::string_view utf8);
Fst literal_u32(std::u32string_view s);

// Acceptor accepting exactly the one-scalar strings whose scalar falls in
// some [lo, hi] range. Throws EmptyClass if ranges is empty.
Fst char_class(const std::vector<std::pair<char32_t, char32_t>>& ranges);

// Acceptor accepting any single scalar (one kOther arc).
Fst any_scalar();

// Boundary acceptors for rewrite contexts.
Fst bos();
Fst eos();

// -- Rational operations -----------------------------------------------------

Fst union_of(const Fst& a, const Fst& b);
Fst concat(const Fst& a, const Fst& b);
Fst star(const Fst& a);
Fst optional_of(const Fst& a);

// Transducer mapping every string of L(a) to every string of L(b). Throws
// NotAcceptor if an operand has a non-identity arc, or if b contains an open
// character class (kOther), which has no enumerable output.
Fst cross(const Fst& a, const Fst& b);

// Relation composition {(x,z) : exists y with (x,y) in a and (y,z) in b}.
// kOther arcs are expanded against the sibling label sets of the opposing
// state before pairing.
Fst compose(const Fst& a, const Fst& b);

// -- Structure ---------------------------------------------------------------

// Epsilon-removal of eps:eps arcs; determinize + minimize when t is an
// acceptor; trim always.
Fst optimize(const Fst& t);

// Drop states that are unreachable or cannot reach a final state. Arcs that
// shadow a live kOther sibling are preserved via a single dead state.
Fst trim(const Fst& t);

// Input-side projection as an acceptor.
Fst project_input(const Fst& t);

bool is_acceptor(const Fst& t);

// Membership test for acceptors (NFA simulation; epsilon arcs allowed).
bool accepts(const Fst& a, std::u32string_view s);

// -- Application -------------------------------------------------------------

// The unique output of a functional transducer on s. Throws NoPath if s is
// not in the input language, NonFunctional if distinct outputs exist.
std::string apply(const Fst& t, std::string_view utf8);
std::u32string apply_u32(const Fst& t, std::u32string_view s);

// Bounded functionality check: true if no input was found with two distinct
// outputs. Pair exploration beyond the node budget reports false
// (conservative).
bool check_functional(const Fst& t, std::size_t node_budget = 1u << 21);

}  // namespace textnorm::fst

#endif  // TEXTNORM_FST_HPP_
