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

#include "textnorm/rewrite.hpp"

#include "doctest.h"
#include "rewrite_oracle.hpp"
#include "textnorm/unicode.hpp"

using namespace textnorm;
using namespace textnorm::fst;
using testing::OracleRule;
using testing::RuleGen;
using testing::oracle_rewrite;
using testing::to_engine_rule;

namespace {

Fst sigma() { return star(any_scalar()); }

std::string rewrite_str(const Fst& t, std::string_view s) {
  return apply(t, s);
}

}  // namespace

TEST_CASE("context-free replacement") {
  Fst t = compile_rewrite(
      context_free_rule(cross(literal("a"), literal("b"))), sigma());
  CHECK(rewrite_str(t, "banana") == "bbnbnb");
  CHECK(rewrite_str(t, "xyz") == "xyz");  // vacuous application
  CHECK(rewrite_str(t, "") == "");
  CHECK(t.functional_hint());
}

TEST_CASE("multi-scalar replacement") {
  Fst t = compile_rewrite(
      context_free_rule(cross(literal("'y"), literal("\xc6\xb4"))), sigma());
  CHECK(rewrite_str(t, "'yan") == "\xc6\xb4" "an");
  CHECK(rewrite_str(t, "y'y'") == "y\xc6\xb4'");
}

TEST_CASE("replacement expands token") {
  Fst t = compile_rewrite(
      context_free_rule(cross(literal("@"), literal("amin'ny"))), sigma());
  CHECK(rewrite_str(t, "<UNK> @ firy izao?") == "<UNK> amin'ny firy izao?");
}

TEST_CASE("longest match wins at each position") {
  Fst tau = union_of(cross(literal("aba"), literal("X")),
                     cross(literal("ab"), literal("Y")));
  Fst t = compile_rewrite(context_free_rule(std::move(tau)), sigma());
  CHECK(rewrite_str(t, "abab") == "Xb");
  CHECK(rewrite_str(t, "abba") == "Yba");
}

TEST_CASE("leftmost match wins across positions") {
  Fst t = compile_rewrite(
      context_free_rule(cross(literal("aa"), literal("x"))), sigma());
  CHECK(rewrite_str(t, "aaa") == "xa");
  CHECK(rewrite_str(t, "aaaa") == "xx");
}

TEST_CASE("left and right contexts") {
  // a -> b only between x and y
  RewriteRule rule{cross(literal("a"), literal("b")), literal("x"),
                   literal("y")};
  Fst t = compile_rewrite(rule, sigma());
  CHECK(rewrite_str(t, "xay") == "xby");
  CHECK(rewrite_str(t, "xaz") == "xaz");
  CHECK(rewrite_str(t, "way") == "way");
  CHECK(rewrite_str(t, "xayxay") == "xbyxby");
}

TEST_CASE("boundary contexts") {
  RewriteRule initial{cross(literal("a"), literal("b")), bos(), literal("")};
  Fst t1 = compile_rewrite(initial, sigma());
  CHECK(rewrite_str(t1, "aa") == "ba");
  CHECK(rewrite_str(t1, "xa") == "xa");

  RewriteRule final_rule{cross(literal("a"), literal("b")), literal(""),
                         eos()};
  Fst t2 = compile_rewrite(final_rule, sigma());
  CHECK(rewrite_str(t2, "aa") == "ab");
  CHECK(rewrite_str(t2, "ax") == "ax");
}

TEST_CASE("standalone token context") {
  RewriteRule rule{cross(literal("@"), literal("amin'ny")),
                   union_of(bos(), literal(" ")),
                   union_of(literal(" "), eos())};
  Fst t = compile_rewrite(rule, sigma());
  CHECK(rewrite_str(t, "@") == "amin'ny");
  CHECK(rewrite_str(t, "a @ b") == "a amin'ny b");
  CHECK(rewrite_str(t, "user@site.mg") == "user@site.mg");
  CHECK(rewrite_str(t, "@ @") == "amin'ny amin'ny");
}

TEST_CASE("deletion rule") {
  RewriteRule rule{cross(literal("-"), literal("")),
                   concat(union_of(bos(), literal(" ")), literal("i")),
                   char_class({{U'a', U'a'}, {U'e', U'e'}})};
  Fst t = compile_rewrite(rule, sigma());
  CHECK(rewrite_str(t, "i-afrika") == "iafrika");
  CHECK(rewrite_str(t, "x i-e") == "x ie");
  CHECK(rewrite_str(t, "xi-a") == "xi-a");
  CHECK(rewrite_str(t, "i-x") == "i-x");
}

TEST_CASE("insertion requires non-trivial contexts") {
  Fst eps_tau = cross(literal(""), literal("-"));
  CHECK_THROWS_AS(
      compile_rewrite(context_free_rule(eps_tau), sigma()), BadRule);

  RewriteRule rule{cross(literal(""), literal("-")), literal("a"),
                   literal("b")};
  Fst t = compile_rewrite(rule, sigma());
  CHECK(rewrite_str(t, "ab") == "a-b");
  CHECK(rewrite_str(t, "aab") == "aa-b");
  CHECK(rewrite_str(t, "abab") == "a-ba-b");
  CHECK(rewrite_str(t, "ba") == "ba");
}

TEST_CASE("ambiguous tau is rejected") {
  Fst tau = union_of(cross(literal("a"), literal("x")),
                     cross(literal("a"), literal("y")));
  CHECK_THROWS_AS(compile_rewrite(context_free_rule(tau), sigma()),
                  AmbiguousRule);
}

TEST_CASE("compiled rewrites are total over unseen scalars") {
  Fst t = compile_rewrite(
      context_free_rule(cross(literal("a"), literal("b"))), sigma());
  CHECK(rewrite_str(t, "\xd0\xb6 a \xe1\x88\x80") == "\xd0\xb6 b \xe1\x88\x80");
}

TEST_CASE("oracle equivalence: exhaustive strings, random context-free rules") {
  RuleGen gen(2024, U"ab");
  for (int iter = 0; iter < 25; ++iter) {
    OracleRule r = gen.random_rule(false);
    Fst t = compile_rewrite(to_engine_rule(r), sigma());
    // every string over {a,b} with length <= 5
    for (int len = 0; len <= 5; ++len) {
      for (int mask = 0; mask < (1 << len); ++mask) {
        std::u32string s;
        for (int i = 0; i < len; ++i)
          s.push_back((mask >> i) & 1 ? U'b' : U'a');
        CHECK(apply_u32(t, s) == oracle_rewrite(r, s));
      }
    }
  }
}

TEST_CASE("oracle equivalence: random rules with contexts") {
  RuleGen gen(77);
  for (int iter = 0; iter < 150; ++iter) {
    OracleRule r = gen.random_rule(true);
    Fst t = compile_rewrite(to_engine_rule(r), sigma());
    for (int k = 0; k < 6; ++k) {
      std::u32string s = gen.random_string(8);
      CAPTURE(iter);
      CHECK(apply_u32(t, s) == oracle_rewrite(r, s));
    }
  }
}

TEST_CASE("rule text format") {
  RewriteRule r1 = parse_rule("a -> b");
  CHECK(apply(compile_rewrite(r1, sigma()), "banana") == "bbnbnb");

  RewriteRule r2 = parse_rule("a -> b / x _ y");
  CHECK(apply(compile_rewrite(r2, sigma()), "xay way") == "xby way");

  RewriteRule r3 = parse_rule("@ -> amin'ny / [BOS] _ [EOS]");
  Fst t3 = compile_rewrite(r3, sigma());
  CHECK(apply(t3, "@") == "amin'ny");
  CHECK(apply(t3, "@ x") == "@ x");

  RewriteRule r4 = parse_rule("'y -> \xc6\xb4");
  CHECK(apply(compile_rewrite(r4, sigma()), "'yan") == "\xc6\xb4" "an");

  // escaped space in context
  RewriteRule r5 = parse_rule("a -> b / \\s _ ");
  Fst t5 = compile_rewrite(r5, sigma());
  CHECK(apply(t5, "x a") == "x b");
  CHECK(apply(t5, "xa") == "xa");

  CHECK_THROWS_AS(parse_rule("no arrow here"), ParseError);

  std::vector<RewriteRule> rules = parse_rules(
      "# comment\n"
      "a -> b\n"
      "\n"
      "c -> d / e _ \n");
  CHECK(rules.size() == 2);
}
