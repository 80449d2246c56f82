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

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <tuple>

#include "textnorm/unicode.hpp"

namespace textnorm::fst {

namespace {

constexpr std::uint32_t kDead = 0xFFFFFFFFu;

// Deterministic, alive-annotated automaton over the rule's refined alphabet
// (explicit working labels plus kOther; sentinels are explicit-only).
struct Dfa {
  std::vector<std::map<Label, std::uint32_t>> next;
  std::vector<bool> accept;
  std::vector<bool> alive;  // an accepting state is reachable (0+ steps)
  std::uint32_t start = 0;

  std::uint32_t step(std::uint32_t s, Label g) const {
    if (s == kDead) return kDead;
    auto it = next[s].find(g);
    if (it != next[s].end()) return it->second;
    if (!is_sentinel_label(g) && g != kOther) {
      it = next[s].find(kOther);
      if (it != next[s].end()) return it->second;
    }
    return kDead;
  }
};

using Subset = std::vector<StateId>;

Subset eps_closure(const Fst& f, Subset s) {
  std::set<StateId> seen(s.begin(), s.end());
  std::deque<StateId> q(s.begin(), s.end());
  while (!q.empty()) {
    StateId x = q.front();
    q.pop_front();
    for (const Arc& a : f.arcs(x))
      if (a.ilabel == kEpsilon && !seen.count(a.target)) {
        seen.insert(a.target);
        q.push_back(a.target);
      }
  }
  return Subset(seen.begin(), seen.end());
}

// Subset construction over the given symbol set (plus kOther).
Dfa build_dfa(const Fst& acc, const std::set<Label>& symbols) {
  Dfa dfa;
  std::map<Subset, std::uint32_t> ids;
  std::deque<Subset> work;
  auto state_of = [&](const Subset& s) {
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(dfa.next.size());
    dfa.next.emplace_back();
    bool fin = false;
    for (StateId q : s)
      if (acc.is_final(q)) fin = true;
    dfa.accept.push_back(fin);
    ids.emplace(s, id);
    work.push_back(s);
    return id;
  };

  dfa.start = state_of(eps_closure(acc, {acc.start()}));
  while (!work.empty()) {
    Subset s = work.front();
    work.pop_front();
    std::uint32_t id = ids.at(s);

    auto move = [&](Label g) {
      std::set<StateId> tgt;
      for (StateId q : s) {
        bool has_g = false;
        if (g != kOther)
          for (const Arc& a : acc.arcs(q))
            if (a.ilabel == g) {
              has_g = true;
              tgt.insert(a.target);
            }
        if (!has_g && !is_sentinel_label(g))
          for (const Arc& a : acc.arcs(q))
            if (a.ilabel == kOther) tgt.insert(a.target);
      }
      return eps_closure(acc, Subset(tgt.begin(), tgt.end()));
    };

    for (Label g : symbols) {
      Subset t = move(g);
      if (t.empty()) continue;
      std::uint32_t target = state_of(t);  // may grow dfa.next
      dfa.next[id].emplace(g, target);
    }
    Subset t = move(kOther);
    if (!t.empty()) {
      std::uint32_t target = state_of(t);
      dfa.next[id].emplace(kOther, target);
    }
  }

  // backward reachability of accepting states
  std::size_t n = dfa.next.size();
  dfa.alive.assign(n, false);
  std::vector<std::vector<std::uint32_t>> rev(n);
  for (std::uint32_t sId = 0; sId < n; ++sId)
    for (auto& [g, t] : dfa.next[sId]) rev[t].push_back(sId);
  std::deque<std::uint32_t> q;
  for (std::uint32_t sId = 0; sId < n; ++sId)
    if (dfa.accept[sId]) {
      dfa.alive[sId] = true;
      q.push_back(sId);
    }
  while (!q.empty()) {
    std::uint32_t x = q.front();
    q.pop_front();
    for (std::uint32_t p : rev[x])
      if (!dfa.alive[p]) {
        dfa.alive[p] = true;
        q.push_back(p);
      }
  }
  return dfa;
}

// Instantiates input-side kOther arcs at every working label the state does
// not mention, so stepping by an explicit label needs no fallback.
Fst refine_inputs(const Fst& f, const std::set<Label>& gamma) {
  Fst out;
  for (StateId s = 0; s < f.num_states(); ++s) out.add_state();
  out.set_start(f.start());
  for (StateId s = 0; s < f.num_states(); ++s) {
    if (f.is_final(s)) out.set_final(s);
    std::set<Label> expl;
    for (const Arc& a : f.arcs(s))
      if (a.ilabel != kEpsilon && a.ilabel != kOther) expl.insert(a.ilabel);
    for (const Arc& a : f.arcs(s)) {
      out.add_arc(s, a);
      if (a.ilabel != kOther) continue;
      for (Label g : gamma) {
        if (expl.count(g) || is_sentinel_label(g)) continue;
        Label ol = a.olabel == kOther ? g : a.olabel;
        out.add_arc(s, {g, ol, a.target});
      }
    }
  }
  return out;
}

void collect_scalar_labels(const Fst& f, std::set<Label>& gamma) {
  for (StateId s = 0; s < f.num_states(); ++s)
    for (const Arc& a : f.arcs(s)) {
      if (is_scalar_label(a.ilabel)) gamma.insert(a.ilabel);
      if (is_scalar_label(a.olabel)) gamma.insert(a.olabel);
    }
}

bool has_sentinel_labels(const Fst& f) {
  for (StateId s = 0; s < f.num_states(); ++s)
    for (const Arc& a : f.arcs(s))
      if (is_sentinel_label(a.ilabel) || is_sentinel_label(a.olabel))
        return true;
  return false;
}

// Pending verifications against the future input. Negative entries must
// never see a completed match (they kill the path when one appears);
// positive entries are right-context obligations that must each be met.
using NegEntry = std::uint64_t;  // (kind << 32) | state; kind 0 = in-domain
constexpr std::uint64_t kPost = 1ull << 32;

struct Pending {
  std::vector<NegEntry> neg;
  std::vector<std::uint32_t> pos;
};

struct CompositeKey {
  bool match_mode = false;
  bool forced = false;    // copy mode: one symbol must be copied unguarded
  bool consumed = false;  // match mode: tau consumed at least one symbol
  std::uint32_t lc = 0;
  std::uint32_t tstate = 0;
  std::uint32_t dstate = 0;
  std::vector<NegEntry> neg;
  std::vector<std::uint32_t> pos;

  auto operator<=>(const CompositeKey&) const = default;
};

struct Compiler {
  const Fst& tau;
  const Dfa& dom;
  const Dfa& lctx;
  const Dfa& rctx;
  const std::set<Label>& gamma;

  Fst out;
  std::map<CompositeKey, StateId> ids;
  std::deque<CompositeKey> work;
  std::optional<StateId> dead;

  static constexpr std::size_t kMaxStates = 200000;

  StateId dead_state() {
    if (!dead) dead = out.add_state();
    return *dead;
  }

  // nullopt: a completed match was observed -> path dies
  std::optional<std::vector<NegEntry>> neg_step(
      const std::vector<NegEntry>& neg, Label g) const {
    std::set<NegEntry> next;
    auto add_post = [&](std::uint32_t r) -> bool {
      if (r == kDead || !rctx.alive[r]) return true;
      if (rctx.accept[r]) return false;  // match + right context complete
      next.insert(kPost | r);
      return true;
    };
    for (NegEntry e : neg) {
      if (e & kPost) {
        std::uint32_t r = rctx.step(static_cast<std::uint32_t>(e), g);
        if (!add_post(r)) return std::nullopt;
      } else {
        std::uint32_t d = dom.step(static_cast<std::uint32_t>(e), g);
        if (d == kDead) continue;
        if (dom.accept[d] && !add_post(rctx.start)) return std::nullopt;
        if (dom.alive[d]) next.insert(d);
      }
    }
    return std::vector<NegEntry>(next.begin(), next.end());
  }

  // adds the "a match starts here" watcher before consuming the symbol
  std::optional<std::vector<NegEntry>> neg_spawn(
      std::vector<NegEntry> neg) const {
    if (dom.accept[dom.start] && rctx.accept[rctx.start])
      return std::nullopt;  // an empty match applies right here
    if (dom.accept[dom.start] && rctx.alive[rctx.start])
      neg.push_back(kPost | rctx.start);
    if (dom.alive[dom.start]) neg.push_back(dom.start);
    std::sort(neg.begin(), neg.end());
    neg.erase(std::unique(neg.begin(), neg.end()), neg.end());
    return neg;
  }

  bool neg_eos_ok(const std::vector<NegEntry>& neg) const {
    for (NegEntry e : neg) {
      if (!(e & kPost)) continue;  // tau never carries kEos
      std::uint32_t r = rctx.step(static_cast<std::uint32_t>(e), kEos);
      if (r != kDead && rctx.accept[r]) return false;
    }
    return true;
  }

  std::optional<std::vector<std::uint32_t>> pos_step(
      const std::vector<std::uint32_t>& pos, Label g) const {
    std::set<std::uint32_t> next;
    for (std::uint32_t r0 : pos) {
      std::uint32_t r = rctx.step(r0, g);
      if (r == kDead || !rctx.alive[r]) return std::nullopt;
      if (rctx.accept[r]) continue;  // obligation met
      next.insert(r);
    }
    return std::vector<std::uint32_t>(next.begin(), next.end());
  }

  bool pos_eos_ok(const std::vector<std::uint32_t>& pos) const {
    for (std::uint32_t r0 : pos) {
      std::uint32_t r = rctx.step(r0, kEos);
      if (r == kDead || !rctx.accept[r]) return false;
    }
    return true;
  }

  StateId state_of(CompositeKey key) {
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    if (ids.size() >= kMaxStates)
      throw Error("compile_rewrite: state budget exceeded");
    StateId id = out.add_state();
    if (!key.match_mode && neg_eos_ok(key.neg) && pos_eos_ok(key.pos))
      out.set_final(id);
    ids.emplace(key, id);
    work.push_back(std::move(key));
    return id;
  }

  void expand_copy(const CompositeKey& k, StateId id) {
    bool lc_hold = lctx.accept[k.lc];
    bool emitted_other = false;
    std::set<Label> emitted;

    std::vector<Label> syms(gamma.begin(), gamma.end());
    syms.push_back(kOther);
    for (Label g : syms) {
      auto pos2 = pos_step(k.pos, g);
      if (!pos2) continue;
      std::optional<std::vector<NegEntry>> spawned;
      if (lc_hold && !k.forced)
        spawned = neg_spawn(k.neg);
      else
        spawned = k.neg;
      if (!spawned) continue;
      auto neg2 = neg_step(*spawned, g);
      if (!neg2) continue;
      CompositeKey next;
      next.lc = lctx.step(k.lc, g);
      next.neg = std::move(*neg2);
      next.pos = std::move(*pos2);
      out.add_arc(id, {g, g, state_of(std::move(next))});
      if (g == kOther)
        emitted_other = true;
      else
        emitted.insert(g);
    }
    if (emitted_other)
      for (Label g : gamma)
        if (!emitted.count(g)) out.add_arc(id, {g, g, dead_state()});

    if (lc_hold && !k.forced) {
      CompositeKey next;
      next.match_mode = true;
      next.lc = k.lc;
      next.tstate = tau.start();
      next.dstate = dom.start;
      next.neg = k.neg;
      next.pos = k.pos;
      out.add_arc(id, {kEpsilon, kEpsilon, state_of(std::move(next))});
    }
  }

  void expand_match(const CompositeKey& k, StateId id) {
    bool emitted_other = false;
    std::set<Label> emitted;
    for (const Arc& a : tau.arcs(k.tstate)) {
      if (a.ilabel == kEpsilon) {
        CompositeKey next = k;
        next.tstate = a.target;
        out.add_arc(id, {kEpsilon, a.olabel, state_of(std::move(next))});
        continue;
      }
      Label g = a.ilabel;
      std::uint32_t d2 = dom.step(k.dstate, g);
      if (d2 == kDead) continue;
      auto pos2 = pos_step(k.pos, g);
      if (!pos2) continue;
      auto neg2 = neg_step(k.neg, g);
      if (!neg2) continue;
      CompositeKey next;
      next.match_mode = true;
      next.consumed = true;
      next.lc = lctx.step(k.lc, g);
      next.tstate = a.target;
      next.dstate = d2;
      next.neg = std::move(*neg2);
      next.pos = std::move(*pos2);
      out.add_arc(id, {g, a.olabel, state_of(std::move(next))});
      if (g == kOther)
        emitted_other = true;
      else
        emitted.insert(g);
    }
    if (emitted_other)
      for (Label g : gamma)
        if (!emitted.count(g)) out.add_arc(id, {g, g, dead_state()});

    if (tau.is_final(k.tstate) && dom.accept[k.dstate]) {
      // right-context obligation for this match
      std::vector<std::uint32_t> pos2 = k.pos;
      bool viable = true;
      if (!rctx.accept[rctx.start]) {
        if (rctx.alive[rctx.start]) {
          pos2.push_back(rctx.start);
          std::sort(pos2.begin(), pos2.end());
          pos2.erase(std::unique(pos2.begin(), pos2.end()), pos2.end());
        } else {
          viable = false;
        }
      }
      if (viable) {
        // no strictly longer match may exist at the same start
        std::vector<NegEntry> neg2 = k.neg;
        if (dom.alive[k.dstate]) {
          neg2.push_back(k.dstate);
          std::sort(neg2.begin(), neg2.end());
          neg2.erase(std::unique(neg2.begin(), neg2.end()), neg2.end());
        }
        CompositeKey next;
        next.forced = !k.consumed;
        next.lc = k.lc;
        next.neg = std::move(neg2);
        next.pos = std::move(pos2);
        out.add_arc(id, {kEpsilon, kEpsilon, state_of(std::move(next))});
      }
    }
  }

  Fst run() {
    CompositeKey start;
    start.lc = lctx.step(lctx.start, kBos);
    StateId s0 = state_of(std::move(start));
    out.set_start(s0);
    while (!work.empty()) {
      CompositeKey k = work.front();
      work.pop_front();
      StateId id = ids.at(k);
      if (k.match_mode)
        expand_match(k, id);
      else
        expand_copy(k, id);
    }
    return trim(out);
  }
};

}  // namespace

RewriteRule context_free_rule(Fst tau) {
  return RewriteRule{std::move(tau), literal_u32(U""), literal_u32(U"")};
}

Fst compile_rewrite(const RewriteRule& rule, const Fst& sigma) {
  if (!is_acceptor(rule.left) || !is_acceptor(rule.right))
    throw BadRule("compile_rewrite: contexts must be acceptors");
  if (has_sentinel_labels(rule.tau))
    throw BadRule("compile_rewrite: boundary labels inside tau");

  Fst tau_trim = trim(rule.tau);
  if (tau_trim.num_states() == 0 ||
      (tau_trim.num_states() == 1 && tau_trim.num_arcs() == 0 &&
       !tau_trim.is_final(tau_trim.start())))
    throw BadRule("compile_rewrite: tau has an empty input language");

  std::set<Label> gamma;
  collect_scalar_labels(rule.tau, gamma);
  collect_scalar_labels(rule.left, gamma);
  collect_scalar_labels(rule.right, gamma);
  collect_scalar_labels(sigma, gamma);

  Fst tau_ref = refine_inputs(tau_trim, gamma);
  Fst dom_acc = project_input(tau_ref);

  std::set<Label> dom_syms = gamma;
  Dfa dom = build_dfa(dom_acc, dom_syms);

  bool eps_match = dom.accept[dom.start];
  if (eps_match && (accepts(rule.left, U"") || accepts(rule.right, U"")))
    throw BadRule(
        "compile_rewrite: epsilon-matching tau requires non-trivial contexts");

  // left context: matched as a suffix of BOS + input consumed so far
  Fst sfx;
  {
    StateId loop = sfx.add_state();
    sfx.set_start(loop);
    sfx.add_arc(loop, {kOther, kOther, loop});
    for (Label g : gamma) sfx.add_arc(loop, {g, g, loop});
    sfx.add_arc(loop, {kBos, kBos, loop});
    StateId base = 1;
    for (StateId s = 0; s < rule.left.num_states(); ++s) sfx.add_state();
    for (StateId s = 0; s < rule.left.num_states(); ++s) {
      if (rule.left.is_final(s)) sfx.set_final(base + s);
      for (const Arc& a : rule.left.arcs(s))
        sfx.add_arc(base + s, {a.ilabel, a.olabel, base + a.target});
    }
    sfx.add_arc(loop, {kEpsilon, kEpsilon, base + rule.left.start()});
  }
  std::set<Label> lsyms = gamma;
  lsyms.insert(kBos);
  Dfa lctx = build_dfa(sfx, lsyms);

  std::set<Label> rsyms = gamma;
  rsyms.insert(kEos);
  Dfa rctx = build_dfa(rule.right, rsyms);

  Compiler compiler{tau_ref, dom, lctx, rctx, gamma, {}, {}, {}, {}};
  Fst result = compiler.run();
  result.set_functional_hint(true);
  if (!check_functional(result))
    throw AmbiguousRule("compile_rewrite: compiled transducer is ambiguous");
  return result;
}

// -- Rule text format ----------------------------------------------------------

namespace {

// splits a context field into literal / [BOS] / [EOS] segments
Fst context_fst(std::string_view field) {
  std::u32string text = uni::decode_utf8(field);
  Fst acc = literal_u32(U"");
  std::u32string lit;
  auto flush = [&]() {
    if (!lit.empty()) {
      acc = concat(acc, literal_u32(lit));
      lit.clear();
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.compare(i, 5, U"[BOS]") == 0) {
      flush();
      acc = concat(acc, bos());
      i += 4;
    } else if (text.compare(i, 5, U"[EOS]") == 0) {
      flush();
      acc = concat(acc, eos());
      i += 4;
    } else {
      lit.push_back(text[i]);
    }
  }
  flush();
  return acc;
}

std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 >= s.size()) {
      out.push_back(s[i]);
      continue;
    }
    ++i;
    switch (s[i]) {
      case 's':
        out.push_back(' ');
        break;
      case 't':
        out.push_back('\t');
        break;
      case '\\':
        out.push_back('\\');
        break;
      case '[':
        out.push_back('[');
        break;
      default:
        out.push_back('\\');
        out.push_back(s[i]);
    }
  }
  return out;
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

RewriteRule parse_rule(std::string_view line) {
  std::size_t arrow = line.find("->");
  if (arrow == std::string_view::npos)
    throw ParseError("rule line missing '->'");
  std::string lhs = unescape(strip(line.substr(0, arrow)));
  std::string_view rest = line.substr(arrow + 2);

  std::string_view rhs_part = rest;
  std::string_view left_part, right_part;
  bool has_ctx = false;
  std::size_t slash = rest.find(" / ");
  if (slash == std::string_view::npos && !rest.empty() &&
      strip(rest).size() >= 1 && strip(rest).front() == '/')
    slash = rest.find('/');
  if (slash != std::string_view::npos) {
    has_ctx = true;
    rhs_part = rest.substr(0, slash);
    std::string_view ctx = rest.substr(slash + (rest[slash] == ' ' ? 3 : 1));
    std::size_t us = ctx.find('_');
    if (us == std::string_view::npos)
      throw ParseError("rule context missing '_'");
    left_part = ctx.substr(0, us);
    right_part = ctx.substr(us + 1);
  }

  std::string rhs = unescape(strip(rhs_part));
  Fst tau = cross(literal(lhs), literal(rhs));
  if (!has_ctx) return context_free_rule(std::move(tau));
  return RewriteRule{std::move(tau), context_fst(unescape(strip(left_part))),
                     context_fst(unescape(strip(right_part)))};
}

std::vector<RewriteRule> parse_rules(std::string_view text) {
  std::vector<RewriteRule> rules;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    std::string_view t = strip(line);
    if (t.empty() || t.front() == '#') continue;
    rules.push_back(parse_rule(line));
  }
  return rules;
}

}  // namespace textnorm::fst
