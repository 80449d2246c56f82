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

#include "textnorm/fst.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>
#include <optional>
#include <set>
#include <tuple>

#include "textnorm/unicode.hpp"

namespace textnorm::fst {

namespace {

bool state_has_explicit(const Fst& f, StateId s, Label l) {
  for (const Arc& a : f.arcs(s))
    if (a.ilabel == l) return true;
  return false;
}

std::set<Label> explicit_ilabels(const Fst& f, StateId s) {
  std::set<Label> out;
  for (const Arc& a : f.arcs(s))
    if (a.ilabel != kEpsilon && a.ilabel != kOther) out.insert(a.ilabel);
  return out;
}

// Copies all states of `in` into `out`; returns the id offset.
StateId append_states(Fst& out, const Fst& in) {
  StateId base = static_cast<StateId>(out.num_states());
  for (StateId s = 0; s < in.num_states(); ++s) out.add_state();
  for (StateId s = 0; s < in.num_states(); ++s) {
    for (const Arc& a : in.arcs(s))
      out.add_arc(base + s, {a.ilabel, a.olabel, base + a.target});
    if (in.is_final(s)) out.set_final(base + s);
  }
  return base;
}

Fst single_state_acceptor(bool final) {
  Fst f;
  StateId s = f.add_state();
  f.set_start(s);
  f.set_final(s, final);
  return f;
}

}  // namespace

StateId Fst::add_state() {
  arcs_.emplace_back();
  finals_.push_back(false);
  return static_cast<StateId>(arcs_.size() - 1);
}

void Fst::add_arc(StateId from, Arc arc) {
  if (from >= arcs_.size() || arc.target >= arcs_.size())
    throw Error("fst: arc endpoint does not exist");
  if (arc.olabel == kOther && arc.ilabel != kOther)
    throw Error("fst: kOther output requires kOther input");
  if (arc.ilabel == kOther) {
    for (const Arc& a : arcs_[from])
      if (a.ilabel == kOther)
        throw Error("fst: at most one kOther arc per state");
  }
  arcs_[from].push_back(arc);
}

void Fst::set_start(StateId s) {
  if (s >= arcs_.size()) throw Error("fst: start state does not exist");
  start_ = s;
}

void Fst::set_final(StateId s, bool final) {
  if (s >= arcs_.size()) throw Error("fst: final state does not exist");
  finals_[s] = final;
}

std::size_t Fst::num_arcs() const {
  std::size_t n = 0;
  for (const auto& v : arcs_) n += v.size();
  return n;
}

// -- Construction ------------------------------------------------------------

Fst literal_u32(std::u32string_view s) {
  Fst f;
  StateId cur = f.add_state();
  f.set_start(cur);
  for (char32_t c : s) {
    StateId next = f.add_state();
    f.add_arc(cur, {c, c, next});
    cur = next;
  }
  f.set_final(cur);
  return f;
}

Fst literal(std::string_view utf8) { return literal_u32(uni::decode_utf8(utf8)); }

Fst char_class(const std::vector<std::pair<char32_t, char32_t>>& ranges) {
  if (ranges.empty()) throw EmptyClass("char_class: empty range list");
  Fst f;
  StateId s0 = f.add_state();
  StateId s1 = f.add_state();
  f.set_start(s0);
  f.set_final(s1);
  for (auto [lo, hi] : ranges) {
    if (lo > hi) throw Error("char_class: range lo > hi");
    if (hi > 0x10FFFF) throw Error("char_class: range beyond Unicode");
    for (char32_t c = lo;; ++c) {
      f.add_arc(s0, {c, c, s1});
      if (c == hi) break;
    }
  }
  return f;
}

Fst any_scalar() {
  Fst f;
  StateId s0 = f.add_state();
  StateId s1 = f.add_state();
  f.set_start(s0);
  f.set_final(s1);
  f.add_arc(s0, {kOther, kOther, s1});
  return f;
}

Fst bos() {
  Fst f;
  StateId s0 = f.add_state();
  StateId s1 = f.add_state();
  f.set_start(s0);
  f.set_final(s1);
  f.add_arc(s0, {kBos, kBos, s1});
  return f;
}

Fst eos() {
  Fst f;
  StateId s0 = f.add_state();
  StateId s1 = f.add_state();
  f.set_start(s0);
  f.set_final(s1);
  f.add_arc(s0, {kEos, kEos, s1});
  return f;
}

// -- Rational operations -----------------------------------------------------

Fst union_of(const Fst& a, const Fst& b) {
  Fst f;
  StateId s0 = f.add_state();
  f.set_start(s0);
  StateId ba = append_states(f, a);
  StateId bb = append_states(f, b);
  f.add_arc(s0, {kEpsilon, kEpsilon, ba + a.start()});
  f.add_arc(s0, {kEpsilon, kEpsilon, bb + b.start()});
  return f;
}

Fst concat(const Fst& a, const Fst& b) {
  Fst f;
  StateId ba = append_states(f, a);
  StateId bb = append_states(f, b);
  f.set_start(ba + a.start());
  for (StateId s = 0; s < a.num_states(); ++s) {
    if (a.is_final(s)) {
      f.set_final(ba + s, false);
      f.add_arc(ba + s, {kEpsilon, kEpsilon, bb + b.start()});
    }
  }
  return f;
}

Fst star(const Fst& a) {
  Fst f;
  StateId s0 = f.add_state();
  f.set_start(s0);
  f.set_final(s0);
  StateId ba = append_states(f, a);
  f.add_arc(s0, {kEpsilon, kEpsilon, ba + a.start()});
  for (StateId s = 0; s < a.num_states(); ++s) {
    if (a.is_final(s)) {
      f.set_final(ba + s, false);
      f.add_arc(ba + s, {kEpsilon, kEpsilon, s0});
    }
  }
  return f;
}

Fst optional_of(const Fst& a) {
  return union_of(a, single_state_acceptor(true));
}

bool is_acceptor(const Fst& t) {
  for (StateId s = 0; s < t.num_states(); ++s)
    for (const Arc& a : t.arcs(s))
      if (a.ilabel != a.olabel) return false;
  return true;
}

Fst cross(const Fst& a, const Fst& b) {
  if (!is_acceptor(a) || !is_acceptor(b))
    throw NotAcceptor("cross: operand has a non-identity arc");
  for (StateId s = 0; s < b.num_states(); ++s)
    for (const Arc& arc : b.arcs(s))
      if (arc.ilabel == kOther)
        throw NotAcceptor("cross: open class on the output side");
  Fst ea;
  for (StateId s = 0; s < a.num_states(); ++s) ea.add_state();
  ea.set_start(a.start());
  for (StateId s = 0; s < a.num_states(); ++s) {
    if (a.is_final(s)) ea.set_final(s);
    for (const Arc& arc : a.arcs(s))
      ea.add_arc(s, {arc.ilabel, kEpsilon, arc.target});
  }
  Fst eb;
  for (StateId s = 0; s < b.num_states(); ++s) eb.add_state();
  eb.set_start(b.start());
  for (StateId s = 0; s < b.num_states(); ++s) {
    if (b.is_final(s)) eb.set_final(s);
    for (const Arc& arc : b.arcs(s))
      eb.add_arc(s, {kEpsilon, arc.olabel, arc.target});
  }
  return concat(ea, eb);
}

// -- Composition -------------------------------------------------------------

Fst compose(const Fst& a, const Fst& b) {
  for (const Fst* f : {&a, &b})
    for (StateId s = 0; s < f->num_states(); ++s)
      for (const Arc& arc : f->arcs(s))
        if (arc.olabel == kOther && arc.ilabel != kOther)
          throw Error("compose: unsupported open-class output arc");

  Fst out;
  std::map<std::pair<StateId, StateId>, StateId> ids;
  std::deque<std::pair<StateId, StateId>> work;

  auto state_of = [&](StateId pa, StateId pb) {
    auto key = std::make_pair(pa, pb);
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    StateId id = out.add_state();
    ids.emplace(key, id);
    if (a.is_final(pa) && b.is_final(pb)) out.set_final(id);
    work.push_back(key);
    return id;
  };

  StateId start = state_of(a.start(), b.start());
  out.set_start(start);

  while (!work.empty()) {
    auto [pa, pb] = work.front();
    work.pop_front();
    StateId id = ids.at({pa, pb});

    std::set<Label> ila = explicit_ilabels(a, pa);
    std::set<Label> ilb = explicit_ilabels(b, pb);

    // moves where one side stays put
    for (const Arc& A : a.arcs(pa))
      if (A.olabel == kEpsilon)
        out.add_arc(id, {A.ilabel, kEpsilon, state_of(A.target, pb)});
    for (const Arc& B : b.arcs(pb))
      if (B.ilabel == kEpsilon)
        out.add_arc(id, {kEpsilon, B.olabel, state_of(pa, B.target)});

    // middle labels to pair on
    std::set<Label> middles;
    for (const Arc& A : a.arcs(pa))
      if (A.olabel != kEpsilon && A.olabel != kOther) middles.insert(A.olabel);
    for (const Arc& B : b.arcs(pb))
      if (B.ilabel != kEpsilon && B.ilabel != kOther) middles.insert(B.ilabel);

    bool a_other_identity = false, b_has_other = false;
    for (const Arc& A : a.arcs(pa))
      if (A.ilabel == kOther && A.olabel == kOther) a_other_identity = true;
    for (const Arc& B : b.arcs(pb))
      if (B.ilabel == kOther) b_has_other = true;

    for (Label m : middles) {
      bool a_via_other = a_other_identity && is_scalar_label(m) && !ila.count(m);
      bool b_via_other = b_has_other && is_scalar_label(m) && !ilb.count(m);

      std::vector<std::pair<Label, StateId>> at, bt;  // (outer label, target)
      for (const Arc& A : a.arcs(pa))
        if (A.olabel == m) at.push_back({A.ilabel, A.target});
      if (a_via_other)
        for (const Arc& A : a.arcs(pa))
          if (A.ilabel == kOther && A.olabel == kOther)
            at.push_back({m, A.target});
      for (const Arc& B : b.arcs(pb))
        if (B.ilabel == m) bt.push_back({B.olabel, B.target});
      if (b_via_other)
        for (const Arc& B : b.arcs(pb))
          if (B.ilabel == kOther)
            bt.push_back({B.olabel == kOther ? m : B.olabel, B.target});

      if (at.empty() || bt.empty()) continue;
      for (auto& [i1, t1] : at)
        for (auto& [o2, t2] : bt)
          out.add_arc(id, {i1, o2, state_of(t1, t2)});

      // This composed state now has explicit arcs on input m; instantiate
      // a's other epsilon-output move there so m keeps that path too.
      if (a_via_other)
        for (const Arc& A : a.arcs(pa))
          if (A.ilabel == kOther && A.olabel == kEpsilon)
            out.add_arc(id, {m, kEpsilon, state_of(A.target, pb)});
    }

    if (a_other_identity && b_has_other) {
      for (const Arc& A : a.arcs(pa)) {
        if (!(A.ilabel == kOther && A.olabel == kOther)) continue;
        for (const Arc& B : b.arcs(pb)) {
          if (B.ilabel != kOther) continue;
          Label ol = B.olabel == kOther ? kOther : B.olabel;
          out.add_arc(id, {kOther, ol, state_of(A.target, B.target)});
        }
      }
    }
  }
  return trim(out);
}

// -- Trim --------------------------------------------------------------------

Fst trim(const Fst& t) {
  std::size_t n = t.num_states();
  std::vector<bool> reach(n, false), coacc(n, false);
  {
    std::deque<StateId> q{t.start()};
    reach[t.start()] = true;
    while (!q.empty()) {
      StateId s = q.front();
      q.pop_front();
      for (const Arc& a : t.arcs(s))
        if (!reach[a.target]) {
          reach[a.target] = true;
          q.push_back(a.target);
        }
    }
  }
  {
    std::vector<std::vector<StateId>> rev(n);
    for (StateId s = 0; s < n; ++s)
      for (const Arc& a : t.arcs(s)) rev[a.target].push_back(s);
    std::deque<StateId> q;
    for (StateId s = 0; s < n; ++s)
      if (t.is_final(s)) {
        coacc[s] = true;
        q.push_back(s);
      }
    while (!q.empty()) {
      StateId s = q.front();
      q.pop_front();
      for (StateId p : rev[s])
        if (!coacc[p]) {
          coacc[p] = true;
          q.push_back(p);
        }
    }
  }

  std::vector<bool> alive(n);
  for (StateId s = 0; s < n; ++s) alive[s] = reach[s] && coacc[s];
  if (!alive[t.start()]) {
    Fst f = single_state_acceptor(false);
    f.set_functional_hint(t.functional_hint());
    return f;
  }

  Fst out;
  std::vector<StateId> remap(n, 0);
  for (StateId s = 0; s < n; ++s)
    if (alive[s]) remap[s] = out.add_state();
  std::optional<StateId> dead;
  auto dead_state = [&]() {
    if (!dead) dead = out.add_state();
    return *dead;
  };

  out.set_start(remap[t.start()]);
  for (StateId s = 0; s < n; ++s) {
    if (!alive[s]) continue;
    if (t.is_final(s)) out.set_final(remap[s]);
    bool live_other = false;
    for (const Arc& a : t.arcs(s))
      if (a.ilabel == kOther && alive[a.target]) live_other = true;
    std::set<Label> shadowed;
    for (const Arc& a : t.arcs(s)) {
      if (alive[a.target]) {
        out.add_arc(remap[s], {a.ilabel, a.olabel, remap[a.target]});
      } else if (live_other && is_scalar_label(a.ilabel)) {
        shadowed.insert(a.ilabel);
      }
    }
    // A scalar whose arcs all died must not fall through to kOther.
    for (Label l : shadowed)
      if (!state_has_explicit(out, remap[s], l))
        out.add_arc(remap[s], {l, l, dead_state()});
  }
  out.set_functional_hint(t.functional_hint());
  return out;
}

Fst project_input(const Fst& t) {
  Fst out;
  for (StateId s = 0; s < t.num_states(); ++s) out.add_state();
  out.set_start(t.start());
  for (StateId s = 0; s < t.num_states(); ++s) {
    if (t.is_final(s)) out.set_final(s);
    for (const Arc& a : t.arcs(s)) out.add_arc(s, {a.ilabel, a.ilabel, a.target});
  }
  return out;
}

// -- Determinize / minimize (acceptors) --------------------------------------

namespace {

using Subset = std::vector<StateId>;

Subset closure(const Fst& f, Subset s) {
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

Fst determinize_acceptor(const Fst& f) {
  Fst out;
  std::map<Subset, StateId> ids;
  std::deque<Subset> work;
  std::optional<StateId> dead;
  auto dead_state = [&]() {
    if (!dead) dead = out.add_state();
    return *dead;
  };
  auto state_of = [&](const Subset& s) {
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    StateId id = out.add_state();
    ids.emplace(s, id);
    for (StateId q : s)
      if (f.is_final(q)) out.set_final(id);
    work.push_back(s);
    return id;
  };

  Subset s0 = closure(f, {f.start()});
  out.set_start(state_of(s0));

  while (!work.empty()) {
    Subset s = work.front();
    work.pop_front();
    StateId id = ids.at(s);

    std::set<Label> labels;
    for (StateId q : s)
      for (const Arc& a : f.arcs(q))
        if (a.ilabel != kEpsilon && a.ilabel != kOther) labels.insert(a.ilabel);

    Subset other_next;
    {
      std::set<StateId> tgt;
      for (StateId q : s)
        for (const Arc& a : f.arcs(q))
          if (a.ilabel == kOther) tgt.insert(a.target);
      other_next = closure(f, Subset(tgt.begin(), tgt.end()));
    }

    for (Label l : labels) {
      std::set<StateId> tgt;
      for (StateId q : s) {
        bool has_l = false;
        for (const Arc& a : f.arcs(q))
          if (a.ilabel == l) {
            has_l = true;
            tgt.insert(a.target);
          }
        if (!has_l && is_scalar_label(l))
          for (const Arc& a : f.arcs(q))
            if (a.ilabel == kOther) tgt.insert(a.target);
      }
      Subset next = closure(f, Subset(tgt.begin(), tgt.end()));
      if (!next.empty()) {
        out.add_arc(id, {l, l, state_of(next)});
      } else if (!other_next.empty() && is_scalar_label(l)) {
        out.add_arc(id, {l, l, dead_state()});
      }
    }
    if (!other_next.empty())
      out.add_arc(id, {kOther, kOther, state_of(other_next)});
  }
  return out;
}

// Moore partition refinement over the machine's explicit label alphabet,
// with kOther as the default transition. States that cannot reach a final
// state count as one dead class, so shadow arcs canonicalize.
Fst minimize_dfa(const Fst& f) {
  std::size_t n = f.num_states();
  if (n == 0) return f;
  constexpr int kDeadCls = -1;

  std::vector<bool> alive(n, false);
  {
    std::vector<std::vector<StateId>> rev(n);
    std::deque<StateId> q;
    for (StateId s = 0; s < n; ++s) {
      for (const Arc& a : f.arcs(s)) rev[a.target].push_back(s);
      if (f.is_final(s)) {
        alive[s] = true;
        q.push_back(s);
      }
    }
    while (!q.empty()) {
      StateId s = q.front();
      q.pop_front();
      for (StateId p : rev[s])
        if (!alive[p]) {
          alive[p] = true;
          q.push_back(p);
        }
    }
  }
  if (!alive[f.start()]) return single_state_acceptor(false);

  std::vector<int> cls(n);
  for (StateId s = 0; s < n; ++s) cls[s] = f.is_final(s) ? 1 : 0;

  auto target_cls = [&](StateId t) {
    return alive[t] ? cls[t] : kDeadCls;
  };

  using Sig = std::pair<int, std::vector<std::pair<Label, int>>>;
  auto signature = [&](StateId s) {
    int other_cls = kDeadCls;
    for (const Arc& a : f.arcs(s))
      if (a.ilabel == kOther) other_cls = target_cls(a.target);
    std::vector<std::pair<Label, int>> trans;
    for (const Arc& a : f.arcs(s)) {
      if (a.ilabel == kOther) continue;
      int c = target_cls(a.target);
      if (is_scalar_label(a.ilabel)) {
        if (c == other_cls) continue;           // redundant with default
        if (c == kDeadCls && other_cls == kDeadCls) continue;  // no shadow
      } else if (c == kDeadCls) {
        continue;  // dead epsilon/sentinel arcs carry nothing
      }
      trans.push_back({a.ilabel, c});
    }
    std::sort(trans.begin(), trans.end());
    trans.erase(std::unique(trans.begin(), trans.end()), trans.end());
    return Sig{other_cls, std::move(trans)};
  };

  for (;;) {
    std::map<std::pair<int, Sig>, int> sig_ids;
    std::vector<int> next_cls(n, 0);
    for (StateId s = 0; s < n; ++s) {
      if (!alive[s]) continue;
      auto key = std::make_pair(cls[s], signature(s));
      auto it = sig_ids.find(key);
      if (it == sig_ids.end())
        it = sig_ids.emplace(std::move(key), static_cast<int>(sig_ids.size()))
                 .first;
      next_cls[s] = it->second;
    }
    if (next_cls == cls) break;
    cls = std::move(next_cls);
  }

  int num_cls = 0;
  for (StateId s = 0; s < n; ++s)
    if (alive[s]) num_cls = std::max(num_cls, cls[s] + 1);
  std::vector<StateId> repr(num_cls, 0);
  std::vector<bool> have(num_cls, false);
  for (StateId s = 0; s < n; ++s)
    if (alive[s] && !have[cls[s]]) {
      have[cls[s]] = true;
      repr[cls[s]] = s;
    }

  Fst out;
  for (int c = 0; c < num_cls; ++c) out.add_state();
  std::optional<StateId> dead;
  auto dead_state = [&]() {
    if (!dead) dead = out.add_state();
    return *dead;
  };
  out.set_start(static_cast<StateId>(cls[f.start()]));
  for (int c = 0; c < num_cls; ++c) {
    StateId s = repr[c];
    if (f.is_final(s)) out.set_final(static_cast<StateId>(c));
    auto [other_cls, trans] = signature(s);
    for (auto [label, tc] : trans) {
      if (tc == kDeadCls)
        out.add_arc(static_cast<StateId>(c), {label, label, dead_state()});
      else
        out.add_arc(static_cast<StateId>(c),
                    {label, label, static_cast<StateId>(tc)});
    }
    if (other_cls != kDeadCls)
      out.add_arc(static_cast<StateId>(c),
                  {kOther, kOther, static_cast<StateId>(other_cls)});
  }
  return trim(out);
}

Fst remove_eps_eps(const Fst& f) {
  Fst out;
  for (StateId s = 0; s < f.num_states(); ++s) out.add_state();
  out.set_start(f.start());
  auto has_other = [&](StateId q) {
    for (const Arc& a : f.arcs(q))
      if (a.ilabel == kOther) return true;
    return false;
  };
  for (StateId s = 0; s < f.num_states(); ++s) {
    Subset cl = closure(f, {s});
    for (StateId q : cl) {
      if (f.is_final(q)) out.set_final(s);
      std::vector<Arc> kept;
      for (const Arc& a : f.arcs(q))
        if (!(a.ilabel == kEpsilon && a.olabel == kEpsilon)) kept.push_back(a);
      if (q == s || kept.empty()) {
        if (q == s)
          for (const Arc& a : kept) out.add_arc(s, a);
        continue;
      }
      // Merging arcs across states is only safe when no kOther arc's
      // sibling set would change; otherwise keep the state behind a hop.
      if (has_other(q) || has_other(s)) {
        StateId hop = out.add_state();
        out.add_arc(s, {kEpsilon, kEpsilon, hop});
        for (const Arc& a : kept) out.add_arc(hop, a);
      } else {
        for (const Arc& a : kept) out.add_arc(s, a);
      }
    }
  }
  return out;
}

}  // namespace

Fst optimize(const Fst& t) {
  Fst result;
  if (is_acceptor(t)) {
    result = minimize_dfa(determinize_acceptor(t));
  } else {
    result = trim(remove_eps_eps(t));
  }
  result.set_functional_hint(t.functional_hint());
  return result;
}

// -- Membership --------------------------------------------------------------

bool accepts(const Fst& a, std::u32string_view s) {
  Subset cur = closure(a, {a.start()});
  for (char32_t c : s) {
    std::set<StateId> tgt;
    for (StateId q : cur) {
      bool has_c = false;
      for (const Arc& arc : a.arcs(q))
        if (arc.ilabel == c) {
          has_c = true;
          tgt.insert(arc.target);
        }
      if (!has_c)
        for (const Arc& arc : a.arcs(q))
          if (arc.ilabel == kOther) tgt.insert(arc.target);
    }
    cur = closure(a, Subset(tgt.begin(), tgt.end()));
    if (cur.empty()) return false;
  }
  for (StateId q : cur)
    if (a.is_final(q)) return true;
  return false;
}

// -- Application -------------------------------------------------------------

namespace {

// Memoized per reached (state, pos) configuration only; typical machines are
// near-deterministic, so few configurations are touched per input.
struct ApplyMemo {
  std::uint8_t status = 0;  // 0 unvisited, 1 on stack, 2 done
  bool has_value = false;
  bool pumpable = false;
  std::size_t entry_odepth = 0;
  std::u32string value;
};

struct ApplyCtx {
  const Fst& t;
  const std::u32string_view s;
  std::unordered_map<std::uint64_t, ApplyMemo> memo;

  std::uint64_t key(StateId q, std::size_t pos) const {
    return static_cast<std::uint64_t>(pos) * t.num_states() + q;
  }
};

// Unique output suffix from configuration (q, pos), or nullopt if no
// accepting continuation exists.
std::optional<std::u32string> solve(ApplyCtx& ctx, StateId q, std::size_t pos,
                                    std::size_t odepth) {
  ApplyMemo& entry = ctx.memo[ctx.key(q, pos)];
  if (entry.status == 2)
    return entry.has_value ? std::optional(entry.value) : std::nullopt;
  if (entry.status == 1) {
    // epsilon cycle back to an in-progress configuration
    if (odepth != entry.entry_odepth) entry.pumpable = true;
    return std::nullopt;
  }
  entry.status = 1;
  entry.entry_odepth = odepth;

  std::optional<std::u32string> result;
  bool ambiguous = false;
  auto offer = [&](std::u32string cand) {
    if (!result) {
      result = std::move(cand);
    } else if (*result != cand) {
      ambiguous = true;
    }
  };

  if (pos == ctx.s.size() && ctx.t.is_final(q)) offer(U"");

  bool consuming = pos < ctx.s.size();
  char32_t c = consuming ? ctx.s[pos] : 0;
  bool has_explicit_c = consuming && state_has_explicit(ctx.t, q, c);

  for (const Arc& a : ctx.t.arcs(q)) {
    std::u32string head;
    StateId tq = a.target;
    std::size_t tpos = pos;
    if (a.ilabel == kEpsilon) {
      if (a.olabel != kEpsilon) head.push_back(static_cast<char32_t>(a.olabel));
    } else if (consuming &&
               (a.ilabel == c ||
                (a.ilabel == kOther && !has_explicit_c &&
                 is_scalar_label(c)))) {
      tpos = pos + 1;
      if (a.olabel == kOther)
        head.push_back(c);
      else if (a.olabel != kEpsilon)
        head.push_back(static_cast<char32_t>(a.olabel));
    } else {
      continue;
    }
    auto sub = solve(ctx, tq, tpos, odepth + head.size());
    if (sub) offer(head + *sub);
    if (ambiguous) break;
  }

  // the map may have rehashed during recursion
  ApplyMemo& done = ctx.memo[ctx.key(q, pos)];
  done.status = 2;
  if (ambiguous)
    throw NonFunctional("apply: multiple distinct outputs for input");
  if (done.pumpable && result)
    throw NonFunctional("apply: output-emitting epsilon cycle");
  done.has_value = result.has_value();
  if (result) done.value = *result;
  return result;
}

}  // namespace

std::u32string apply_u32(const Fst& t, std::u32string_view s) {
  if (t.num_states() == 0) throw NoPath("apply: empty machine");
  ApplyCtx ctx{t, s, {}};
  ctx.memo.reserve(64);
  auto result = solve(ctx, t.start(), 0, 0);
  if (!result) throw NoPath("apply: input not in the transducer's domain");
  return *result;
}

std::string apply(const Fst& t, std::string_view utf8) {
  return uni::encode_utf8(apply_u32(t, uni::decode_utf8(utf8)));
}

// -- Functionality check -----------------------------------------------------

namespace {

struct PairNode {
  StateId p, q;
  int side;  // 0: delay is surplus output of p; 1: of q
  std::u32string delay;
  auto operator<=>(const PairNode&) const = default;
};

// out of an arc when matched at a concrete scalar (or unknown: nullopt char)
struct OutSym {
  bool present = false;
  bool known = false;
  char32_t c = 0;
};

OutSym arc_out(const Arc& a, std::optional<char32_t> matched) {
  if (a.olabel == kEpsilon) return {};
  if (a.olabel == kOther) {
    if (matched) return {true, true, *matched};
    return {true, false, 0};
  }
  return {true, true, static_cast<char32_t>(a.olabel)};
}

}  // namespace

bool check_functional(const Fst& t, std::size_t node_budget) {
  Fst f = trim(t);
  if (f.num_states() == 0) return true;
  constexpr std::size_t kMaxDelay = 4096;

  // Phase 1: the square machine over common inputs, as plain (p, q) pairs.
  struct PairEdge {
    std::uint64_t target;
    OutSym op, oq;
  };
  auto pair_key = [&](StateId p, StateId q) {
    return static_cast<std::uint64_t>(p) * f.num_states() + q;
  };
  std::map<std::uint64_t, std::vector<PairEdge>> edges;
  {
    std::deque<std::uint64_t> work{pair_key(f.start(), f.start())};
    edges[work.front()];
    std::size_t nodes = 0;
    while (!work.empty()) {
      if (++nodes > node_budget) return false;  // budget: report unknown
      std::uint64_t key = work.front();
      work.pop_front();
      StateId p = static_cast<StateId>(key / f.num_states());
      StateId q = static_cast<StateId>(key % f.num_states());

      std::vector<PairEdge>& out = edges[key];
      auto add_edge = [&](StateId np, StateId nq, OutSym op, OutSym oq) {
        std::uint64_t nk = pair_key(np, nq);
        if (!edges.count(nk)) {
          edges[nk];
          work.push_back(nk);
        }
        // edges may have rehashed; reacquire
        edges[key].push_back({nk, op, oq});
      };
      (void)out;

      std::set<Label> ep = explicit_ilabels(f, p);
      std::set<Label> eq = explicit_ilabels(f, q);

      for (const Arc& A : f.arcs(p))
        if (A.ilabel == kEpsilon)
          add_edge(A.target, q, arc_out(A, std::nullopt), {});
      for (const Arc& B : f.arcs(q))
        if (B.ilabel == kEpsilon)
          add_edge(p, B.target, {}, arc_out(B, std::nullopt));

      for (const Arc& A : f.arcs(p)) {
        if (A.ilabel == kEpsilon) continue;
        for (const Arc& B : f.arcs(q)) {
          if (B.ilabel == kEpsilon) continue;
          std::optional<char32_t> matched;
          bool compatible = false;
          if (A.ilabel == B.ilabel && A.ilabel != kOther) {
            compatible = true;
            if (is_scalar_label(A.ilabel))
              matched = static_cast<char32_t>(A.ilabel);
          } else if (A.ilabel == kOther && B.ilabel == kOther) {
            compatible = true;  // shared residual class assumed nonempty
          } else if (A.ilabel == kOther && is_scalar_label(B.ilabel)) {
            compatible = !ep.count(B.ilabel);
            matched = static_cast<char32_t>(B.ilabel);
          } else if (B.ilabel == kOther && is_scalar_label(A.ilabel)) {
            compatible = !eq.count(A.ilabel);
            matched = static_cast<char32_t>(A.ilabel);
          }
          if (!compatible) continue;
          add_edge(A.target, B.target, arc_out(A, matched),
                   arc_out(B, matched));
        }
      }
    }
  }

  // Pair-co-accessibility: only pairs that can jointly accept matter.
  std::set<std::uint64_t> coacc;
  {
    std::map<std::uint64_t, std::vector<std::uint64_t>> rev;
    std::deque<std::uint64_t> work;
    for (const auto& [key, outs] : edges) {
      StateId p = static_cast<StateId>(key / f.num_states());
      StateId q = static_cast<StateId>(key % f.num_states());
      if (f.is_final(p) && f.is_final(q)) {
        coacc.insert(key);
        work.push_back(key);
      }
      for (const PairEdge& e : outs) rev[e.target].push_back(key);
    }
    while (!work.empty()) {
      std::uint64_t key = work.front();
      work.pop_front();
      for (std::uint64_t prev : rev[key])
        if (coacc.insert(prev).second) work.push_back(prev);
    }
  }
  std::uint64_t start_key = pair_key(f.start(), f.start());
  if (!coacc.count(start_key)) return true;  // empty relation

  // Phase 2: delay propagation over the trimmed square machine.
  struct DelayNode {
    std::uint64_t key;
    int side;
    std::u32string delay;
    auto operator<=>(const DelayNode&) const = default;
  };
  auto feed = [&](DelayNode& cur, OutSym o, int emitter) -> bool {
    if (!o.present) return true;
    if (!o.known) return false;  // unknown scalar against pending delay
    if (cur.delay.empty()) {
      cur.side = emitter;
      cur.delay.push_back(o.c);
      return true;
    }
    if (cur.side == emitter) {
      cur.delay.push_back(o.c);
      return true;
    }
    if (cur.delay.front() != o.c) return false;
    cur.delay.erase(cur.delay.begin());
    return true;
  };

  std::set<DelayNode> seen;
  std::deque<DelayNode> work;
  seen.insert({start_key, 0, U""});
  work.push_back({start_key, 0, U""});
  std::size_t nodes = 0;
  while (!work.empty()) {
    if (++nodes > node_budget) return false;
    DelayNode n = work.front();
    work.pop_front();
    StateId p = static_cast<StateId>(n.key / f.num_states());
    StateId q = static_cast<StateId>(n.key % f.num_states());
    if (f.is_final(p) && f.is_final(q) && !n.delay.empty()) return false;

    for (const PairEdge& e : edges[n.key]) {
      if (!coacc.count(e.target)) continue;
      DelayNode next = n;
      next.key = e.target;
      if (!e.op.known && !e.oq.known && e.op.present && e.oq.present &&
          next.delay.empty()) {
        // identical unknown scalars cancel
      } else {
        if (!feed(next, e.op, 0)) return false;
        if (!feed(next, e.oq, 1)) return false;
      }
      if (next.delay.empty()) next.side = 0;
      if (next.delay.size() > kMaxDelay) return false;
      if (seen.insert(next).second) work.push_back(next);
    }
  }
  return true;
}

}  // namespace textnorm::fst
