#pragma once

#include <cstdlib>
#include <deque>
#include <functional>
#include <set>
#include <unordered_set>

#include "linear.hpp"

namespace sdrw {

// ---------------------------------------------------------------------------
// Rules
// ---------------------------------------------------------------------------

// Left-monomial 3-cell instance: a concrete LHS monomial with coefficient 1
// rewriting to a linear combination with the same boundary. Parameterized
// families are expanded at preset construction, where the guard predicates
// live; params keeps the chosen values for reporting.
struct Rule {
  std::string name;
  std::string params;
  Monomial lhs;
  LinComb rhs;
  bool in_E = false;
};

inline std::string rule_label(const Rule& r) {
  return r.params.empty() ? r.name : r.name + "(" + r.params + ")";
}

struct RegistrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Polygraph {
  const Cartan* ct = nullptr;
  std::vector<Rule> rules;

  void add(Rule r) {
    auto [s, c] = canonicalize(r.lhs);
    if (s == 0) throw RegistrationError(r.name + ": LHS is zero");
    r.lhs = c;
    if (s < 0) r.rhs = lin_scale(r.rhs, s);
    if (r.rhs.src != r.lhs.src || r.rhs.lam != r.lhs.lam || r.rhs.tgt != target_word(r.lhs))
      throw RegistrationError(r.name + "(" + r.params + "): RHS boundary differs from LHS");
    const int lp = parity(r.lhs);
    const int ld = qdegree(r.lhs);
    for (const auto& [m, cf] : r.rhs.terms) {
      if (parity(m) != lp)
        throw RegistrationError(r.name + "(" + r.params + "): parity not preserved");
      if (qdegree(m) != ld)
        throw RegistrationError(r.name + "(" + r.params + "): qdegree not preserved");
    }
    rules.push_back(std::move(r));
  }

  std::vector<int> rule_indices(bool only_E, bool only_R) const {
    std::vector<int> out;
    for (int k = 0; k < static_cast<int>(rules.size()); ++k) {
      if (only_E && !rules[k].in_E) continue;
      if (only_R && rules[k].in_E) continue;
      out.push_back(k);
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Matching
// ---------------------------------------------------------------------------

// An occurrence of a rule LHS inside a monomial: `arranged` is an exchange
// representative of the matched monomial whose levels [level, level+K) are
// exactly the LHS slices shifted right by `shift`; `sign` relates the
// canonical representative to `arranged`.
struct Match {
  int level = 0;
  int shift = 0;
  int sign = 1;
  std::vector<Slice> arranged;
  std::vector<int> members;  // original canonical levels, for deduplication
};

namespace detail {

inline bool slice_matches(const Slice& have, const Slice& want, int shift) {
  return have.g == want.g && have.i == want.i && have.j == want.j &&
         have.dots == want.dots && have.pos == want.pos + shift;
}

// An exchange representative of the target paired with the original
// canonical level of each slice and the sign relating the two.
struct Arrangement {
  std::vector<Slice> sl;
  std::vector<int> id;
  int sign = 1;
};

// Scans one representative for literal contiguous copies of the pattern.
inline bool scan_arrangement(const Monomial& pat, const Monomial& tgt, const Arrangement& ar,
                             std::vector<Match>& out,
                             std::set<std::pair<std::vector<int>, int>>& seen, bool first_only) {
  const auto& P = pat.sl;
  const int K = static_cast<int>(P.size());
  const int n = static_cast<int>(ar.sl.size());
  Word w = tgt.src;
  for (int a = 0; a + K <= n; ++a) {
    if (a > 0) w = apply_slice(ar.sl[a - 1], w);
    const int shift = ar.sl[a].pos - P[0].pos;
    if (shift < 0) continue;
    bool ok = true;
    for (int t = 0; t < K && ok; ++t) ok = slice_matches(ar.sl[a + t], P[t], shift);
    if (!ok) continue;
    if (shift + static_cast<int>(pat.src.size()) > static_cast<int>(w.size()) ||
        w.substr(shift, pat.src.size()) != pat.src ||
        weight_at_gap(*tgt.ct, tgt.lam, w, shift + static_cast<int>(pat.src.size())) != pat.lam)
      continue;
    std::vector<int> key(ar.id.begin() + a, ar.id.begin() + a + K);
    std::sort(key.begin(), key.end());
    if (!seen.insert({key, shift}).second) continue;
    Match m;
    m.level = a;
    m.shift = shift;
    m.sign = ar.sign;
    m.arranged = ar.sl;
    m.members = std::move(key);
    out.push_back(std::move(m));
    if (first_only) return true;
  }
  return false;
}

}  // namespace detail

// Exploration bound for exchange classes during matching.
inline constexpr int kMaxArrangements = 20000;

// All occurrences of `pat` (a rule LHS) in canonical monomial `tgt`, up to
// exchange: representatives of the exchange class are enumerated breadth
// first and scanned for literal contiguous copies of the pattern;
// occurrences are deduplicated by matched slice set.
inline std::vector<Match> find_matches(const Monomial& pat, const Monomial& tgt,
                                       bool first_only = false) {
  std::vector<Match> out;
  const int K = pat.levels();
  const int n = tgt.levels();
  if (K == 0 || K > n) return out;
  {
    int have[10] = {0}, want[10] = {0};
    for (const auto& s : tgt.sl) ++have[static_cast<int>(s.g)];
    for (const auto& s : pat.sl) ++want[static_cast<int>(s.g)];
    for (int g = 0; g < 10; ++g)
      if (want[g] > have[g]) return out;
  }
  std::set<std::pair<std::vector<int>, int>> seen;
  detail::Arrangement start{tgt.sl, {}, 1};
  start.id.resize(n);
  for (int t = 0; t < n; ++t) start.id[t] = t;
  std::set<std::vector<Slice>> visited{start.sl};
  std::deque<detail::Arrangement> queue;
  queue.push_back(std::move(start));
  while (!queue.empty()) {
    detail::Arrangement ar = std::move(queue.front());
    queue.pop_front();
    if (detail::scan_arrangement(pat, tgt, ar, out, seen, first_only)) return out;
    if (static_cast<int>(visited.size()) >= kMaxArrangements) continue;
    for (int k = 0; k + 1 < n; ++k) {
      Slice lower = ar.sl[k];
      Slice upper = ar.sl[k + 1];
      if (!exchange_down(lower, upper)) continue;
      detail::Arrangement nb = ar;
      nb.sl[k] = upper;
      nb.sl[k + 1] = lower;
      std::swap(nb.id[k], nb.id[k + 1]);
      if ((ar.sl[k].par & 1) && (ar.sl[k + 1].par & 1)) nb.sign = -nb.sign;
      if (!visited.insert(nb.sl).second) continue;
      queue.push_back(std::move(nb));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Steps and traces
// ---------------------------------------------------------------------------

struct StaleMatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TraceEntry {
  std::string rule;
  std::string params;
  int level;
  int shift;
  int sign;
  Monomial before;
};

struct RewriteTrace {
  LinComb start;
  std::vector<TraceEntry> entries;
};

// Replaces the matched block by a rule RHS inside one monomial; returns the
// contribution of `coef * monomial` after the step.
inline LinComb apply_match(const Rule& r, const Monomial& m, const Match& mt, const Rat& coef) {
  LinComb out = lin_zero(*m.ct, m.src, target_word(m), m.lam);
  const int K = r.lhs.levels();
  std::vector<Slice> below(mt.arranged.begin(), mt.arranged.begin() + mt.level);
  std::vector<Slice> above(mt.arranged.begin() + mt.level + K, mt.arranged.end());
  for (const auto& [rm, rc] : r.rhs.terms) {
    Monomial nm;
    nm.ct = m.ct;
    nm.src = m.src;
    nm.lam = m.lam;
    nm.sl = below;
    for (auto s : rm.sl) {
      s.pos += mt.shift;
      nm.sl.push_back(s);
    }
    for (const auto& s : above) nm.sl.push_back(s);
    refresh(nm);
    lin_insert(out, coef * mt.sign * rc, nm);
  }
  return out;
}

// One rewriting step at a chosen occurrence.
inline LinComb step(const Rule& r, const LinComb& lc, const Monomial& term, const Match& mt,
                    RewriteTrace* trace = nullptr) {
  auto it = lc.terms.find(term);
  if (it == lc.terms.end()) throw StaleMatch("step: monomial no longer present");
  const Rat coef = it->second;
  LinComb rest = lc;
  rest.terms.erase(term);
  LinComb repl = apply_match(r, term, mt, coef);
  if (trace) trace->entries.push_back({r.name, r.params, mt.level, mt.shift, mt.sign, term});
  return lin_add(rest, repl);
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

enum class Strategy { FirstTermFirstRule, LastTermLastRule };

inline long default_fuel() {
  if (const char* e = std::getenv("SDRW_FUEL")) {
    const long v = std::atol(e);
    if (v > 0) return v;
  }
  return 1000000;
}

struct NormalizeResult {
  LinComb value;
  RewriteTrace trace;
  bool fuel_exhausted = false;
  long steps = 0;
};

namespace detail {

// Finds the first (rule, match) pair on `m` according to rule order.
inline std::optional<std::pair<int, Match>> first_redex(const Polygraph& P, const Monomial& m,
                                                        const std::vector<int>& order,
                                                        bool last_rule) {
  if (!last_rule) {
    for (int idx : order) {
      auto ms = find_matches(P.rules[idx].lhs, m, true);
      if (!ms.empty()) return std::pair{idx, ms.front()};
    }
  } else {
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      auto ms = find_matches(P.rules[*it].lhs, m, false);
      if (!ms.empty()) return std::pair{*it, ms.back()};
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Rewrites to normal form under the listed rules (default: all).
inline NormalizeResult normalize(const Polygraph& P, const LinComb& start,
                                 Strategy strat = Strategy::FirstTermFirstRule,
                                 long fuel = -1, const std::vector<int>* which = nullptr) {
  if (fuel < 0) fuel = default_fuel();
  std::vector<int> order;
  if (which) order = *which;
  else
    for (int k = 0; k < static_cast<int>(P.rules.size()); ++k) order.push_back(k);
  NormalizeResult res;
  res.trace.start = start;
  LinComb cur = start;
  while (true) {
    bool stepped = false;
    const bool last = (strat == Strategy::LastTermLastRule);
    std::vector<Monomial> terms = lin_support(cur);
    if (last) std::reverse(terms.begin(), terms.end());
    for (const auto& m : terms) {
      auto red = detail::first_redex(P, m, order, last);
      if (!red) continue;
      if (res.steps >= fuel) {
        res.fuel_exhausted = true;
        res.value = cur;
        return res;
      }
      cur = step(P.rules[red->first], cur, m, red->second, &res.trace);
      ++res.steps;
      stepped = true;
      break;
    }
    if (!stepped) break;
  }
  res.value = cur;
  return res;
}

inline bool is_normal(const Polygraph& P, const Monomial& m, const std::vector<int>* which = nullptr) {
  std::vector<int> order;
  if (which) order = *which;
  else
    for (int k = 0; k < static_cast<int>(P.rules.size()); ++k) order.push_back(k);
  for (int idx : order)
    if (!find_matches(P.rules[idx].lhs, m, true).empty()) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Rewriting modulo: split polygraph and quasi-normal forms
// ---------------------------------------------------------------------------

// Weight function on monomials; the quasi-termination weight of a LinComb is
// the maximum over its support.
using TauFn = std::function<long(const Monomial&)>;

struct ModuloSystem {
  Polygraph P;                 // all rules; in_E marks the sub-polygraph E
  TauFn tau;
  std::vector<int> cyclic;     // rule indices excluded from phase-2 reduction
  // preferred-representative moves: slide rules (bubble to the rightmost
  // region) and the re-spelling of the non-preferred crossing orientation
  std::vector<int> slide_rules;
  std::function<std::optional<LinComb>(const Monomial&)> respell;

  bool is_cyclic(int idx) const {
    return std::find(cyclic.begin(), cyclic.end(), idx) != cyclic.end();
  }
};

inline long tau_of(const TauFn& tau, const LinComb& lc) {
  long best = 0;
  for (const auto& [m, c] : lc.terms) best = std::max(best, tau(m));
  return best;
}

// Single-monomial E-representatives reachable by directed E-steps whose RHS
// is one monomial with coefficient +-1; used to expose redexes modulo E.
inline std::vector<std::pair<Monomial, int>> e_reps(const ModuloSystem& S, const Monomial& m,
                                                    int max_states = 512) {
  std::vector<std::pair<Monomial, int>> out{{m, 1}};
  std::set<Monomial> seen{m};
  std::deque<std::pair<Monomial, int>> q{{m, 1}};
  while (!q.empty() && static_cast<int>(out.size()) < max_states) {
    auto [cur, sgn] = q.front();
    q.pop_front();
    for (int idx = 0; idx < static_cast<int>(S.P.rules.size()); ++idx) {
      const Rule& r = S.P.rules[idx];
      if (!r.in_E || r.rhs.terms.size() != 1) continue;
      const auto& [rm, rc] = *r.rhs.terms.begin();
      if (rc != 1 && rc != -1) continue;
      for (const auto& mt : find_matches(r.lhs, cur)) {
        LinComb one = apply_match(r, cur, mt, 1);
        if (one.terms.size() != 1) continue;
        const auto& [nm, nc] = *one.terms.begin();
        if (nc != 1 && nc != -1) continue;
        if (!seen.insert(nm).second) continue;
        const int ns = sgn * (nc == 1 ? 1 : -1);
        out.push_back({nm, ns});
        q.push_back({nm, ns});
        if (static_cast<int>(out.size()) >= max_states) break;
      }
    }
  }
  return out;
}

struct QnfResult {
  LinComb value;
  bool fuel_exhausted = false;
  bool cycle_detected = false;
  long steps = 0;
};

// Quasi-normal form procedure: strictly tau-decreasing steps first, then
// tau-preserving steps away from the declared cyclic families (with a
// visited-class memo that detects indexed cycles), preferred-representative
// moves, and a final E-normalization.
inline QnfResult normalize_modulo(const ModuloSystem& S, const LinComb& start, long fuel = -1) {
  if (fuel < 0) fuel = default_fuel();
  QnfResult res;
  LinComb cur = start;
  std::set<std::string> memo;
  const std::vector<int> e_only = S.P.rule_indices(true, false);

  auto phase1 = [&]() -> bool {
    bool any = false;
    bool go = true;
    while (go && res.steps < fuel) {
      go = false;
      for (const auto& m : lin_support(cur)) {
        const long tm = S.tau(m);
        if (tm == 0) continue;
        std::optional<std::pair<int, Match>> found;
        for (int idx = 0; idx < static_cast<int>(S.P.rules.size()) && !found; ++idx) {
          for (const auto& mt : find_matches(S.P.rules[idx].lhs, m, true)) {
            LinComb repl = apply_match(S.P.rules[idx], m, mt, 1);
            if (tau_of(S.tau, repl) < tm) { found = {idx, mt}; break; }
          }
        }
        if (found) {
          cur = step(S.P.rules[found->first], cur, m, found->second);
          ++res.steps;
          any = go = true;
          break;
        }
      }
    }
    return any;
  };

  auto phase2 = [&]() -> bool {
    for (const auto& m : lin_support(cur)) {
      const long tm = S.tau(m);
      for (int idx = 0; idx < static_cast<int>(S.P.rules.size()); ++idx) {
        if (S.is_cyclic(idx)) continue;
        const Rule& r = S.P.rules[idx];
        if (r.in_E) {
          for (const auto& mt : find_matches(r.lhs, m, true)) {
            LinComb repl = apply_match(r, m, mt, 1);
            if (tau_of(S.tau, repl) > tm) continue;
            cur = step(r, cur, m, mt);
            ++res.steps;
            return true;
          }
          continue;
        }
        for (const auto& [rep, sgn] : e_reps(S, m)) {
          for (const auto& mt : find_matches(r.lhs, rep, true)) {
            LinComb repl = apply_match(r, rep, mt, sgn);
            if (tau_of(S.tau, repl) > tm) continue;
            const std::string key = print_diagram(rep) + "|" + r.name + "|" + r.params +
                                    "#" + std::to_string(mt.shift) + "@" + std::to_string(mt.level);
            if (!memo.insert(key).second) {
              res.cycle_detected = true;
              continue;
            }
            LinComb rest = cur;
            auto it = rest.terms.find(m);
            if (it == rest.terms.end()) continue;
            const Rat coef = it->second;
            rest.terms.erase(it);
            cur = lin_add(rest, lin_scale(repl, coef));
            ++res.steps;
            return true;
          }
        }
      }
    }
    return false;
  };

  auto preferred = [&]() -> bool {
    bool any = false;
    // re-spell non-preferred crossings
    bool go = true;
    while (go && res.steps < fuel) {
      go = false;
      for (const auto& [m, c] : cur.terms) {
        if (!S.respell) break;
        auto repl = S.respell(m);
        if (!repl) continue;
        LinComb rest = cur;
        rest.terms.erase(m);
        cur = lin_add(rest, lin_scale(*repl, c));
        ++res.steps;
        any = go = true;
        break;
      }
    }
    // slide bubbles to the rightmost region
    go = true;
    while (go && res.steps < fuel) {
      go = false;
      for (const auto& m : lin_support(cur)) {
        for (int idx : S.slide_rules) {
          auto ms = find_matches(S.P.rules[idx].lhs, m, true);
          if (ms.empty()) continue;
          cur = step(S.P.rules[idx], cur, m, ms.front());
          ++res.steps;
          any = go = true;
          break;
        }
        if (go) break;
      }
    }
    return any;
  };

  while (res.steps < fuel) {
    phase1();
    if (res.steps >= fuel) break;
    if (phase2()) continue;
    if (preferred()) continue;
    break;
  }
  if (res.steps >= fuel) res.fuel_exhausted = true;
  // final E-normal form
  NormalizeResult fin = normalize(S.P, cur, Strategy::FirstTermFirstRule,
                                  std::max(1L, fuel - res.steps), &e_only);
  res.steps += fin.steps;
  if (fin.fuel_exhausted) res.fuel_exhausted = true;
  res.value = fin.value;
  return res;
}

// ---------------------------------------------------------------------------
// Fake bubbles
// ---------------------------------------------------------------------------

struct OutOfRegime : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// End(1_lam) combination: closed atoms stacked at gap 0 of the empty word.
inline LinComb end_one(const Cartan& ct, const Weight& lam) {
  return lin_zero(ct, Word(), Word(), lam);
}

inline LinComb end_identity(const Cartan& ct, const Weight& lam) {
  LinComb lc = end_one(ct, lam);
  lin_insert(lc, 1, identity_diagram(ct, Word(), lam));
  return lc;
}

inline LinComb end_atom(const Cartan& ct, const Weight& lam, Gen ori, int dots, int i = 0) {
  LinComb lc = end_one(ct, lam);
  Monomial m = identity_diagram(ct, Word(), lam);
  m.sl.push_back(mk(ori, 0, i, dots));
  refresh(m);
  lin_insert(lc, 1, m);
  return lc;
}

// The distinguished odd closed 2-cell at weight lam (rank-1 index i): a real
// degree-2 atom whose orientation and sign depend on the side of the weight.
inline LinComb odd_bubble(const Cartan& ct, const Weight& lam, int i = 0) {
  const int l = lam[i];
  if (l > 0) return lin_scale(end_atom(ct, lam, Gen::BubCCW, l, i), neg_one_pow(l / 2));
  return end_atom(ct, lam, Gen::BubCW, -l, i);
}

// End(1_lam) product: stacks b on top of a (all atoms at gap 0).
inline LinComb end_mul(const LinComb& a, const LinComb& b) { return lin_vcompose(a, b); }

namespace detail {

// offset < 0 yields zero; offset 0 the empty diagram; odd offsets factor an
// odd bubble; even offsets in the fake regime expand by the defining
// recursion. Real offsets return the actual atom.
inline LinComb fake_or_zero(const Cartan& ct, const Weight& lam, Gen ori, int offset, int i = 0) {
  const int l = lam[i];
  if (offset < 0) return end_one(ct, lam);
  const int actual = (ori == Gen::BubCCW) ? l - 1 + offset : -l - 1 + offset;
  if (actual >= 0) return end_atom(ct, lam, ori, actual, i);
  if (offset == 0) return end_identity(ct, lam);
  if (offset % 2 == 1) return end_mul(odd_bubble(ct, lam, i), fake_or_zero(ct, lam, ori, offset - 1, i));
  const int n = offset / 2;
  const int bound = (ori == Gen::BubCCW) ? -l : l;
  if (offset > bound)
    throw OutOfRegime("fake bubble offset " + std::to_string(offset) + " beyond regime at weight " +
                      std::to_string(l));
  LinComb acc = end_one(ct, lam);
  for (int k = 1; k <= n; ++k) {
    LinComb prod = (ori == Gen::BubCCW)
        ? end_mul(fake_or_zero(ct, lam, Gen::BubCCW, 2 * (n - k), i),
                  fake_or_zero(ct, lam, Gen::BubCW, 2 * k, i))
        : end_mul(fake_or_zero(ct, lam, Gen::BubCCW, 2 * k, i),
                  fake_or_zero(ct, lam, Gen::BubCW, 2 * (n - k), i));
    acc = lin_add(acc, lin_scale(prod, -1));
  }
  return acc;
}

// A bubble written with an actual dot label (possibly negative, i.e. fake).
inline LinComb bubble_by_label(const Cartan& ct, const Weight& lam, Gen ori, int label, int i = 0) {
  if (label >= 0) return end_atom(ct, lam, ori, label, i);
  const int l = lam[i];
  const int offset = (ori == Gen::BubCCW) ? label - l + 1 : label + l + 1;
  return fake_or_zero(ct, lam, ori, offset, i);
}

}  // namespace detail

// Public expansion of a fake bubble given its dotted offset from degree zero.
inline LinComb expand_fake_bubble(const Cartan& ct, const Weight& lam, Gen ori, int offset,
                                  int i = 0) {
  if (!is_bubble(ori)) throw OutOfRegime("expand_fake_bubble: not a bubble orientation");
  if (offset < 0) throw OutOfRegime("expand_fake_bubble: negative degree offset");
  return detail::fake_or_zero(ct, lam, ori, offset, i);
}

}  // namespace sdrw
