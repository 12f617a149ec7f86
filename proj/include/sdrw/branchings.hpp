#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "polygraph.hpp"

namespace sdrw {

// ---------------------------------------------------------------------------
// Local branchings
// ---------------------------------------------------------------------------

enum class BranchKind { Aspherical, Peiffer, Additive, Overlap };

inline const char* branch_kind_name(BranchKind k) {
  switch (k) {
    case BranchKind::Aspherical: return "aspherical";
    case BranchKind::Peiffer: return "peiffer";
    case BranchKind::Additive: return "additive";
    case BranchKind::Overlap: return "overlap";
  }
  return "?";
}

// A pair of rewriting steps out of one source monomial. The traces hold the
// two diverging steps; the matches keep enough data to replay the legs.
struct Branching {
  Monomial source;
  int rule1 = 0;
  int rule2 = 0;
  Match m1, m2;
  BranchKind kind = BranchKind::Overlap;
  RewriteTrace left, right;
};

// Classification of two redexes on the same monomial. Additive branchings
// live on distinct support monomials and are classified by the overload
// below.
inline BranchKind classify(int rule1, int rule2, const Match& m1, const Match& m2) {
  if (rule1 == rule2 && m1.members == m2.members) return BranchKind::Aspherical;
  for (int a : m1.members)
    for (int b : m2.members)
      if (a == b) return BranchKind::Overlap;
  return BranchKind::Peiffer;
}

inline BranchKind classify(const Monomial& t1, int rule1, const Match& m1,
                           const Monomial& t2, int rule2, const Match& m2) {
  if (!(t1 == t2)) return BranchKind::Additive;
  return classify(rule1, rule2, m1, m2);
}

inline BranchKind classify(const Branching& b) {
  return classify(b.rule1, b.rule2, b.m1, b.m2);
}

// ---------------------------------------------------------------------------
// Overlap enumeration
// ---------------------------------------------------------------------------

struct OverlapOptions {
  int max_levels = 8;
  std::size_t max_candidates = 20000;
};

namespace detail {

// Word evolution tolerant of yet-unknown letters. Columns remember which
// source position they came from so that a letter resolved high up in the
// diagram propagates back to the bottom word.
class EvoWord {
 public:
  bool apply(const Slice& s) {
    switch (s.g) {
      case Gen::UpDot: return require(s.pos - 1, letter(s.i, true));
      case Gen::DownDot: return require(s.pos - 1, letter(s.i, false));
      case Gen::UpCross:
        if (!require(s.pos - 1, letter(s.i, true)) || !require(s.pos, letter(s.j, true)))
          return false;
        std::swap(cols_[s.pos - 1], cols_[s.pos]);
        return true;
      case Gen::DownCross:
        if (!require(s.pos - 1, letter(s.i, false)) || !require(s.pos, letter(s.j, false)))
          return false;
        std::swap(cols_[s.pos - 1], cols_[s.pos]);
        return true;
      case Gen::CapL:
        if (!require(s.pos - 1, letter(s.i, false)) || !require(s.pos, letter(s.i, true)))
          return false;
        cols_.erase(cols_.begin() + (s.pos - 1), cols_.begin() + (s.pos + 1));
        return true;
      case Gen::CupL:
        if (!require(s.pos - 1, letter(s.i, true)) || !require(s.pos, letter(s.i, false)))
          return false;
        cols_.erase(cols_.begin() + (s.pos - 1), cols_.begin() + (s.pos + 1));
        return true;
      case Gen::CapR:
        if (s.pos < 1) return false;
        ensure(s.pos - 1);
        cols_.insert(cols_.begin() + (s.pos - 1),
                     {{letter(s.i, false), -1}, {letter(s.i, true), -1}});
        return true;
      case Gen::CupR:
        if (s.pos < 1) return false;
        ensure(s.pos - 1);
        cols_.insert(cols_.begin() + (s.pos - 1),
                     {{letter(s.i, true), -1}, {letter(s.i, false), -1}});
        return true;
      case Gen::BubCCW:
      case Gen::BubCW:
        if (s.pos < 0) return false;
        ensure(s.pos);
        return true;
    }
    return false;
  }

  bool require(int c, char want) {
    if (c < 0) return false;
    ensure(c + 1);
    auto& col = cols_[c];
    if (col.first == 0) {
      col.first = want;
      if (col.second >= 0) bottom_[col.second] = want;
      return true;
    }
    return col.first == want;
  }

  // Fails when a column was never constrained: such a strand is pure context
  // and the superposition is not minimal.
  std::optional<Word> bottom() const {
    Word w;
    for (char c : bottom_) {
      if (c == 0) return std::nullopt;
      w.push_back(c);
    }
    return w;
  }

 private:
  void ensure(int w) {
    while (static_cast<int>(cols_.size()) < w) {
      bottom_.push_back(0);
      cols_.push_back({0, static_cast<int>(bottom_.size()) - 1});
    }
  }

  std::vector<std::pair<char, int>> cols_;  // letter (0 unknown), source column
  std::vector<char> bottom_;
};

struct MergeItem {
  Slice s;
  bool from1;
  bool from2;
};

inline Slice shifted(Slice s, int by) {
  s.pos += by;
  return s;
}

inline void merge_interleavings(const std::vector<Slice>& a, const std::vector<Slice>& b,
                                int a0, int b0, std::size_t ia, std::size_t ib, int shared,
                                std::vector<MergeItem>& acc, const OverlapOptions& opt,
                                std::vector<std::vector<MergeItem>>& out) {
  if (out.size() >= opt.max_candidates) return;
  if (static_cast<int>(acc.size()) > opt.max_levels) return;
  if (ia == a.size() && ib == b.size()) {
    if (shared > 0) out.push_back(acc);
    return;
  }
  if (ia < a.size() && ib < b.size() && shifted(a[ia], a0) == shifted(b[ib], b0)) {
    acc.push_back({shifted(a[ia], a0), true, true});
    merge_interleavings(a, b, a0, b0, ia + 1, ib + 1, shared + 1, acc, opt, out);
    acc.pop_back();
  }
  if (ia < a.size()) {
    acc.push_back({shifted(a[ia], a0), true, false});
    merge_interleavings(a, b, a0, b0, ia + 1, ib, shared, acc, opt, out);
    acc.pop_back();
  }
  if (ib < b.size()) {
    acc.push_back({shifted(b[ib], b0), false, true});
    merge_interleavings(a, b, a0, b0, ia, ib + 1, shared, acc, opt, out);
    acc.pop_back();
  }
}

// Builds the union monomial of one interleaving: evolves the word from the
// bottom, unifying each pattern's source word at its entry level, then fixes
// the ambient weight from the first pattern's boundary and checks the second.
inline std::optional<Monomial> assemble_union(const Cartan& ct, const Rule& r1, const Rule& r2,
                                              const std::vector<MergeItem>& items, int a0,
                                              int b0) {
  EvoWord w;
  bool in1 = false, in2 = false;
  int k1 = 0, k2 = 0;
  std::vector<Slice> slices;
  for (std::size_t k = 0; k < items.size(); ++k) {
    const auto& it = items[k];
    if (it.from1 && !in1) {
      in1 = true;
      k1 = static_cast<int>(k);
      for (std::size_t t = 0; t < r1.lhs.src.size(); ++t)
        if (!w.require(a0 + static_cast<int>(t), r1.lhs.src[t])) return std::nullopt;
    }
    if (it.from2 && !in2) {
      in2 = true;
      k2 = static_cast<int>(k);
      for (std::size_t t = 0; t < r2.lhs.src.size(); ++t)
        if (!w.require(b0 + static_cast<int>(t), r2.lhs.src[t])) return std::nullopt;
    }
    if (!w.apply(it.s)) return std::nullopt;
    slices.push_back(it.s);
  }
  auto bot = w.bottom();
  if (!bot) return std::nullopt;
  Monomial m;
  m.ct = &ct;
  m.src = *bot;
  m.lam = Weight(ct.rank(), 0);
  m.sl = std::move(slices);
  try {
    refresh(m);
  } catch (const DiagramError&) {
    return std::nullopt;
  }
  const Word w1 = word_at_level(m, k1);
  const Weight drop =
      weight_at_gap(ct, Weight(ct.rank(), 0), w1, a0 + static_cast<int>(r1.lhs.src.size()));
  Weight lam = r1.lhs.lam;
  for (int i = 0; i < ct.rank(); ++i) lam[i] -= drop[i];
  m.lam = std::move(lam);
  refresh(m);
  const Word w2 = word_at_level(m, k2);
  if (weight_at_gap(ct, m.lam, w2, b0 + static_cast<int>(r2.lhs.src.size())) != r2.lhs.lam)
    return std::nullopt;
  return m;
}

inline std::string members_key(const std::vector<int>& v) {
  std::string s;
  for (int x : v) s += std::to_string(x) + ",";
  return s;
}

}  // namespace detail

// All critical superpositions of lhs(rule i) and lhs(rule j): union monomials
// carrying a match of each rule such that the matched blocks share at least
// one slice and together cover the whole diagram. Candidates are generated by
// interleaving the two slice sequences at a fixed relative column shift with
// an identified common subsequence; the matcher then validates both redexes
// up to exchange.
inline std::vector<Branching> enumerate_overlaps(const Polygraph& P, int i, int j,
                                                 const OverlapOptions& opt = {}) {
  const Rule& r1 = P.rules[i];
  const Rule& r2 = P.rules[j];
  std::vector<Branching> out;
  std::set<std::string> seen_source;
  std::set<std::string> seen_pair;
  const int w1 = static_cast<int>(r1.lhs.src.size());
  const int w2 = static_cast<int>(r2.lhs.src.size());
  for (int delta = -(w2 + 1); delta <= w1 + 1; ++delta) {
    const int a0 = std::max(0, -delta);
    const int b0 = std::max(0, delta);
    std::vector<std::vector<detail::MergeItem>> merged;
    std::vector<detail::MergeItem> acc;
    detail::merge_interleavings(r1.lhs.sl, r2.lhs.sl, a0, b0, 0, 0, 0, acc, opt, merged);
    for (const auto& items : merged) {
      auto um = detail::assemble_union(*P.ct, r1, r2, items, a0, b0);
      if (!um) continue;
      auto [sgn, canon] = canonicalize(*um);
      if (sgn == 0) continue;
      const std::string skey = print_diagram(canon);
      if (!seen_source.insert(skey).second) continue;
      const auto ms1 = find_matches(r1.lhs, canon);
      const auto ms2 = (i == j) ? ms1 : find_matches(r2.lhs, canon);
      for (const auto& ma : ms1)
        for (const auto& mb : ms2) {
          if (i == j && ma.members == mb.members) continue;
          if (i == j && mb.members < ma.members) continue;
          if (classify(i, j, ma, mb) != BranchKind::Overlap) continue;
          std::vector<int> uni = ma.members;
          uni.insert(uni.end(), mb.members.begin(), mb.members.end());
          std::sort(uni.begin(), uni.end());
          uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
          if (static_cast<int>(uni.size()) != canon.levels()) continue;
          const std::string bkey =
              skey + "|" + detail::members_key(ma.members) + "|" + detail::members_key(mb.members);
          if (!seen_pair.insert(bkey).second) continue;
          Branching b;
          b.source = canon;
          b.rule1 = i;
          b.rule2 = j;
          b.m1 = ma;
          b.m2 = mb;
          b.kind = BranchKind::Overlap;
          b.left.start = lin_single(canon);
          b.left.entries.push_back({r1.name, r1.params, ma.level, ma.shift, ma.sign, canon});
          b.right.start = lin_single(canon);
          b.right.entries.push_back({r2.name, r2.params, mb.level, mb.shift, mb.sign, canon});
          out.push_back(std::move(b));
        }
    }
  }
  return out;
}

inline std::vector<Branching> enumerate_overlaps(const Polygraph& P,
                                                 const OverlapOptions& opt = {}) {
  std::vector<Branching> out;
  for (int i = 0; i < static_cast<int>(P.rules.size()); ++i)
    for (int j = i; j < static_cast<int>(P.rules.size()); ++j) {
      auto part = enumerate_overlaps(P, i, j, opt);
      out.insert(out.end(), part.begin(), part.end());
    }
  return out;
}

// ---------------------------------------------------------------------------
// Joinability
// ---------------------------------------------------------------------------

inline LinComb branching_leg(const Polygraph& P, const Branching& b, int which) {
  const Rule& r = P.rules[which == 1 ? b.rule1 : b.rule2];
  const Match& mt = which == 1 ? b.m1 : b.m2;
  return apply_match(r, b.source, mt, 1);
}

struct JoinResult {
  bool joined = false;
  bool fuel_exhausted = false;
  LinComb nf1, nf2;
  long steps = 0;
};

// Normalizes both legs; on a terminating rule set equality of the normal
// forms decides joinability.
inline JoinResult check_joinable(const Polygraph& P, const Branching& b, long fuel = -1,
                                 const std::vector<int>* which = nullptr) {
  JoinResult out;
  NormalizeResult n1 =
      normalize(P, branching_leg(P, b, 1), Strategy::FirstTermFirstRule, fuel, which);
  NormalizeResult n2 =
      normalize(P, branching_leg(P, b, 2), Strategy::FirstTermFirstRule, fuel, which);
  out.nf1 = n1.value;
  out.nf2 = n2.value;
  out.steps = n1.steps + n2.steps;
  out.fuel_exhausted = n1.fuel_exhausted || n2.fuel_exhausted;
  out.joined = !out.fuel_exhausted && n1.value.terms == n2.value.terms;
  return out;
}

inline LinComb e_normalize(const ModuloSystem& S, const LinComb& c, long fuel = -1) {
  const std::vector<int> e_only = S.P.rule_indices(true, false);
  return normalize(S.P, c, Strategy::FirstTermFirstRule, fuel, &e_only).value;
}

// One-step successors under rewriting modulo: every non-E rule applied at
// every occurrence exposed by some E-representative of some support term.
inline std::vector<LinComb> modulo_successors(const ModuloSystem& S, const LinComb& c) {
  std::vector<LinComb> out;
  const std::vector<int> r_only = S.P.rule_indices(false, true);
  for (const auto& m : lin_support(c)) {
    const Rat coef = c.terms.at(m);
    for (const auto& [rep, sgn] : e_reps(S, m)) {
      for (int idx : r_only) {
        for (const auto& mt : find_matches(S.P.rules[idx].lhs, rep)) {
          LinComb repl = apply_match(S.P.rules[idx], rep, mt, sgn);
          LinComb rest = c;
          rest.terms.erase(m);
          out.push_back(lin_add(rest, lin_scale(repl, coef)));
        }
      }
    }
  }
  return out;
}

// Joinability modulo E: first compares the quasi-normal forms of both legs,
// then falls back to a bounded two-sided search over modulo steps keyed by
// E-normal forms.
inline bool check_joinable_modulo(const ModuloSystem& S, const LinComb& leg1,
                                  const LinComb& leg2, int depth = 12,
                                  std::size_t max_states = 20000) {
  QnfResult q1 = normalize_modulo(S, leg1);
  QnfResult q2 = normalize_modulo(S, leg2);
  if (!q1.fuel_exhausted && !q2.fuel_exhausted &&
      e_normalize(S, q1.value).terms == e_normalize(S, q2.value).terms)
    return true;

  auto key = [](const LinComb& c) { return lin_str(c); };
  std::map<std::string, LinComb> vis1, vis2, f1, f2;
  const LinComb n1 = e_normalize(S, leg1);
  const LinComb n2 = e_normalize(S, leg2);
  vis1[key(n1)] = n1;
  vis2[key(n2)] = n2;
  if (vis1.count(key(n2))) return true;
  f1 = vis1;
  f2 = vis2;
  for (int d = 0; d < depth; ++d) {
    const bool pick1 = !f1.empty() && (f2.empty() || f1.size() <= f2.size());
    auto& fr = pick1 ? f1 : f2;
    auto& vis = pick1 ? vis1 : vis2;
    auto& other = pick1 ? vis2 : vis1;
    if (fr.empty()) break;
    std::map<std::string, LinComb> next;
    for (const auto& [k, c] : fr) {
      for (auto& s : modulo_successors(S, c)) {
        LinComb sn = e_normalize(S, s);
        const std::string sk = key(sn);
        if (other.count(sk)) return true;
        if (vis.count(sk) || next.count(sk)) continue;
        if (vis.size() + next.size() >= max_states) return false;
        next.emplace(sk, std::move(sn));
      }
    }
    for (auto& [k, v] : next) vis[k] = v;
    fr = std::move(next);
  }
  return false;
}

inline bool check_joinable_modulo(const ModuloSystem& S, const Branching& b, int depth = 12,
                                  std::size_t max_states = 20000) {
  return check_joinable_modulo(S, branching_leg(S.P, b, 1), branching_leg(S.P, b, 2), depth,
                               max_states);
}

// All one-step reducts of a monomial, one per rule occurrence; a convergent
// system sends them all to one normal form.
inline std::vector<LinComb> one_step_reducts(const Polygraph& P, const Monomial& m) {
  std::vector<LinComb> out;
  for (int idx = 0; idx < static_cast<int>(P.rules.size()); ++idx)
    for (const auto& mt : find_matches(P.rules[idx].lhs, m))
      out.push_back(apply_match(P.rules[idx], m, mt, 1));
  return out;
}

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

struct BranchingReport {
  std::string rule1, rule2;
  std::string source;
  BranchKind kind = BranchKind::Overlap;
  bool joined = false;
  long steps = 0;
};

inline std::vector<BranchingReport> confluence_report(const Polygraph& P,
                                                      const OverlapOptions& opt = {},
                                                      long fuel = -1) {
  std::vector<BranchingReport> out;
  for (const auto& b : enumerate_overlaps(P, opt)) {
    JoinResult jr = check_joinable(P, b, fuel);
    BranchingReport rep;
    rep.rule1 = rule_label(P.rules[b.rule1]);
    rep.rule2 = rule_label(P.rules[b.rule2]);
    rep.source = print_diagram(b.source);
    rep.kind = b.kind;
    rep.joined = jr.joined;
    rep.steps = jr.steps;
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace sdrw
