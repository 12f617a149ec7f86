#pragma once

#include "polygraph.hpp"

namespace sdrw {

// ---------------------------------------------------------------------------
// Derivations
// ---------------------------------------------------------------------------

using Vals = std::vector<long>;

// A derivation assigns a value to every diagram: strand labels flow upward
// through X (covariant) and downward through Y (contravariant), and each
// slice contributes d(slice, labels below its inputs, labels above its
// outputs). Weight maps are the special case where nothing depends on the
// labels; those are context-stable counters.
struct Derivation {
  std::string name;
  bool uses_values = true;
  std::function<Vals(const Slice&, const Vals&)> X;  // input labels -> output labels
  std::function<Vals(const Slice&, const Vals&)> Y;  // output labels -> input labels
  std::function<long(const Slice&, const Vals&, const Vals&)> d;
};

inline Vals zeros(size_t n) { return Vals(n, 0); }

inline Derivation weight_map(std::string name, std::function<long(const Slice&)> w) {
  Derivation D;
  D.name = std::move(name);
  D.uses_values = false;
  D.X = [](const Slice& s, const Vals&) { return zeros(out_width(s.g)); };
  D.Y = [](const Slice& s, const Vals&) { return zeros(in_width(s.g)); };
  D.d = [w = std::move(w)](const Slice& s, const Vals&, const Vals&) { return w(s); };
  return D;
}

inline long eval_derivation(const Derivation& D, const Monomial& m, const Vals& xsrc,
                            const Vals& ytgt) {
  const int L = m.levels();
  std::vector<Vals> xin(L), yout(L);
  Vals cur = xsrc;
  for (int k = 0; k < L; ++k) {
    const Slice& s = m.sl[k];
    const int p0 = is_bubble(s.g) ? s.pos : s.pos - 1;
    const int iw = in_width(s.g), ow = out_width(s.g);
    xin[k].assign(cur.begin() + p0, cur.begin() + p0 + iw);
    Vals outv = D.X(s, xin[k]);
    if (static_cast<int>(outv.size()) != ow) throw std::logic_error(D.name + ": X arity");
    cur.erase(cur.begin() + p0, cur.begin() + p0 + iw);
    cur.insert(cur.begin() + p0, outv.begin(), outv.end());
  }
  Vals curY = ytgt;
  for (int k = L - 1; k >= 0; --k) {
    const Slice& s = m.sl[k];
    const int p0 = is_bubble(s.g) ? s.pos : s.pos - 1;
    const int iw = in_width(s.g), ow = out_width(s.g);
    yout[k].assign(curY.begin() + p0, curY.begin() + p0 + ow);
    Vals inv = D.Y(s, yout[k]);
    if (static_cast<int>(inv.size()) != iw) throw std::logic_error(D.name + ": Y arity");
    curY.erase(curY.begin() + p0, curY.begin() + p0 + ow);
    curY.insert(curY.begin() + p0, inv.begin(), inv.end());
  }
  long total = 0;
  for (int k = 0; k < L; ++k) total += D.d(m.sl[k], xin[k], yout[k]);
  return total;
}

// Measures compared lexicographically, one per termination stage.
struct Measure {
  std::string name;
  std::vector<Derivation> parts;
};

inline Measure measure_of(Derivation D) {
  Measure m;
  m.name = D.name;
  m.parts.push_back(std::move(D));
  return m;
}

inline Vals eval_measure(const Measure& M, const Monomial& m, const Vals& xsrc, const Vals& ytgt) {
  Vals out;
  out.reserve(M.parts.size());
  for (const auto& D : M.parts) out.push_back(eval_derivation(D, m, xsrc, ytgt));
  return out;
}

// ---------------------------------------------------------------------------
// Decrease checks on a boundary-label grid
// ---------------------------------------------------------------------------

enum class Verdict { Strict, Weak, Violated };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Strict: return "strict";
    case Verdict::Weak: return "weak";
    case Verdict::Violated: return "violated";
  }
  return "?";
}

struct DecreaseReport {
  Verdict v = Verdict::Strict;
  Vals witness_x, witness_y;
  std::string witness_term;
};

namespace detail {

inline std::vector<long> grid_axis(int total_strands, long B) {
  std::vector<long> axis;
  if (total_strands <= 4) {
    for (long v = 0; v <= B; ++v) axis.push_back(v);
  } else {
    for (long v : {0L, 1L, 2L, 3L, 5L, 8L, 13L, B})
      if (v <= B && (axis.empty() || axis.back() != v)) axis.push_back(v);
  }
  return axis;
}

inline int lex_cmp(const Vals& a, const Vals& b) {
  for (size_t k = 0; k < a.size(); ++k) {
    if (a[k] != b[k]) return a[k] < b[k] ? -1 : 1;
  }
  return 0;
}

}  // namespace detail

// Compares the measure of the rule LHS against every monomial in the RHS
// support, over all boundary label assignments from the grid. The grid is the
// full box [0,B]^strands for small boundaries and a fixed subsample otherwise.
inline DecreaseReport check_rule_decrease(const Measure& M, const Rule& r, long B = 20) {
  DecreaseReport rep;
  const int ns = static_cast<int>(r.lhs.src.size());
  const int nt = static_cast<int>(target_word(r.lhs).size());
  bool grid_free = true;
  for (const auto& D : M.parts)
    if (D.uses_values) grid_free = false;
  const std::vector<long> axis =
      grid_free ? std::vector<long>{0} : detail::grid_axis(ns + nt, B);
  const int dims = grid_free ? 0 : ns + nt;
  std::vector<size_t> odo(static_cast<size_t>(dims), 0);
  std::vector<std::pair<Monomial, Vals>> rhs_terms;
  for (const auto& [tm, tc] : r.rhs.terms) rhs_terms.push_back({tm, {}});
  bool all_strict = true;
  while (true) {
    Vals xsrc(ns, 0), ytgt(nt, 0);
    for (int k = 0; k < dims; ++k) {
      const long v = axis[odo[k]];
      if (k < ns) xsrc[k] = v;
      else ytgt[k - ns] = v;
    }
    const Vals tl = eval_measure(M, r.lhs, xsrc, ytgt);
    for (auto& [tm, cache] : rhs_terms) {
      const Vals tr = eval_measure(M, tm, xsrc, ytgt);
      const int c = detail::lex_cmp(tr, tl);
      if (c >= 0) {
        all_strict = false;
        if (c > 0) {
          rep.v = Verdict::Violated;
          rep.witness_x = xsrc;
          rep.witness_y = ytgt;
          rep.witness_term = print_diagram(tm);
          return rep;
        }
      }
    }
    int k = 0;
    for (; k < dims; ++k) {
      if (++odo[k] < axis.size()) break;
      odo[k] = 0;
    }
    if (k == dims) break;
  }
  rep.v = all_strict ? Verdict::Strict : Verdict::Weak;
  return rep;
}

// Monotonicity probe for the label maps of a derivation on prototype slices.
inline std::optional<std::string> check_monotone(const Derivation& D,
                                                 const std::vector<Slice>& protos, long B = 8) {
  for (const Slice& s : protos) {
    const int iw = in_width(s.g), ow = out_width(s.g);
    auto scan = [&](int arity, auto&& fn, const char* what) -> std::optional<std::string> {
      Vals v(static_cast<size_t>(arity), 0);
      while (true) {
        const Vals base = fn(v);
        for (int k = 0; k < arity; ++k) {
          Vals v2 = v;
          ++v2[k];
          const Vals up = fn(v2);
          for (size_t t = 0; t < base.size(); ++t)
            if (up[t] < base[t])
              return gen_name(s.g) + std::string(": ") + what + " not monotone";
        }
        int k = 0;
        for (; k < arity; ++k) {
          if (++v[k] <= B) break;
          v[k] = 0;
        }
        if (k == arity) break;
      }
      return std::nullopt;
    };
    if (auto w = scan(iw, [&](const Vals& v) { return D.X(s, v); }, "X")) return w;
    if (auto w = scan(ow, [&](const Vals& v) { return D.Y(s, v); }, "Y")) return w;
    auto df = [&](const Vals& v) {
      Vals xin(v.begin(), v.begin() + iw);
      Vals yo(v.begin() + iw, v.end());
      return Vals{D.d(s, xin, yo)};
    };
    if (auto w = scan(iw + ow, df, "d")) return w;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Staged certificates
// ---------------------------------------------------------------------------

struct Stage {
  std::string name;
  Measure measure;
};

struct StageOutcome {
  std::string stage;
  std::vector<std::string> strict, weak, violated;
};

struct TerminationCertificate {
  bool certified = false;
  std::vector<StageOutcome> stages;
  std::vector<std::string> uncovered;
};

// Runs the stages in order: at each stage every rule not yet strictly covered
// must not increase the stage measure; strictly decreasing rules become
// covered. The certificate holds when no rule violates any stage it is
// checked against and none are left over.
inline TerminationCertificate staged_termination(const Polygraph& P,
                                                 const std::vector<Stage>& stages,
                                                 const std::vector<int>& which, long B = 20) {
  TerminationCertificate cert;
  std::vector<int> remaining = which;
  bool bad = false;
  for (const auto& st : stages) {
    StageOutcome out;
    out.stage = st.name;
    std::vector<int> next;
    for (int idx : remaining) {
      const Rule& r = P.rules[idx];
      const DecreaseReport rep = check_rule_decrease(st.measure, r, B);
      switch (rep.v) {
        case Verdict::Strict: out.strict.push_back(rule_label(r)); break;
        case Verdict::Weak:
          out.weak.push_back(rule_label(r));
          next.push_back(idx);
          break;
        case Verdict::Violated:
          out.violated.push_back(rule_label(r));
          next.push_back(idx);
          bad = true;
          break;
      }
    }
    cert.stages.push_back(std::move(out));
    remaining = std::move(next);
  }
  for (int idx : remaining) cert.uncovered.push_back(rule_label(P.rules[idx]));
  cert.certified = !bad && remaining.empty();
  return cert;
}

inline TerminationCertificate staged_termination(const Polygraph& P,
                                                 const std::vector<Stage>& stages, long B = 20) {
  std::vector<int> all;
  for (int k = 0; k < static_cast<int>(P.rules.size()); ++k) all.push_back(k);
  return staged_termination(P, stages, all, B);
}

}  // namespace sdrw
