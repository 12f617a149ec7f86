#pragma once

#include <map>
#include <optional>
#include <sstream>

#include "diagrams.hpp"

namespace sdrw {

// Finitely supported Monomial -> Rat map with a shared boundary.
// Monomial keys are always canonical exchange representatives.
struct LinComb {
  Word src, tgt;
  Weight lam;
  const Cartan* ct = nullptr;
  std::map<Monomial, Rat> terms;

  bool zero() const { return terms.empty(); }

  friend bool operator==(const LinComb& a, const LinComb& b) {
    return a.src == b.src && a.tgt == b.tgt && a.lam == b.lam && a.terms == b.terms;
  }
};

inline LinComb lin_zero(const Cartan& ct, const Word& src, const Word& tgt, const Weight& lam) {
  LinComb lc;
  lc.ct = &ct;
  lc.src = src;
  lc.tgt = tgt;
  lc.lam = lam;
  return lc;
}

// Canonicalizes and accumulates; drops terms with zero coefficient.
inline void lin_insert(LinComb& lc, const Rat& coef, const Monomial& m) {
  if (coef == 0) return;
  auto [s, c] = canonicalize(m);
  if (s == 0) return;
  if (c.src != lc.src || c.lam != lc.lam || target_word(c) != lc.tgt)
    throw DiagramError("LinComb: term boundary mismatch");
  auto it = lc.terms.find(c);
  if (it == lc.terms.end()) {
    lc.terms.emplace(std::move(c), coef * s);
  } else {
    it->second += coef * s;
    if (it->second == 0) lc.terms.erase(it);
  }
}

inline LinComb lin_single(const Monomial& m, const Rat& coef = 1) {
  LinComb lc = lin_zero(*m.ct, m.src, target_word(m), m.lam);
  lin_insert(lc, coef, m);
  return lc;
}

inline LinComb lin_add(const LinComb& a, const LinComb& b) {
  if (a.src != b.src || a.tgt != b.tgt || a.lam != b.lam)
    throw DiagramError("LinComb add: boundary mismatch");
  LinComb out = a;
  for (const auto& [m, c] : b.terms) {
    auto it = out.terms.find(m);
    if (it == out.terms.end()) out.terms.emplace(m, c);
    else {
      it->second += c;
      if (it->second == 0) out.terms.erase(it);
    }
  }
  return out;
}

inline LinComb lin_scale(const LinComb& a, const Rat& k) {
  LinComb out = lin_zero(*a.ct, a.src, a.tgt, a.lam);
  if (k == 0) return out;
  for (const auto& [m, c] : a.terms) out.terms.emplace(m, c * k);
  return out;
}

inline LinComb lin_sub(const LinComb& a, const LinComb& b) { return lin_add(a, lin_scale(b, -1)); }

inline std::vector<Monomial> lin_support(const LinComb& a) {
  std::vector<Monomial> out;
  out.reserve(a.terms.size());
  for (const auto& [m, c] : a.terms) out.push_back(m);
  return out;
}

inline LinComb lin_vcompose(const LinComb& a, const LinComb& b) {
  LinComb out = lin_zero(*a.ct, a.src, b.tgt, a.lam);
  for (const auto& [ma, ca] : a.terms)
    for (const auto& [mb, cb] : b.terms) lin_insert(out, ca * cb, vcompose(ma, mb));
  return out;
}

inline LinComb lin_hcompose(const LinComb& a, const LinComb& b) {
  LinComb out;
  bool first = true;
  for (const auto& [ma, ca] : a.terms)
    for (const auto& [mb, cb] : b.terms) {
      Monomial m = hcompose(ma, mb);
      if (first) {
        out = lin_zero(*m.ct, m.src, target_word(m), m.lam);
        first = false;
      }
      lin_insert(out, ca * cb, m);
    }
  if (first) throw DiagramError("LinComb hcompose of empty combinations is ambiguous");
  return out;
}

inline LinComb lin_whisker(const LinComb& a, const Word& wl, const Word& wr) {
  Weight lam = a.lam;
  for (char c : wr) {
    const int j = letter_idx(c);
    const int dir = letter_up(c) ? 1 : -1;
    for (int i = 0; i < a.ct->rank(); ++i) lam[i] -= dir * a.ct->aij(i, j);
  }
  LinComb out = lin_zero(*a.ct, wl + a.src + wr, wl + a.tgt + wr, lam);
  for (const auto& [m, c] : a.terms) lin_insert(out, c, whisker(m, wl, wr));
  return out;
}

inline std::optional<int> lin_qdegree(const LinComb& a) {
  std::optional<int> d;
  for (const auto& [m, c] : a.terms) {
    const int q = qdegree(m);
    if (!d) d = q;
    else if (*d != q) return std::nullopt;
  }
  return d;
}

inline std::optional<int> lin_parity(const LinComb& a) {
  std::optional<int> p;
  for (const auto& [m, c] : a.terms) {
    const int q = parity(m);
    if (!p) p = q;
    else if (*p != q) return std::nullopt;
  }
  return p;
}

// Deterministic text form: "(c1) t1 + (c2) t2 + ..." in canonical key order,
// "0 @ boundary" when empty.
inline std::string lin_str(const LinComb& a) {
  if (a.terms.empty()) {
    std::ostringstream os;
    os << "0 : [" << print_word(a.src, *a.ct) << "] -> [" << print_word(a.tgt, *a.ct) << "]";
    return os.str();
  }
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : a.terms) {
    if (!first) os << " + ";
    first = false;
    os << "(" << rat_str(c) << ") " << print_diagram(m);
  }
  return os.str();
}

}  // namespace sdrw
