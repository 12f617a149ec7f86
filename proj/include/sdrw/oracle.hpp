#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "scalars.hpp"

namespace sdrw {

// ---------------------------------------------------------------------------
// Relation-presented associative superalgebras
// ---------------------------------------------------------------------------
//
// An independent check for diagram bases: algebras are given by generators
// and relations on plain words, with no diagram machinery involved. Words are
// straightened with rules oriented by a degree-then-lex order; a diamond scan
// over short words certifies that straightening is well defined, after which
// irreducible words form a basis of the quotient.

using AWord = std::vector<int>;  // letters are generator ids
using WordComb = std::map<AWord, Rat>;

struct AlgebraGen {
  std::string name;
  long degree = 0;
  int parity = 0;
};

struct PresentedAlgebra {
  std::vector<AlgebraGen> gens;
  std::vector<WordComb> relations;  // each combination equals zero
  long truncation = 10;
};

struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline long word_degree(const PresentedAlgebra& A, const AWord& w) {
  long d = 0;
  for (int g : w) d += A.gens[g].degree;
  return d;
}

inline std::string word_str(const PresentedAlgebra& A, const AWord& w) {
  if (w.empty()) return "1";
  std::string out;
  for (int g : w) {
    if (!out.empty()) out += " ";
    out += A.gens[g].name;
  }
  return out;
}

namespace detail {

// degree-then-lex word order; later generator ids dominate
inline bool word_less(const AWord& a, const AWord& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

inline void comb_add(WordComb& acc, const AWord& w, const Rat& c) {
  auto it = acc.find(w);
  if (it == acc.end()) {
    if (c != 0) acc.emplace(w, c);
    return;
  }
  it->second += c;
  if (it->second == 0) acc.erase(it);
}

}  // namespace detail

class Straightener {
 public:
  explicit Straightener(const PresentedAlgebra& A) : A_(&A) {
    for (const WordComb& rel : A.relations) {
      if (rel.empty()) continue;
      long deg = word_degree(A, rel.begin()->first);
      const AWord* lead = nullptr;
      for (const auto& [w, c] : rel) {
        if (word_degree(A, w) != deg) throw OracleError("inhomogeneous relation");
        if (!lead || detail::word_less(*lead, w)) lead = &w;
      }
      const Rat lc = rel.at(*lead);
      WordComb rest;
      for (const auto& [w, c] : rel)
        if (w != *lead) detail::comb_add(rest, w, -c / lc);
      if (!rules_.emplace(*lead, std::move(rest)).second)
        throw OracleError("conflicting leading words");
      max_lhs_ = std::max(max_lhs_, static_cast<int>(lead->size()));
    }
  }

  const PresentedAlgebra& algebra() const { return *A_; }

  bool reducible(const AWord& w) const { return find_redex(w).has_value(); }

  WordComb cf(const AWord& w) const {
    auto hit = memo_.find(w);
    if (hit != memo_.end()) return hit->second;
    WordComb out;
    const auto redex = find_redex(w);
    if (!redex) {
      out.emplace(w, 1);
    } else {
      for (const auto& [t, c] : rewrite_at(w, redex->first, redex->second)) {
        const WordComb sub = cf(t);
        for (const auto& [u, cu] : sub) detail::comb_add(out, u, c * cu);
      }
    }
    memo_.emplace(w, out);
    return out;
  }

  WordComb cf(const WordComb& comb) const {
    WordComb out;
    for (const auto& [w, c] : comb) {
      for (const auto& [u, cu] : cf(w)) detail::comb_add(out, u, c * cu);
    }
    return out;
  }

  // Rewrites every word of length at most maxlen by every applicable rule as
  // a first step and compares the resulting normal forms. All rule overlaps
  // live inside such windows, so agreement certifies unique normal forms.
  std::optional<std::string> diamond_witness(int maxlen) const {
    const int G = static_cast<int>(A_->gens.size());
    AWord w;
    std::optional<std::string> bad;
    auto visit = [&](auto&& self) -> bool {
      if (!w.empty()) {
        std::vector<std::pair<int, const AWord*>> steps;
        for (int p = 0; p < static_cast<int>(w.size()); ++p) {
          for (const auto& [lhs, rest] : rules_) {
            if (matches_at(w, p, lhs)) steps.push_back({p, &lhs});
          }
        }
        if (steps.size() > 1) {
          const WordComb ref = cf(w);
          for (const auto& [p, lhs] : steps) {
            WordComb got;
            for (const auto& [t, c] : rewrite_at(w, p, *lhs)) {
              for (const auto& [u, cu] : cf(t)) detail::comb_add(got, u, c * cu);
            }
            if (got != ref) {
              bad = word_str(*A_, w);
              return false;
            }
          }
        }
      }
      if (static_cast<int>(w.size()) == maxlen) return true;
      for (int g = 0; g < G; ++g) {
        w.push_back(g);
        const bool ok = self(self);
        w.pop_back();
        if (!ok) return false;
      }
      return true;
    };
    visit(visit);
    if (!bad) certified_ = true;
    return bad;
  }

  bool certified() const { return certified_; }

  // Irreducible words of the given degree, up to the length cap.
  std::vector<AWord> irreducible_words(long degree, int len_cap) const {
    std::vector<AWord> out;
    const int G = static_cast<int>(A_->gens.size());
    AWord w;
    auto visit = [&](auto&& self, long deg) -> void {
      if (deg == degree) out.push_back(w);
      if (static_cast<int>(w.size()) == len_cap) return;
      for (int g = 0; g < G; ++g) {
        w.push_back(g);
        bool redex = false;
        const int L = static_cast<int>(w.size());
        for (int len = 1; len <= std::min(max_lhs_, L) && !redex; ++len) {
          AWord tail(w.end() - len, w.end());
          redex = rules_.count(tail) > 0;
        }
        if (!redex) self(self, deg + A_->gens[g].degree);
        w.pop_back();
      }
    };
    visit(visit, 0);
    return out;
  }

 private:
  std::optional<std::pair<int, AWord>> find_redex(const AWord& w) const {
    for (int p = 0; p < static_cast<int>(w.size()); ++p) {
      for (int len = 1; len <= max_lhs_ && p + len <= static_cast<int>(w.size()); ++len) {
        AWord window(w.begin() + p, w.begin() + p + len);
        if (rules_.count(window)) return {{p, window}};
      }
    }
    return std::nullopt;
  }

  bool matches_at(const AWord& w, int p, const AWord& lhs) const {
    if (p + lhs.size() > w.size()) return false;
    return std::equal(lhs.begin(), lhs.end(), w.begin() + p);
  }

  WordComb rewrite_at(const AWord& w, int p, const AWord& lhs) const {
    WordComb out;
    for (const auto& [t, c] : rules_.at(lhs)) {
      AWord nw(w.begin(), w.begin() + p);
      nw.insert(nw.end(), t.begin(), t.end());
      nw.insert(nw.end(), w.begin() + p + lhs.size(), w.end());
      detail::comb_add(out, nw, c);
    }
    return out;
  }

  const PresentedAlgebra* A_;
  std::map<AWord, WordComb> rules_;
  int max_lhs_ = 0;
  mutable std::map<AWord, WordComb> memo_;
  mutable bool certified_ = false;
};

// ---------------------------------------------------------------------------
// Dimensions
// ---------------------------------------------------------------------------

inline int graded_dimension(const Straightener& S, long degree, int len_cap) {
  if (std::abs(degree) > S.algebra().truncation) throw OracleError("TruncationExceeded");
  if (!S.certified()) throw OracleError("straightening not certified");
  return static_cast<int>(S.irreducible_words(degree, len_cap).size());
}

// Literal degree-truncated model: all words of the degree up to the length
// cap, modulo every product (word . relation . word) that fits, by exact row
// reduction. Converges to the quotient dimension from above as the cap grows
// and needs no confluence certificate.
inline int truncated_dimension(const PresentedAlgebra& A, long degree, int len_cap) {
  if (std::abs(degree) > A.truncation) throw OracleError("TruncationExceeded");
  const int G = static_cast<int>(A.gens.size());
  std::map<AWord, int> col;
  std::vector<AWord> words;
  AWord w;
  auto gather = [&](auto&& self, long deg) -> void {
    if (deg == degree) {
      col.emplace(w, static_cast<int>(words.size()));
      words.push_back(w);
    }
    if (static_cast<int>(w.size()) == len_cap) return;
    for (int g = 0; g < G; ++g) {
      w.push_back(g);
      self(self, deg + A.gens[g].degree);
      w.pop_back();
    }
  };
  gather(gather, 0);

  std::vector<std::map<int, Rat>> rows;
  auto words_upto = [G](int maxlen) {
    std::vector<AWord> out{{}};
    size_t start = 0;
    for (int len = 1; len <= maxlen; ++len) {
      const size_t end = out.size();
      for (size_t k = start; k < end; ++k) {
        for (int g = 0; g < G; ++g) {
          AWord nw = out[k];
          nw.push_back(g);
          out.push_back(std::move(nw));
        }
      }
      start = end;
    }
    return out;
  };
  for (const WordComb& rel : A.relations) {
    if (rel.empty()) continue;
    int rel_len = 0;
    for (const auto& [t, c] : rel) rel_len = std::max(rel_len, static_cast<int>(t.size()));
    const int budget = len_cap - rel_len;
    if (budget < 0) continue;
    const std::vector<AWord> frame = words_upto(budget);
    for (const AWord& left : frame) {
      for (const AWord& right : frame) {
        if (static_cast<int>(left.size() + right.size()) > budget) continue;
        std::map<int, Rat> row;
        bool in_range = true;
        for (const auto& [t, c] : rel) {
          AWord prod = left;
          prod.insert(prod.end(), t.begin(), t.end());
          prod.insert(prod.end(), right.begin(), right.end());
          auto it = col.find(prod);
          if (it == col.end()) {
            in_range = false;
            break;
          }
          Rat& cell = row[it->second];
          cell += c;
          if (cell == 0) row.erase(it->second);
        }
        if (in_range && !row.empty()) rows.push_back(std::move(row));
      }
    }
  }

  int rank = 0;
  std::map<int, std::map<int, Rat>> pivots;
  for (auto& row : rows) {
    while (!row.empty()) {
      const int lead = row.begin()->first;
      auto piv = pivots.find(lead);
      if (piv == pivots.end()) {
        const Rat inv = Rat(1) / row.begin()->second;
        for (auto& [k, v] : row) v *= inv;
        pivots.emplace(lead, std::move(row));
        ++rank;
        break;
      }
      const Rat f = row.begin()->second;
      for (const auto& [k, v] : piv->second) {
        Rat& cell = row[k];
        cell -= f * v;
        if (cell == 0) row.erase(k);
      }
    }
  }
  return static_cast<int>(words.size()) - rank;
}

// ---------------------------------------------------------------------------
// Verification entry points
// ---------------------------------------------------------------------------

inline bool verify_identity(const Straightener& S, const WordComb& lhs, const WordComb& rhs) {
  return S.cf(lhs) == S.cf(rhs);
}

struct BasisReport {
  long degree = 0;
  int sample_count = 0;
  int oracle_dim = 0;
  bool independent = false;
  bool ok = false;
  std::string note;
};

// The caller maps its normal-form monomials to word combinations; the oracle
// checks the count against its own dimension and row-reduces the images.
inline BasisReport verify_basis_degree(const Straightener& S, long degree,
                                       const std::vector<WordComb>& images, int len_cap) {
  BasisReport rep;
  rep.degree = degree;
  rep.sample_count = static_cast<int>(images.size());
  rep.oracle_dim = graded_dimension(S, degree, len_cap);
  std::map<AWord, int> col;
  std::vector<std::map<int, Rat>> rows;
  for (const WordComb& img : images) {
    std::map<int, Rat> row;
    for (const auto& [w, c] : S.cf(img)) {
      const auto [it, fresh] = col.emplace(w, static_cast<int>(col.size()));
      row[it->second] = c;
    }
    rows.push_back(std::move(row));
  }
  int rank = 0;
  std::map<int, std::map<int, Rat>> pivots;
  for (auto& row : rows) {
    while (!row.empty()) {
      const int lead = row.begin()->first;
      auto piv = pivots.find(lead);
      if (piv == pivots.end()) {
        const Rat inv = Rat(1) / row.begin()->second;
        for (auto& [k, v] : row) v *= inv;
        pivots.emplace(lead, std::move(row));
        ++rank;
        break;
      }
      const Rat f = row.begin()->second;
      for (const auto& [k, v] : piv->second) {
        Rat& cell = row[k];
        cell -= f * v;
        if (cell == 0) row.erase(k);
      }
    }
  }
  rep.independent = rank == rep.sample_count;
  rep.ok = rep.independent && rep.sample_count == rep.oracle_dim;
  if (!rep.independent)
    rep.note = "images have rank " + std::to_string(rank);
  else if (!rep.ok)
    rep.note = "count " + std::to_string(rep.sample_count) + " vs dim " +
               std::to_string(rep.oracle_dim);
  return rep;
}

// ---------------------------------------------------------------------------
// The crossing-and-dot tower
// ---------------------------------------------------------------------------
//
// Generators: n odd dots of degree 2 (ids 0..n-1), n-1 odd crossings of
// degree -2 (ids n..2n-2). Listing the dots first makes the derived
// orientation push dots left and sort both families.

inline int onh_x(int n, int i) {
  (void)n;
  return i - 1;
}
inline int onh_d(int n, int i) { return n + i - 1; }

inline PresentedAlgebra onh_algebra(int n, long truncation = 10) {
  PresentedAlgebra A;
  A.truncation = truncation;
  for (int i = 1; i <= n; ++i) A.gens.push_back({"x" + std::to_string(i), 2, 1});
  for (int i = 1; i < n; ++i) A.gens.push_back({"d" + std::to_string(i), -2, 1});
  auto rel = [&A](std::initializer_list<std::pair<AWord, Rat>> terms) {
    WordComb r;
    for (const auto& [w, c] : terms) detail::comb_add(r, w, c);
    A.relations.push_back(std::move(r));
  };
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      rel({{{onh_x(n, j), onh_x(n, i)}, 1}, {{onh_x(n, i), onh_x(n, j)}, 1}});
    }
  }
  for (int i = 1; i < n; ++i) {
    rel({{{onh_d(n, i), onh_x(n, i)}, 1}, {{onh_x(n, i + 1), onh_d(n, i)}, 1}, {{}, -1}});
    rel({{{onh_d(n, i), onh_x(n, i + 1)}, 1}, {{onh_x(n, i), onh_d(n, i)}, 1}, {{}, -1}});
    for (int j = 1; j <= n; ++j) {
      if (j == i || j == i + 1) continue;
      rel({{{onh_d(n, i), onh_x(n, j)}, 1}, {{onh_x(n, j), onh_d(n, i)}, 1}});
    }
    rel({{{onh_d(n, i), onh_d(n, i)}, 1}});
  }
  for (int i = 1; i < n; ++i) {
    for (int j = i + 2; j < n; ++j) {
      rel({{{onh_d(n, j), onh_d(n, i)}, 1}, {{onh_d(n, i), onh_d(n, j)}, 1}});
    }
    if (i + 1 < n) {
      rel({{{onh_d(n, i + 1), onh_d(n, i), onh_d(n, i + 1)}, 1},
           {{onh_d(n, i), onh_d(n, i + 1), onh_d(n, i)}, -1}});
    }
  }
  return A;
}

// Longest crossing word has n(n-1)/2 letters; irreducible words of a given
// degree fit under this cap.
inline int onh_length_cap(int n, long degree) {
  const int lmax = n * (n - 1) / 2;
  const long dots = (degree + 2 * lmax) / 2;
  return static_cast<int>(std::max(0L, dots) + lmax);
}

// Independent closed count: pairs of a permutation and a dot multi-index.
inline int onh_predicted_dimension(int n, long degree) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  int total = 0;
  do {
    int inv = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (perm[a] > perm[b]) ++inv;
    const long twice_dots = degree + 2 * inv;
    if (twice_dots < 0 || twice_dots % 2) continue;
    const long k = twice_dots / 2;
    long ways = 1;
    for (long t = 1; t < n; ++t) ways = ways * (k + t) / t;
    total += static_cast<int>(ways);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

}  // namespace sdrw
