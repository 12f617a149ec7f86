#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scalars.hpp"

namespace sdrw {

// ---------------------------------------------------------------------------
// Cartan data
// ---------------------------------------------------------------------------

// Symmetrizable Cartan datum given by the integer bilinear form i.j.
// Index parity |i| is d_i mod 2 with d_i = (i.i)/2.
struct Cartan {
  std::vector<std::vector<int>> dot;

  int rank() const { return static_cast<int>(dot.size()); }
  int ii(int i) const { return dot[i][i]; }
  int ij(int i, int j) const { return dot[i][j]; }
  int di(int i) const { return dot[i][i] / 2; }
  int aij(int i, int j) const { return 2 * dot[i][j] / dot[i][i]; }
  bool odd_index(int i) const { return (di(i) % 2 + 2) % 2 == 1; }

  void validate() const {
    const int n = rank();
    if (n == 0) throw std::invalid_argument("Cartan: empty datum");
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(dot[i].size()) != n)
        throw std::invalid_argument("Cartan: non-square form");
      if (dot[i][i] <= 0 || dot[i][i] % 2 != 0)
        throw std::invalid_argument("Cartan: i.i must be positive even");
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (dot[i][j] != dot[j][i])
          throw std::invalid_argument("Cartan: form not symmetric");
        if (i != j && dot[i][j] > 0)
          throw std::invalid_argument("Cartan: off-diagonal i.j must be <= 0");
        if ((2 * dot[i][j]) % dot[i][i] != 0)
          throw std::invalid_argument("Cartan: a_ij not integral");
      }
  }

  static Cartan rank1_odd() { return Cartan{{{2}}}; }
};

// Integral weight, one coordinate per Cartan index.
using Weight = std::vector<int>;

inline Weight weight_plus_root(const Cartan& ct, Weight w, int j, int dir) {
  for (int i = 0; i < ct.rank(); ++i) w[i] += dir * ct.aij(i, j);
  return w;
}

// ---------------------------------------------------------------------------
// Words of 1-cells
// ---------------------------------------------------------------------------

// A letter packs orientation and Cartan index: up (E-type) strands carry
// odd code, down (F-type) even code.
using Word = std::string;

inline char letter(int idx, bool up) { return static_cast<char>(2 * idx + (up ? 1 : 0) + 1); }
inline bool letter_up(char c) { return ((c - 1) & 1) != 0; }
inline int letter_idx(char c) { return (c - 1) >> 1; }

// Weight of the region at gap g (g strands to the left) of word w, when the
// rightmost region carries lam. Crossing a strand right to left adds or
// subtracts the corresponding root.
inline Weight weight_at_gap(const Cartan& ct, const Weight& lam, const Word& w, int g) {
  Weight out = lam;
  for (int k = static_cast<int>(w.size()) - 1; k >= g; --k) {
    const int j = letter_idx(w[k]);
    const int dir = letter_up(w[k]) ? 1 : -1;
    for (int i = 0; i < ct.rank(); ++i) out[i] += dir * ct.aij(i, j);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generator slices
// ---------------------------------------------------------------------------

enum class Gen : uint8_t {
  UpDot, DownDot, UpCross, DownCross, CapL, CupL, CapR, CupR, BubCCW, BubCW
};

inline const char* gen_name(Gen g) {
  switch (g) {
    case Gen::UpDot: return "updot";
    case Gen::DownDot: return "downdot";
    case Gen::UpCross: return "upcross";
    case Gen::DownCross: return "downcross";
    case Gen::CapL: return "capl";
    case Gen::CupL: return "cupl";
    case Gen::CapR: return "capr";
    case Gen::CupR: return "cupr";
    case Gen::BubCCW: return "ccw_bub";
    case Gen::BubCW: return "cw_bub";
  }
  return "?";
}

// Rank of the generator name in lexicographic order, used as the canonical
// tie-break after the position key.
inline int gen_name_rank(Gen g) {
  switch (g) {
    case Gen::CapL: return 0;       // capl
    case Gen::CapR: return 1;       // capr
    case Gen::BubCCW: return 2;     // ccw_bub
    case Gen::CupL: return 3;       // cupl
    case Gen::CupR: return 4;       // cupr
    case Gen::BubCW: return 5;      // cw_bub
    case Gen::DownCross: return 6;  // downcross
    case Gen::DownDot: return 7;    // downdot
    case Gen::UpCross: return 8;    // upcross
    case Gen::UpDot: return 9;      // updot
  }
  return 10;
}

inline int in_width(Gen g) {
  switch (g) {
    case Gen::UpDot: case Gen::DownDot: return 1;
    case Gen::UpCross: case Gen::DownCross: case Gen::CapL: case Gen::CupL: return 2;
    default: return 0;
  }
}
inline int out_width(Gen g) {
  switch (g) {
    case Gen::UpDot: case Gen::DownDot: return 1;
    case Gen::UpCross: case Gen::DownCross: case Gen::CapR: case Gen::CupR: return 2;
    default: return 0;
  }
}
inline bool is_bubble(Gen g) { return g == Gen::BubCCW || g == Gen::BubCW; }
inline bool is_creation(Gen g) { return g == Gen::CapR || g == Gen::CupR; }
inline bool is_annihilation(Gen g) { return g == Gen::CapL || g == Gen::CupL; }

// One level of a diagram: a single generator whiskered by identities.
// pos is the 1-based column of the leftmost strand the generator touches;
// for bubbles it is the 0-based gap the closed diagram floats in.
// j is the second index of a crossing; dots is the bubble dot tag.
// par caches the slice parity, which is invariant under exchange.
struct Slice {
  Gen g;
  int pos = 1;
  int i = 0;
  int j = 0;
  int dots = 0;
  int par = 0;

  friend bool operator==(const Slice& a, const Slice& b) {
    return a.g == b.g && a.pos == b.pos && a.i == b.i && a.j == b.j && a.dots == b.dots;
  }
  friend auto operator<=>(const Slice& a, const Slice& b) {
    if (auto c = a.g <=> b.g; c != 0) return c;
    if (auto c = a.pos <=> b.pos; c != 0) return c;
    if (auto c = a.i <=> b.i; c != 0) return c;
    if (auto c = a.j <=> b.j; c != 0) return c;
    return a.dots <=> b.dots;
  }
};

inline Slice mk(Gen g, int pos, int i = 0, int dots = 0) {
  Slice s;
  s.g = g;
  s.pos = pos;
  s.i = i;
  s.j = i;
  s.dots = dots;
  return s;
}

// Doubled coordinates: strand column p occupies 2p, the gap left of column p
// sits at 2p-1, the bubble gap g at 2g+1. Closed-interval intersection in
// these coordinates is the exchange blocking relation, except that two
// zero-width footprints meeting at the same gap commute when at least one of
// them is a floating bubble.
struct Foot {
  int lo, hi;  // closed interval; lo == hi for gap points
  bool gap;    // zero width
  bool bub;    // floating closed diagram
};

inline Foot out_foot(const Slice& s) {
  if (is_bubble(s.g)) return {2 * s.pos + 1, 2 * s.pos + 1, true, true};
  const int w = out_width(s.g);
  if (w == 0) return {2 * s.pos - 1, 2 * s.pos - 1, true, false};
  return {2 * s.pos, 2 * (s.pos + w - 1), false, false};
}
inline Foot in_foot(const Slice& s) {
  if (is_bubble(s.g)) return {2 * s.pos + 1, 2 * s.pos + 1, true, true};
  const int w = in_width(s.g);
  if (w == 0) return {2 * s.pos - 1, 2 * s.pos - 1, true, false};
  return {2 * s.pos, 2 * (s.pos + w - 1), false, false};
}

// Whether slice `above` can be exchanged below slice `below`; when legal,
// applies the column adjustment to the moving pair in place.
inline bool exchange_down(Slice& below, Slice& above) {
  const Foot a = out_foot(below);
  const Foot b = in_foot(above);
  if (a.lo == b.lo && a.hi == b.hi && a.gap && b.gap) {
    // Same gap point: allowed only if a floating bubble is involved.
    if (a.bub || b.bub) return true;  // positions unchanged
    return false;
  }
  if (a.lo <= b.hi && b.lo <= a.hi) return false;
  if (b.lo > a.hi) {
    above.pos -= out_width(below.g) - in_width(below.g);
  } else {
    below.pos += out_width(above.g) - in_width(above.g);
  }
  return true;
}

inline bool exchange_legal(const Slice& below, const Slice& above) {
  Slice a = below, b = above;
  return exchange_down(a, b);
}

// ---------------------------------------------------------------------------
// Monomial
// ---------------------------------------------------------------------------

struct DiagramError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Monomial {
  Word src;
  Weight lam;
  std::vector<Slice> sl;
  const Cartan* ct = nullptr;

  int levels() const { return static_cast<int>(sl.size()); }

  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.src == b.src && a.lam == b.lam && a.sl == b.sl;
  }
  friend auto operator<=>(const Monomial& a, const Monomial& b) {
    if (auto c = a.src <=> b.src; c != 0) return c;
    if (auto c = a.lam <=> b.lam; c != 0) return c;
    return a.sl <=> b.sl;
  }
};

// Applies one slice to a word, checking strand types; returns the word above.
inline Word apply_slice(const Slice& s, const Word& w) {
  const int n = static_cast<int>(w.size());
  auto need = [&](bool ok, const char* msg) {
    if (!ok) throw DiagramError(std::string(gen_name(s.g)) + "@" + std::to_string(s.pos) + ": " + msg);
  };
  switch (s.g) {
    case Gen::UpDot:
      need(s.pos >= 1 && s.pos <= n, "column out of range");
      need(letter_up(w[s.pos - 1]) && letter_idx(w[s.pos - 1]) == s.i, "needs an up strand of its index");
      return w;
    case Gen::DownDot:
      need(s.pos >= 1 && s.pos <= n, "column out of range");
      need(!letter_up(w[s.pos - 1]) && letter_idx(w[s.pos - 1]) == s.i, "needs a down strand of its index");
      return w;
    case Gen::UpCross: {
      need(s.pos >= 1 && s.pos + 1 <= n, "columns out of range");
      need(letter_up(w[s.pos - 1]) && letter_up(w[s.pos]), "needs two up strands");
      need(letter_idx(w[s.pos - 1]) == s.i && letter_idx(w[s.pos]) == s.j, "strand indices mismatch");
      Word out = w;
      std::swap(out[s.pos - 1], out[s.pos]);
      return out;
    }
    case Gen::DownCross: {
      need(s.pos >= 1 && s.pos + 1 <= n, "columns out of range");
      need(!letter_up(w[s.pos - 1]) && !letter_up(w[s.pos]), "needs two down strands");
      need(letter_idx(w[s.pos - 1]) == s.i && letter_idx(w[s.pos]) == s.j, "strand indices mismatch");
      Word out = w;
      std::swap(out[s.pos - 1], out[s.pos]);
      return out;
    }
    case Gen::CapL: {
      need(s.pos >= 1 && s.pos + 1 <= n, "columns out of range");
      need(!letter_up(w[s.pos - 1]) && letter_up(w[s.pos]), "needs F then E");
      need(letter_idx(w[s.pos - 1]) == s.i && letter_idx(w[s.pos]) == s.i, "strand indices mismatch");
      Word out = w;
      out.erase(s.pos - 1, 2);
      return out;
    }
    case Gen::CupL: {
      need(s.pos >= 1 && s.pos + 1 <= n, "columns out of range");
      need(letter_up(w[s.pos - 1]) && !letter_up(w[s.pos]), "needs E then F");
      need(letter_idx(w[s.pos - 1]) == s.i && letter_idx(w[s.pos]) == s.i, "strand indices mismatch");
      Word out = w;
      out.erase(s.pos - 1, 2);
      return out;
    }
    case Gen::CapR: {
      need(s.pos >= 1 && s.pos <= n + 1, "column out of range");
      Word out = w;
      out.insert(static_cast<size_t>(s.pos - 1), {letter(s.i, false), letter(s.i, true)});
      return out;
    }
    case Gen::CupR: {
      need(s.pos >= 1 && s.pos <= n + 1, "column out of range");
      Word out = w;
      out.insert(static_cast<size_t>(s.pos - 1), {letter(s.i, true), letter(s.i, false)});
      return out;
    }
    case Gen::BubCCW:
    case Gen::BubCW:
      need(s.pos >= 0 && s.pos <= n, "gap out of range");
      need(s.dots >= 0, "negative dot tag");
      return w;
  }
  throw DiagramError("unknown generator");
}

inline Word target_word(const Monomial& m) {
  Word w = m.src;
  for (const auto& s : m.sl) w = apply_slice(s, w);
  return w;
}

// Word at the bottom of level k (k slices applied).
inline Word word_at_level(const Monomial& m, int k) {
  Word w = m.src;
  for (int t = 0; t < k; ++t) w = apply_slice(m.sl[t], w);
  return w;
}

// Weight of the region just right of the slice at level k.
inline Weight local_weight(const Monomial& m, int k) {
  const Word w = word_at_level(m, k);
  const Slice& s = m.sl[k];
  int gap;
  if (is_bubble(s.g)) gap = s.pos;
  else gap = s.pos - 1 + in_width(s.g);
  return weight_at_gap(*m.ct, m.lam, w, gap);
}

inline int slice_parity(const Cartan& ct, const Slice& s, const Weight& loc) {
  const int oi = ct.odd_index(s.i) ? 1 : 0;
  switch (s.g) {
    case Gen::UpDot: case Gen::DownDot: return oi;
    case Gen::UpCross: case Gen::DownCross:
      return (oi * (ct.odd_index(s.j) ? 1 : 0)) & 1;
    case Gen::CapL: case Gen::CupR:
      return (oi * (loc[s.i] + 1)) & 1;
    case Gen::CapR: case Gen::CupL: return 0;
    case Gen::BubCCW: case Gen::BubCW:
      return (oi * (s.dots + loc[s.i] + 1)) & 1;
  }
  return 0;
}

inline int slice_qdegree(const Cartan& ct, const Slice& s, const Weight& loc) {
  switch (s.g) {
    case Gen::UpDot: case Gen::DownDot: return ct.ii(s.i);
    case Gen::UpCross: case Gen::DownCross: return -ct.ij(s.i, s.j);
    case Gen::CapL: case Gen::CapR: return ct.di(s.i) * (1 + loc[s.i]);
    case Gen::CupL: case Gen::CupR: return ct.di(s.i) * (1 - loc[s.i]);
    case Gen::BubCCW: return ct.ii(s.i) * (1 - loc[s.i] + s.dots);
    case Gen::BubCW: return ct.ii(s.i) * (1 + loc[s.i] + s.dots);
  }
  return 0;
}

// Validates word evolution and caches slice parities.
inline void refresh(Monomial& m) {
  // a strand dot slice is a single dot; a dots=N tag is shorthand for N of them
  bool needs_split = false;
  for (const auto& s : m.sl)
    if ((s.g == Gen::UpDot || s.g == Gen::DownDot) && s.dots != 0) { needs_split = true; break; }
  if (needs_split) {
    std::vector<Slice> flat;
    flat.reserve(m.sl.size());
    for (auto s : m.sl) {
      if ((s.g == Gen::UpDot || s.g == Gen::DownDot) && s.dots != 0) {
        if (s.dots < 0) throw DiagramError("negative dot multiplicity");
        const int n = s.dots;
        s.dots = 0;
        for (int k = 0; k < n; ++k) flat.push_back(s);
      } else {
        flat.push_back(s);
      }
    }
    m.sl = std::move(flat);
  }
  Word w = m.src;
  for (auto& s : m.sl) {
    int gap;
    if (is_bubble(s.g)) gap = s.pos;
    else gap = s.pos - 1 + in_width(s.g);
    const Word next = apply_slice(s, w);
    const Weight loc = weight_at_gap(*m.ct, m.lam, w, gap);
    s.par = slice_parity(*m.ct, s, loc);
    w = next;
  }
}

inline int parity(const Monomial& m) {
  int p = 0;
  for (int k = 0; k < m.levels(); ++k) p += slice_parity(*m.ct, m.sl[k], local_weight(m, k));
  return p & 1;
}

inline int qdegree(const Monomial& m) {
  int d = 0;
  for (int k = 0; k < m.levels(); ++k) d += slice_qdegree(*m.ct, m.sl[k], local_weight(m, k));
  return d;
}

// ---------------------------------------------------------------------------
// Canonical form under superinterchange
// ---------------------------------------------------------------------------

namespace detail {

inline long long sort_key(const Slice& s) {
  return 4LL * (is_bubble(s.g) ? 2 * s.pos + 1 : 2 * s.pos);
}

struct Cand {
  Slice moved;
  int sgn;
  int idx;
};

// Selection pass: repeatedly pull to the bottom the movable slice with the
// least (column key, generator name, dot tag), accumulating superinterchange
// signs. Returns 0 in .first when the monomial collapses by an odd square.
inline std::pair<int, std::vector<Slice>> sort_slices(std::vector<Slice> pool) {
  std::vector<Slice> out;
  out.reserve(pool.size());
  int sign = 1;
  while (!pool.empty()) {
    std::optional<Cand> best;
    for (int j = 0; j < static_cast<int>(pool.size()); ++j) {
      Slice cur = pool[j];
      int s = 1;
      bool ok = true;
      for (int k = j - 1; k >= 0; --k) {
        Slice below = pool[k];
        if (!exchange_down(below, cur)) { ok = false; break; }
        if ((pool[k].par & 1) && (cur.par & 1)) s = -s;
      }
      if (!ok) continue;
      if (!best) { best = Cand{cur, s, j}; continue; }
      const auto key = std::tuple(sort_key(cur), gen_name_rank(cur.g), cur.dots, cur.i, cur.j);
      const auto bkey = std::tuple(sort_key(best->moved), gen_name_rank(best->moved.g),
                                   best->moved.dots, best->moved.i, best->moved.j);
      if (key < bkey) best = Cand{cur, s, j};
    }
    assert(best && "front slice is always movable");
    // Execute the pull, adjusting the mover and each slice it passes.
    for (int k = best->idx; k > 0; --k) {
      Slice lower = pool[k - 1];
      Slice upper = pool[k];
      const bool legal = exchange_down(lower, upper);
      assert(legal);
      (void)legal;
      pool[k - 1] = upper;
      pool[k] = lower;
    }
    sign *= best->sgn;
    Slice got = pool.front();
    pool.erase(pool.begin());
    if (!out.empty() && is_bubble(got.g) && out.back() == got && (got.par & 1))
      return {0, {}};
    out.push_back(got);
  }
  return {sign, out};
}

// Attempts to fuse one clean spelled bubble into an atom; returns true if a
// fusion happened. Clean means creation, dots on the left leg only, closing
// annihilation, with nothing else touching the two columns in between.
inline bool fuse_one(Monomial& m, int& sign) {
  const int n = m.levels();
  for (int a = 0; a < n; ++a) {
    const Slice& c = m.sl[a];
    Gen want_dot, want_close, atom;
    if (c.g == Gen::CupR) { want_dot = Gen::UpDot; want_close = Gen::CupL; atom = Gen::BubCCW; }
    else if (c.g == Gen::CapR) { want_dot = Gen::DownDot; want_close = Gen::CapL; atom = Gen::BubCW; }
    else continue;
    const int p = c.pos;
    std::vector<int> members{a};
    int dots = 0;
    bool found = false;
    for (int b = a + 1; b < n; ++b) {
      const Slice& s = m.sl[b];
      if (s.g == want_dot && s.pos == p && s.i == c.i) { members.push_back(b); ++dots; continue; }
      if (s.g == want_close && s.pos == p && s.i == c.i) { members.push_back(b); found = true; break; }
      const Foot f = in_foot(s);
      const Foot of = out_foot(s);
      const int lo = std::min(f.lo, of.lo), hi = std::max(f.hi, of.hi);
      if (lo <= 2 * (p + 1) && 2 * p <= hi) break;  // trapped or dirty: not a clean loop
    }
    if (!found) continue;
    // Sign for making the block contiguous: every non-member below a member
    // swaps with it.
    const int b_last = members.back();
    int sgn = 1;
    for (int t = a + 1; t < b_last; ++t) {
      if (std::find(members.begin(), members.end(), t) != members.end()) continue;
      int above_par = 0;
      for (int u : members)
        if (u > t) above_par += m.sl[u].par;
      if ((m.sl[t].par & 1) && (above_par & 1)) sgn = -sgn;
    }
    // Rebuild the slice list: atom at the creation level, non-members keep
    // order above it with columns shifted off the removed legs.
    std::vector<Slice> next;
    next.reserve(n - members.size() + 1);
    for (int t = 0; t < a; ++t) next.push_back(m.sl[t]);
    Slice bub = mk(atom, p - 1, c.i, dots);
    next.push_back(bub);
    for (int t = a + 1; t < n; ++t) {
      if (std::find(members.begin(), members.end(), t) != members.end()) continue;
      Slice s = m.sl[t];
      if (t < b_last) {
        if (is_bubble(s.g)) { if (s.pos >= p + 1) s.pos -= 2; }
        else if (s.pos >= p + 2) s.pos -= 2;
      }
      next.push_back(s);
    }
    m.sl = std::move(next);
    refresh(m);
    sign *= sgn;
    return true;
  }
  return false;
}

// Detects adjacent identical closed blocks of odd parity (the square-zero
// law for closed diagrams that resist fusion because of nested content).
inline bool adjacent_odd_square(const Monomial& m) {
  const int n = m.levels();
  for (int x = 0; x < n; ++x) {
    for (int len = 1; x + 2 * len <= n; ++len) {
      bool eq = true;
      for (int t = 0; t < len && eq; ++t) eq = (m.sl[x + t] == m.sl[x + len + t]);
      if (!eq) continue;
      int par = 0;
      for (int t = 0; t < len; ++t) par += m.sl[x + t].par;
      if (!(par & 1)) continue;
      Word w = word_at_level(m, x);
      Word v = w;
      bool closed = true;
      try {
        for (int t = 0; t < len; ++t) v = apply_slice(m.sl[x + t], v);
      } catch (const DiagramError&) { closed = false; }
      if (closed && v == w && len >= 2) return true;
    }
  }
  return false;
}

}  // namespace detail

// Canonical representative of the exchange class. Returns {0, zero monomial}
// when the class is zero by an odd square.
inline std::pair<int, Monomial> canonicalize(Monomial m) {
  refresh(m);
  int sign = 1;
  for (int round = 0; round < 1 + m.levels(); ++round) {
    auto [s, sorted] = detail::sort_slices(m.sl);
    if (s == 0) return {0, Monomial{m.src, m.lam, {}, m.ct}};
    sign *= s;
    m.sl = std::move(sorted);
    refresh(m);
    int fsign = 1;
    if (!detail::fuse_one(m, fsign)) break;
    sign *= fsign;
  }
  if (detail::adjacent_odd_square(m)) return {0, Monomial{m.src, m.lam, {}, m.ct}};
  return {sign, m};
}

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

// Vertical composite: v stacked on top of u.
inline Monomial vcompose(const Monomial& u, const Monomial& v) {
  if (u.lam != v.lam) throw DiagramError("vcompose: weight mismatch");
  if (target_word(u) != v.src) throw DiagramError("vcompose: boundary mismatch");
  Monomial out = u;
  for (const auto& s : v.sl) out.sl.push_back(s);
  refresh(out);
  return out;
}

// Horizontal composite: `left` placed left of `right`; left slices are laid
// below right slices in the chosen representative.
inline Monomial hcompose(const Monomial& left, const Monomial& right) {
  Monomial out;
  out.ct = left.ct;
  out.src = left.src + right.src;
  out.lam = right.lam;
  // consistency: right's source must sit in region(s) matching left's lam
  for (const auto& s : left.sl) out.sl.push_back(s);
  const int off_bot = static_cast<int>(target_word(left).size());
  for (auto s : right.sl) {
    s.pos += off_bot;
    out.sl.push_back(s);
  }
  refresh(out);
  return out;
}

// Identity-pads a monomial: w_left new strands on the left, w_right on the right.
inline Monomial whisker(const Monomial& m, const Word& w_left, const Word& w_right) {
  Monomial out = m;
  out.src = w_left + m.src + w_right;
  const int off = static_cast<int>(w_left.size());
  for (auto& s : out.sl) s.pos += off;
  // new rightmost region: lam shifted left across w_right
  Weight lam = m.lam;
  for (char c : w_right) {
    const int j = letter_idx(c);
    const int dir = letter_up(c) ? 1 : -1;
    for (int i = 0; i < out.ct->rank(); ++i) lam[i] -= dir * out.ct->aij(i, j);
  }
  out.lam = lam;
  refresh(out);
  return out;
}

inline Monomial identity_diagram(const Cartan& ct, const Word& w, const Weight& lam) {
  Monomial m;
  m.ct = &ct;
  m.src = w;
  m.lam = lam;
  return m;
}

// ---------------------------------------------------------------------------
// Term grammar
// ---------------------------------------------------------------------------

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(int l, int c, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(l) + ":" + std::to_string(c) + ": " + msg),
        line(l), col(c) {}
};

namespace detail {

class Scanner {
 public:
  explicit Scanner(const std::string& s) : s_(s) {}

  void skip_ws() {
    while (!eof() && (s_[k_] == ' ' || s_[k_] == '\t' || s_[k_] == '\n' || s_[k_] == '\r')) adv();
  }
  bool eof() const { return k_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[k_]; }
  char get() {
    char c = peek();
    adv();
    return c;
  }
  bool accept(char c) {
    skip_ws();
    if (peek() == c) { adv(); return true; }
    return false;
  }
  void expect(char c, const char* what) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "' " + what);
    adv();
  }
  int integer() {
    skip_ws();
    bool neg = false;
    if (peek() == '-') { neg = true; adv(); }
    if (!isdigit(static_cast<unsigned char>(peek()))) fail("expected integer");
    long v = 0;
    while (isdigit(static_cast<unsigned char>(peek()))) v = v * 10 + (get() - '0');
    return static_cast<int>(neg ? -v : v);
  }
  std::string ident() {
    skip_ws();
    std::string out;
    while (isalnum(static_cast<unsigned char>(peek())) || peek() == '_') out += get();
    if (out.empty()) fail("expected identifier");
    return out;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, col_, msg); }

 private:
  void adv() {
    if (eof()) return;
    if (s_[k_] == '\n') { ++line_; col_ = 1; } else ++col_;
    ++k_;
  }
  const std::string& s_;
  size_t k_ = 0;
  int line_ = 1, col_ = 1;
};

}  // namespace detail

// diagram ::= "@" weight ("[" word "]")? ":" slice (";" slice)*
// slice   ::= ident "(" args ")" "@" position   (empty slice list allowed
// for identity diagrams written as "@w[word]:").
inline Monomial parse_diagram(const std::string& text, const Cartan& ct) {
  detail::Scanner sc(text);
  sc.expect('@', "before the weight");
  Weight lam;
  if (sc.accept('(')) {
    lam.push_back(sc.integer());
    while (sc.accept(',')) lam.push_back(sc.integer());
    sc.expect(')', "after weight tuple");
  } else {
    lam.push_back(sc.integer());
    for (int i = 1; i < ct.rank(); ++i) lam.push_back(0);
  }
  if (static_cast<int>(lam.size()) != ct.rank()) sc.fail("weight arity does not match Cartan rank");
  Word w;
  if (sc.accept('[')) {
    sc.skip_ws();
    while (sc.peek() == 'E' || sc.peek() == 'F') {
      const bool up = sc.get() == 'E';
      int idx = 0;
      if (isdigit(static_cast<unsigned char>(sc.peek()))) idx = sc.integer();
      if (idx < 0 || idx >= ct.rank()) sc.fail("letter index out of range");
      w += letter(idx, up);
      sc.skip_ws();
    }
    sc.expect(']', "after the word");
  }
  sc.expect(':', "after the boundary");
  Monomial m;
  m.ct = &ct;
  m.src = w;
  m.lam = lam;
  sc.skip_ws();
  if (!sc.eof()) {
    while (true) {
      std::string name = sc.ident();
      Gen g;
      if (name == "updot" || name == "dot") g = Gen::UpDot;
      else if (name == "downdot") g = Gen::DownDot;
      else if (name == "upcross" || name == "cross") g = Gen::UpCross;
      else if (name == "downcross") g = Gen::DownCross;
      else if (name == "capl") g = Gen::CapL;
      else if (name == "cupl") g = Gen::CupL;
      else if (name == "capr") g = Gen::CapR;
      else if (name == "cupr") g = Gen::CupR;
      else if (name == "ccw_bub") g = Gen::BubCCW;
      else if (name == "cw_bub") g = Gen::BubCW;
      else sc.fail("unknown generator '" + name + "'");
      int idx = 0, dots = 0;
      if (sc.accept('(')) {
        if (!sc.accept(')')) {
          while (true) {
            sc.skip_ws();
            if (sc.peek() == 'i') {
              (void)sc.ident();
              idx = 0;
            } else if (isalpha(static_cast<unsigned char>(sc.peek()))) {
              std::string key = sc.ident();
              sc.expect('=', "after argument name");
              int v = sc.integer();
              if (key == "dots") dots = v;
              else sc.fail("unknown argument '" + key + "'");
            } else {
              idx = sc.integer();
            }
            if (!sc.accept(',')) break;
          }
          sc.expect(')', "after arguments");
        }
      }
      if (idx < 0 || idx >= ct.rank()) sc.fail("generator index out of range");
      sc.expect('@', "before the position");
      int pos = sc.integer();
      Slice s = mk(g, pos, idx, dots);
      m.sl.push_back(s);
      sc.skip_ws();
      if (!sc.accept(';')) break;
    }
    sc.skip_ws();
    if (!sc.eof()) sc.fail("trailing input");
  }
  try {
    refresh(m);
  } catch (const DiagramError& e) {
    throw ParseError(1, 1, e.what());
  }
  return m;
}

inline std::string print_word(const Word& w, const Cartan& ct) {
  std::string out;
  for (size_t k = 0; k < w.size(); ++k) {
    if (k) out += ' ';
    out += letter_up(w[k]) ? 'E' : 'F';
    if (ct.rank() > 1) out += std::to_string(letter_idx(w[k]));
  }
  return out;
}

inline std::string print_diagram(const Monomial& m) {
  std::ostringstream os;
  os << '@';
  if (m.ct->rank() == 1) os << m.lam[0];
  else {
    os << '(';
    for (size_t k = 0; k < m.lam.size(); ++k) {
      if (k) os << ',';
      os << m.lam[k];
    }
    os << ')';
  }
  if (!m.src.empty()) os << '[' << print_word(m.src, *m.ct) << ']';
  os << ':';
  for (size_t k = 0; k < m.sl.size(); ++k) {
    os << (k ? " ; " : " ");
    const Slice& s = m.sl[k];
    os << gen_name(s.g) << '(' << s.i;
    if (s.g == Gen::UpCross || s.g == Gen::DownCross) {
      if (s.j != s.i) os << ',' << s.j;
    }
    if (is_bubble(s.g)) os << ", dots=" << s.dots;
    os << ")@" << s.pos;
  }
  return os.str();
}

}  // namespace sdrw
