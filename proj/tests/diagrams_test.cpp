#include <catch2/catch_amalgamated.hpp>

#include "sdrw/diagrams.hpp"

using namespace sdrw;

static const Cartan& C1() {
  static Cartan c = Cartan::rank1_odd();
  return c;
}

static Monomial diag(const std::string& s) { return parse_diagram(s, C1()); }

TEST_CASE("region weights follow the rightmost-region convention") {
  Monomial m = diag("@2[E F]:");
  CHECK(weight_at_gap(C1(), m.lam, m.src, 2) == Weight{2});
  CHECK(weight_at_gap(C1(), m.lam, m.src, 1) == Weight{0});
  CHECK(weight_at_gap(C1(), m.lam, m.src, 0) == Weight{2});
}

TEST_CASE("generator parity and degree tables") {
  Monomial m = diag("@0[F E]: capl(i)@1");
  CHECK(parity(m) == 1);
  CHECK(qdegree(m) == 1);

  m = diag("@3[]: cupr(i)@1");
  CHECK(parity(m) == 0);
  CHECK(qdegree(m) == -2);

  m = diag("@0[E]: updot(i)@1");
  CHECK(parity(m) == 1);
  CHECK(qdegree(m) == 2);

  m = diag("@0[E E]: upcross(i)@1");
  CHECK(parity(m) == 1);
  CHECK(qdegree(m) == -2);

  m = diag("@1[]: ccw_bub(i, dots=1)@0");
  CHECK(parity(m) == 1);
  CHECK(qdegree(m) == 2);

  m = diag("@2[]: cupr(i)@1");
  CHECK(parity(m) == 1);
  m = diag("@2[E F]: cupl(i)@1");
  CHECK(parity(m) == 0);

  // zigzags are even in every weight, like the strands they straighten to
  for (int lam = -3; lam <= 3; ++lam) {
    const std::string w = "@" + std::to_string(lam);
    for (const char* z : {"[E]: capr(i)@2 ; cupl(i)@1", "[E]: cupr(i)@1 ; capl(i)@2",
                          "[F]: cupr(i)@2 ; capl(i)@1", "[F]: capr(i)@1 ; cupl(i)@2"}) {
      Monomial zz = diag(w + z);
      CHECK(parity(zz) == 0);
      CHECK(qdegree(zz) == 0);
    }
  }
}

TEST_CASE("canonicalize orders distant dots with a superinterchange sign") {
  Monomial m = diag("@0[E E]: updot(i)@2 ; updot(i)@1");
  auto [s, c] = canonicalize(m);
  CHECK(s == -1);
  CHECK(print_diagram(c) == "@0[E E]: updot(0)@1 ; updot(0)@2");
}

TEST_CASE("same-column dots do not commute") {
  Monomial m = diag("@0[E]: updot(i)@1 ; updot(i)@1");
  auto [s, c] = canonicalize(m);
  CHECK(s == 1);
  CHECK(c.sl.size() == 2);
}

TEST_CASE("an odd closed diagram squares to zero") {
  Monomial m = diag("@1[]: ccw_bub(i, dots=1)@0 ; ccw_bub(i, dots=1)@0");
  auto [s, c] = canonicalize(m);
  CHECK(s == 0);
  CHECK(c.sl.empty());
}

TEST_CASE("clean spelled loops fuse into bubble atoms") {
  Monomial m = diag("@2[]: cupr(i)@1 ; updot(i)@1 ; cupl(i)@1");
  const int deg = qdegree(m);
  auto [s, c] = canonicalize(m);
  CHECK(s == 1);
  REQUIRE(c.sl.size() == 1);
  CHECK(c.sl[0].g == Gen::BubCCW);
  CHECK(c.sl[0].dots == 1);
  CHECK(c.sl[0].pos == 0);
  CHECK(qdegree(c) == deg);

  m = diag("@-1[]: capr(i)@1 ; downdot(i)@1 ; downdot(i)@1 ; capl(i)@1");
  auto [s2, c2] = canonicalize(m);
  CHECK(s2 == 1);
  REQUIRE(c2.sl.size() == 1);
  CHECK(c2.sl[0].g == Gen::BubCW);
  CHECK(c2.sl[0].dots == 2);
}

TEST_CASE("loops with trapped content stay spelled") {
  Monomial m = diag("@0[]: cupr(i)@1 ; ccw_bub(i, dots=0)@1 ; cupl(i)@1");
  auto [s, c] = canonicalize(m);
  CHECK(s == 1);
  CHECK(c.sl.size() == 3);
}

TEST_CASE("parity and qdegree are invariant under exchange") {
  Monomial a = diag("@1[E E]: updot(i)@2 ; capr(i)@1 ; updot(i)@4");
  Monomial b = diag("@1[E E]: updot(i)@2 ; updot(i)@2 ; capr(i)@1");
  CHECK(parity(a) == parity(b));
  CHECK(qdegree(a) == qdegree(b));
  auto ca = canonicalize(a);
  auto cb = canonicalize(b);
  CHECK(ca.second == cb.second);
}

TEST_CASE("a bubble slides past strand slices but not into created pairs") {
  CHECK(exchange_legal(mk(Gen::UpDot, 1), mk(Gen::BubCCW, 1)));
  CHECK(exchange_legal(mk(Gen::BubCCW, 0), mk(Gen::CapR, 1)));
  CHECK(!exchange_legal(mk(Gen::CapR, 1), mk(Gen::BubCCW, 1)));
  CHECK(!exchange_legal(mk(Gen::UpCross, 1), mk(Gen::BubCCW, 1)));
  CHECK(!exchange_legal(mk(Gen::CapL, 1), mk(Gen::CapR, 1)));
}

TEST_CASE("vertical and horizontal composition agree with whiskering") {
  Monomial dot = diag("@0[E]: updot(i)@1");
  Monomial cross = diag("@0[E E]: upcross(i)@1");
  Monomial top = whisker(dot, Word(1, letter(0, true)), Word());
  // dot on strand 2 over the crossing
  Monomial v = vcompose(cross, top);
  CHECK(v.sl.size() == 2);
  CHECK(target_word(v) == cross.src);

  Monomial h = hcompose(dot, dot);
  CHECK(h.src.size() == 2);
  CHECK(qdegree(h) == 4);
  CHECK(parity(h) == 0);
}

TEST_CASE("composition boundary mismatches throw") {
  Monomial dot = diag("@0[E]: updot(i)@1");
  Monomial capl = diag("@0[F E]: capl(i)@1");
  CHECK_THROWS_AS(vcompose(dot, capl), DiagramError);
}

TEST_CASE("parser reports line and column") {
  try {
    parse_diagram("@0[E E]:\n cross(i)@1 ;; cross(i)@1", C1());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.col >= 13);
  }
  CHECK_THROWS_AS(parse_diagram("@0[E]: updot(i)@3", C1()), ParseError);
  CHECK_THROWS_AS(parse_diagram("@0[F]: updot(i)@1", C1()), ParseError);
}

TEST_CASE("print then parse round-trips canonically") {
  Monomial m = diag("@0[E E]: cross(i)@1 ; cross(i)@1");
  const std::string p = print_diagram(m);
  CHECK(p == "@0[E E]: upcross(0)@1 ; upcross(0)@1");
  Monomial back = parse_diagram(p, C1());
  CHECK(back == m);
}
