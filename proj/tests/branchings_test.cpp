#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>

#include "sdrw/branchings.hpp"

using namespace sdrw;

namespace {

const Cartan& ct() {
  static Cartan c = Cartan::rank1_odd();
  return c;
}

Monomial diag(const std::string& text) { return parse_diagram(text, ct()); }

Monomial canon(const std::string& text) {
  auto [s, m] = canonicalize(diag(text));
  REQUIRE(s == 1);
  return m;
}

// Crossing-and-dot rules instantiated at every ambient weight a block can
// see on the given number of strands.
Polygraph onh_fragment(int strands, bool with_on2 = true) {
  Polygraph P;
  P.ct = &ct();
  const Word ee(2, letter(0, true));
  for (int k = 0; k + 2 <= strands; ++k) {
    const int l = 2 * k;
    const Weight lm{l};
    const std::string at = "@" + std::to_string(l);
    P.add({"dc", std::to_string(l), diag(at + "[E E]: cross(i)@1 ; cross(i)@1"),
           lin_zero(ct(), ee, ee, lm), false});
    LinComb r1 = lin_zero(ct(), ee, ee, lm);
    lin_insert(r1, -1, diag(at + "[E E]: dot(i)@2 ; cross(i)@1"));
    lin_insert(r1, 1, identity_diagram(ct(), ee, lm));
    P.add({"on1", std::to_string(l), diag(at + "[E E]: cross(i)@1 ; dot(i)@1"), r1, false});
    if (with_on2) {
      LinComb r2 = lin_zero(ct(), ee, ee, lm);
      lin_insert(r2, -1, diag(at + "[E E]: dot(i)@1 ; cross(i)@1"));
      lin_insert(r2, 1, identity_diagram(ct(), ee, lm));
      P.add({"on2", std::to_string(l), diag(at + "[E E]: cross(i)@1 ; dot(i)@2"), r2, false});
    }
  }
  for (int k = 0; k + 3 <= strands; ++k) {
    const int l = 2 * k;
    const std::string at = "@" + std::to_string(l);
    P.add({"yb", std::to_string(l), diag(at + "[E E E]: cross(i)@2 ; cross(i)@1 ; cross(i)@2"),
           lin_single(diag(at + "[E E E]: cross(i)@1 ; cross(i)@2 ; cross(i)@1")), false});
  }
  return P;
}

int rule_idx(const Polygraph& P, const std::string& name, const std::string& params) {
  for (int k = 0; k < static_cast<int>(P.rules.size()); ++k)
    if (P.rules[k].name == name && P.rules[k].params == params) return k;
  FAIL("rule not found: " << name << "(" << params << ")");
  return -1;
}

std::string dots(const std::string& head, int n, int pos, const std::string& tail) {
  std::string s = head;
  for (int k = 0; k < n; ++k) s += " ; dot(i)@" + std::to_string(pos);
  return s + tail;
}

}  // namespace

TEST_CASE("triple crossing gives one self-overlap per instance") {
  Polygraph P = onh_fragment(2);
  const int dc = rule_idx(P, "dc", "0");
  auto bs = enumerate_overlaps(P, dc, dc);
  REQUIRE(bs.size() == 1);
  const Branching& b = bs.front();
  CHECK(b.source == canon("@0[E E]: cross(i)@1 ; cross(i)@1 ; cross(i)@1"));
  CHECK(b.m1.members == std::vector<int>{0, 1});
  CHECK(b.m2.members == std::vector<int>{1, 2});
  CHECK(b.kind == BranchKind::Overlap);
  JoinResult jr = check_joinable(P, b);
  CHECK(jr.joined);
  CHECK(jr.nf1.terms.empty());
  CHECK(jr.nf2.terms.empty());
}

TEST_CASE("crossing square against the braid rule gives the two mixed overlaps") {
  Polygraph P = onh_fragment(3);
  const int yb = rule_idx(P, "yb", "0");
  std::size_t total = 0;
  for (const char* l : {"0", "2"}) {
    auto bs = enumerate_overlaps(P, rule_idx(P, "dc", l), yb);
    for (const auto& b : bs) {
      CHECK(check_joinable(P, b).joined);
      ++total;
    }
  }
  CHECK(total == 2);
}

TEST_CASE("braid rule overlaps itself through a shared crossing") {
  Polygraph P = onh_fragment(3);
  const int yb = rule_idx(P, "yb", "0");
  auto bs = enumerate_overlaps(P, yb, yb);
  REQUIRE(!bs.empty());
  bool saw_pentagon = false;
  for (const auto& b : bs) {
    CHECK(check_joinable(P, b).joined);
    if (b.source ==
        canon("@0[E E E]: cross(i)@2 ; cross(i)@1 ; cross(i)@2 ; cross(i)@1 ; cross(i)@2"))
      saw_pentagon = true;
  }
  CHECK(saw_pentagon);
}

TEST_CASE("dot indexation families stay confluent") {
  Polygraph P3 = onh_fragment(3);
  Polygraph P4 = onh_fragment(4);
  for (int n = 1; n <= 4; ++n) {
    auto [s3, f1] = canonicalize(
        diag(dots("@0[E E E]: cross(i)@2 ; cross(i)@1", n, 1, " ; cross(i)@2")));
    REQUIRE(s3 == 1);
    auto r3 = one_step_reducts(P3, f1);
    REQUIRE(r3.size() >= 2);
    std::set<std::string> nfs;
    for (const auto& leg : r3) nfs.insert(lin_str(normalize(P3, leg).value));
    CHECK(nfs.size() == 1);

    auto [s4, f2] = canonicalize(diag(
        dots("@0[E E E E]: cross(i)@3 ; cross(i)@2", n, 2,
             " ; cross(i)@1 ; cross(i)@3 ; cross(i)@2 ; cross(i)@3")));
    REQUIRE(s4 == 1);
    auto r4 = one_step_reducts(P4, f2);
    REQUIRE(r4.size() >= 2);
    nfs.clear();
    for (const auto& leg : r4) nfs.insert(lin_str(normalize(P4, leg).value));
    CHECK(nfs.size() == 1);
  }
}

TEST_CASE("every overlap on three strands is joinable") {
  Polygraph P = onh_fragment(3);
  auto bs = enumerate_overlaps(P);
  REQUIRE(bs.size() >= 6);
  for (const auto& b : bs) {
    CAPTURE(P.rules[b.rule1].name, P.rules[b.rule2].name, print_diagram(b.source));
    CHECK(check_joinable(P, b).joined);
  }
}

TEST_CASE("dropping the right dot slide breaks joinability") {
  Polygraph full = onh_fragment(2);
  Polygraph cut = onh_fragment(2, false);
  const auto find_dot_overlap = [](const Polygraph& P) {
    auto bs = enumerate_overlaps(P, rule_idx(P, "dc", "0"), rule_idx(P, "on1", "0"));
    REQUIRE(bs.size() == 1);
    return bs.front();
  };
  CHECK(check_joinable(full, find_dot_overlap(full)).joined);
  CHECK(!check_joinable(cut, find_dot_overlap(cut)).joined);
}

TEST_CASE("classification separates the four families") {
  Polygraph P = onh_fragment(4);
  const int dc_left = rule_idx(P, "dc", "4");
  const int dc_right = rule_idx(P, "dc", "0");
  const Monomial m = canon("@0[E E E E]: cross(i)@1 ; cross(i)@1 ; cross(i)@3 ; cross(i)@3");
  auto ml = find_matches(P.rules[dc_left].lhs, m);
  auto mr = find_matches(P.rules[dc_right].lhs, m);
  REQUIRE(ml.size() == 1);
  REQUIRE(mr.size() == 1);
  CHECK(classify(dc_left, dc_right, ml.front(), mr.front()) == BranchKind::Peiffer);
  CHECK(classify(dc_left, dc_left, ml.front(), ml.front()) == BranchKind::Aspherical);

  Branching pf;
  pf.source = m;
  pf.rule1 = dc_left;
  pf.rule2 = dc_right;
  pf.m1 = ml.front();
  pf.m2 = mr.front();
  JoinResult jr = check_joinable(P, pf);
  CHECK(jr.joined);
  CHECK(jr.steps <= 2 * 2);

  const Monomial other = canon("@0[E E]: cross(i)@1");
  CHECK(classify(m, dc_left, ml.front(), other, dc_right, mr.front()) == BranchKind::Additive);

  Polygraph P3 = onh_fragment(3);
  auto mixed = enumerate_overlaps(P3, rule_idx(P3, "dc", "0"), rule_idx(P3, "yb", "0"));
  REQUIRE(!mixed.empty());
  CHECK(classify(mixed.front()) == BranchKind::Overlap);
}

TEST_CASE("joinability modulo a convertible sub-system") {
  Polygraph P = onh_fragment(3);
  for (auto& r : P.rules)
    if (r.name == "yb") r.in_E = true;
  ModuloSystem S;
  S.P = P;
  S.tau = [](const Monomial&) { return 0L; };
  const int dc0 = rule_idx(P, "dc", "0");
  const int on1_2 = rule_idx(P, "on1", "2");
  auto bs = enumerate_overlaps(P, dc0, rule_idx(P, "on1", "0"));
  REQUIRE(!bs.empty());
  CHECK(check_joinable_modulo(S, bs.front()));

  auto yb_on = enumerate_overlaps(P, rule_idx(P, "yb", "0"), on1_2);
  bool any = false;
  for (const auto& b : yb_on) {
    any = true;
    CHECK(check_joinable_modulo(S, b));
  }
  CHECK(any);
}

TEST_CASE("confluence report covers every enumerated pair") {
  Polygraph P = onh_fragment(2);
  auto report = confluence_report(P);
  REQUIRE(!report.empty());
  for (const auto& rec : report) {
    CHECK(rec.kind == BranchKind::Overlap);
    CHECK(rec.joined);
    CHECK(!rec.source.empty());
  }
}
