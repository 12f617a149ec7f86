#include <catch2/catch_amalgamated.hpp>

#include "sdrw/derivations.hpp"

using namespace sdrw;

namespace {

const Cartan& ct() {
  static Cartan c = Cartan::rank1_odd();
  return c;
}

Monomial diag(const std::string& text) { return parse_diagram(text, ct()); }

Polygraph crossing_fragment() {
  Polygraph P;
  P.ct = &ct();
  const Word ee = {letter(0, true), letter(0, true)};
  const Word eee = {letter(0, true), letter(0, true), letter(0, true)};
  const Weight lm{0};
  P.add({"dc", "", diag("@0[E E]: cross(i)@1 ; cross(i)@1"), lin_zero(ct(), ee, ee, lm), false});
  P.add({"yb", "",
         diag("@0[E E E]: cross(i)@2 ; cross(i)@1 ; cross(i)@2"),
         lin_single(diag("@0[E E E]: cross(i)@1 ; cross(i)@2 ; cross(i)@1")), false});
  LinComb r1 = lin_zero(ct(), ee, ee, lm);
  lin_insert(r1, -1, diag("@0[E E]: dot(i)@2 ; cross(i)@1"));
  lin_insert(r1, 1, identity_diagram(ct(), ee, lm));
  P.add({"on1", "", diag("@0[E E]: cross(i)@1 ; dot(i)@1"), r1, false});
  LinComb r2 = lin_zero(ct(), ee, ee, lm);
  lin_insert(r2, -1, diag("@0[E E]: dot(i)@1 ; cross(i)@1"));
  lin_insert(r2, 1, identity_diagram(ct(), ee, lm));
  P.add({"on2", "", diag("@0[E E]: cross(i)@1 ; dot(i)@2"), r2, false});
  return P;
}

// Crossings shuffle strand labels and report the label under one leg.
Derivation stack_measure() {
  Derivation D;
  D.name = "stack";
  D.X = [](const Slice& s, const Vals& v) {
    if (s.g == Gen::UpCross) return Vals{v[1], v[0] + 1};
    if (s.g == Gen::UpDot) return v;
    return zeros(out_width(s.g));
  };
  D.Y = [](const Slice& s, const Vals&) { return zeros(in_width(s.g)); };
  D.d = [](const Slice& s, const Vals& x, const Vals&) -> long {
    return s.g == Gen::UpCross ? x[1] : 0;
  };
  return D;
}

Derivation push_measure() {
  Derivation D;
  D.name = "push";
  D.X = [](const Slice& s, const Vals& v) {
    if (s.g == Gen::UpCross) return Vals{v[1] + 2, v[0] + 1};
    if (s.g == Gen::UpDot) return v;
    return zeros(out_width(s.g));
  };
  D.Y = [](const Slice& s, const Vals&) { return zeros(in_width(s.g)); };
  D.d = [](const Slice& s, const Vals& x, const Vals&) -> long {
    if (s.g == Gen::UpCross || s.g == Gen::UpDot) return x[0];
    return 0;
  };
  return D;
}

// Dots push labels from both sides; cups and caps charge their left leg.
Derivation leg_measure() {
  Derivation D;
  D.name = "leg";
  D.X = [](const Slice& s, const Vals& v) -> Vals {
    if (s.g == Gen::UpDot || s.g == Gen::DownDot) return {v[0] + 1};
    if (is_creation(s.g)) return {0, 0};
    if (is_annihilation(s.g)) return {};
    return zeros(out_width(s.g));
  };
  D.Y = [](const Slice& s, const Vals& v) -> Vals {
    if (s.g == Gen::UpDot || s.g == Gen::DownDot) return {v[0] + 1};
    if (is_creation(s.g)) return {};
    if (is_annihilation(s.g)) return {0, 0};
    return zeros(in_width(s.g));
  };
  D.d = [](const Slice& s, const Vals& x, const Vals& y) -> long {
    if (is_creation(s.g)) return y[0];
    if (is_annihilation(s.g)) return x[0];
    return 0;
  };
  return D;
}

}  // namespace

TEST_CASE("weight maps are label free and evaluate once") {
  Derivation wm = weight_map("bends", [](const Slice& s) -> long {
    return is_creation(s.g) || is_annihilation(s.g) ? 1 : 0;
  });
  CHECK(eval_derivation(wm, diag("@0[E]: capr(i)@2 ; cupl(i)@1"), {0}, {0}) == 2);
  CHECK(eval_derivation(wm, diag("@1[]: ccw_bub(i, dots=1)@0"), {}, {}) == 0);
  CHECK(eval_derivation(wm, diag("@2[]: cupr(i)@1 ; updot(i)@1 ; cupl(i)@1"), {}, {}) == 2);

  Polygraph P;
  P.ct = &ct();
  const Word e = {letter(0, true)};
  P.add({"straighten", "", diag("@0[E]: capr(i)@2 ; cupl(i)@1"),
         lin_single(identity_diagram(ct(), e, {0})), false});
  const DecreaseReport rep = check_rule_decrease(measure_of(wm), P.rules[0]);
  CHECK(rep.v == Verdict::Strict);
}

TEST_CASE("labels flow upward through crossings") {
  const Monomial m = diag("@0[E E]: cross(i)@1 ; dot(i)@1");
  CHECK(eval_derivation(stack_measure(), m, {3, 4}, {0, 0}) == 4);
  CHECK(eval_derivation(push_measure(), m, {3, 4}, {0, 0}) == 9);
  const Monomial yb = diag("@0[E E E]: cross(i)@2 ; cross(i)@1 ; cross(i)@2");
  CHECK(eval_derivation(stack_measure(), yb, {1, 2, 5}, {0, 0, 0}) == 2 * 5 + 2 + 1);
  const Monomial yb2 = diag("@0[E E E]: cross(i)@1 ; cross(i)@2 ; cross(i)@1");
  CHECK(eval_derivation(stack_measure(), yb2, {1, 2, 5}, {0, 0, 0}) == 2 + 2 * 5);
}

TEST_CASE("rule decrease classification on the boundary grid") {
  Polygraph P = crossing_fragment();
  const Measure s1 = measure_of(stack_measure());
  const Measure s2 = measure_of(push_measure());
  CHECK(check_rule_decrease(s1, P.rules[0]).v == Verdict::Strict);
  CHECK(check_rule_decrease(s1, P.rules[1]).v == Verdict::Strict);
  CHECK(check_rule_decrease(s1, P.rules[2]).v == Verdict::Weak);
  CHECK(check_rule_decrease(s1, P.rules[3]).v == Verdict::Weak);
  CHECK(check_rule_decrease(s2, P.rules[2]).v == Verdict::Strict);
  CHECK(check_rule_decrease(s2, P.rules[3]).v == Verdict::Strict);
  CHECK(check_rule_decrease(s2, P.rules[1]).v == Verdict::Violated);

  Measure lex;
  lex.name = "stack,push";
  lex.parts = {stack_measure(), push_measure()};
  CHECK(check_rule_decrease(lex, P.rules[2]).v == Verdict::Strict);
  CHECK(check_rule_decrease(lex, P.rules[1]).v == Verdict::Strict);
}

TEST_CASE("contravariant labels feed creation weights") {
  Polygraph P;
  P.ct = &ct();
  Monomial lhs = diag("@0: capr(i)@1 ; downdot(i)@1");
  LinComb rhs = lin_single(diag("@0: capr(i)@1 ; updot(i)@2"));
  P.add({"movedot", "", lhs, rhs, false});
  const Derivation D = leg_measure();
  CHECK(eval_derivation(D, lhs, {}, {0, 0}) == 1);
  CHECK(eval_derivation(D, lhs, {}, {3, 5}) == 4);
  CHECK(eval_derivation(D, lin_support(rhs)[0], {}, {3, 5}) == 3);
  CHECK(check_rule_decrease(measure_of(D), P.rules[0]).v == Verdict::Strict);
}

TEST_CASE("staged certificates cover rule sets in order") {
  Polygraph P = crossing_fragment();
  const std::vector<Stage> stages = {{"one", measure_of(stack_measure())},
                                     {"two", measure_of(push_measure())}};
  const TerminationCertificate cert = staged_termination(P, stages);
  REQUIRE(cert.certified);
  REQUIRE(cert.stages.size() == 2);
  CHECK(cert.stages[0].strict == std::vector<std::string>{"dc", "yb"});
  CHECK(cert.stages[0].weak == std::vector<std::string>{"on1", "on2"});
  CHECK(cert.stages[1].strict == std::vector<std::string>{"on1", "on2"});
  CHECK(cert.uncovered.empty());
}

TEST_CASE("an orientation against the measure is rejected with a witness") {
  Polygraph P = crossing_fragment();
  LinComb back = lin_single(diag("@0[E E]: cross(i)@1 ; dot(i)@1"), -1);
  P.add({"rev", "", diag("@0[E E]: dot(i)@2 ; cross(i)@1"), back, false});
  const DecreaseReport rep = check_rule_decrease(measure_of(push_measure()), P.rules.back());
  CHECK(rep.v == Verdict::Violated);
  CHECK(rep.witness_x == Vals{0, 0});
  CHECK(rep.witness_y == Vals{0, 0});

  const std::vector<Stage> stages = {{"one", measure_of(stack_measure())},
                                     {"two", measure_of(push_measure())}};
  const TerminationCertificate cert = staged_termination(P, stages);
  CHECK_FALSE(cert.certified);
  CHECK(cert.stages[1].violated == std::vector<std::string>{"rev"});
  CHECK(cert.uncovered == std::vector<std::string>{"rev"});
}

TEST_CASE("label maps are checked for monotonicity") {
  const std::vector<Slice> protos = {mk(Gen::UpCross, 1), mk(Gen::UpDot, 1)};
  CHECK(!check_monotone(push_measure(), protos));
  Derivation bad = push_measure();
  bad.name = "bad";
  bad.X = [](const Slice& s, const Vals& v) {
    if (s.g == Gen::UpDot) return Vals{-v[0]};
    if (s.g == Gen::UpCross) return Vals{v[1] + 2, v[0] + 1};
    return zeros(out_width(s.g));
  };
  const auto witness = check_monotone(bad, protos);
  REQUIRE(witness.has_value());
  CHECK(witness->find("updot") != std::string::npos);
}
