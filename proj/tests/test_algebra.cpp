#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "pathid/errors.hpp"
#include "pathid/expr.hpp"
#include "pathid/fock.hpp"
#include "pathid/polynomial.hpp"

using namespace pathid;
using testing_support::ket;

TEST(InternalModeText, RoundTrip) {
  const std::vector<InternalMode> modes{
      {},
      {Polarization::horizontal()},
      {Polarization::vertical(), -3},
      {Polarization::at(0.1234567890123), 2, "~loss4"},
      {Polarization::none(), 0, "x"},
  };
  for (const auto& m : modes) EXPECT_EQ(parse_internal_mode(to_string(m)), m) << to_string(m);
  EXPECT_EQ(parse_internal_mode("-"), InternalMode{});
  EXPECT_THROW(parse_internal_mode("Q"), std::invalid_argument);
  EXPECT_THROW(parse_internal_mode("lx"), std::invalid_argument);
}

TEST(FockStateBasics, CountsAndOrdering) {
  FockState s;
  s.add(ModeLabel("b", {Polarization::horizontal()}));
  s.add(ModeLabel("b", {Polarization::vertical()}), 2);
  s.add(ModeLabel("a"));
  EXPECT_EQ(s.total(), 4);
  EXPECT_EQ(s.path_occupation("b"), 3);
  EXPECT_EQ(s.occupation(ModeLabel("b", {Polarization::vertical()})), 2);
  s.add(ModeLabel("a"), -1);
  EXPECT_EQ(s.occupations().count(ModeLabel("a")), 0u);
  EXPECT_EQ(to_string(ket({{"a"}, {"b"}})), "|a, b>");
}

TEST(ExprTest, ParseEvaluate) {
  EXPECT_DOUBLE_EQ(Expr::parse("2*pi/4").eval({}), std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(Expr::parse("-(a+1)*b").eval({{"a", 2.0}, {"b", 3.0}}), -9.0);
  EXPECT_DOUBLE_EQ(Expr::parse("1-2-3").eval({}), -4.0);
  EXPECT_DOUBLE_EQ(Expr::parse("8/2/2").eval({}), 2.0);
  EXPECT_EQ(Expr::parse("phi+theta*2").parameters(), (std::set<std::string>{"phi", "theta"}));
  EXPECT_TRUE(Expr::parse("pi").is_constant());
  EXPECT_THROW(Expr::parse("x").eval({}), UnboundParameter);
  EXPECT_THROW(Expr::parse("1+"), ValidationError);
  EXPECT_THROW(Expr::parse("(1"), ValidationError);
  EXPECT_THROW(Expr::parse(""), ValidationError);
}

TEST(ExprTest, TextRoundTrip) {
  for (const char* text : {"phi", "pi/6", "-pi/2", "0.70710678118654757", "(a+b)*c", "a-(b-c)", "2*x+1"}) {
    const Expr e = Expr::parse(text);
    const Expr again = Expr::parse(e.str());
    EXPECT_EQ(e, again) << text;
    Bindings b{{"phi", 0.3}, {"a", 1.5}, {"b", -2.0}, {"c", 0.25}, {"x", 4.0}};
    EXPECT_DOUBLE_EQ(e.eval(b), again.eval(b)) << text;
  }
  EXPECT_DOUBLE_EQ(Expr(0.1).eval({}), 0.1);
  EXPECT_DOUBLE_EQ(Expr::parse(Expr(0.1).str()).eval({}), 0.1);
}

TEST(Polynomial, StructuralZerosKept) {
  OperatorPolynomial p(2);
  const Monomial ab({ModeLabel("a"), ModeLabel("b")});
  p.add(1, ab, 1.0);
  p.add(1, ab, -1.0);
  EXPECT_EQ(p.size(), 1u);
  EXPECT_EQ(p.coefficient(1, ab), Complex{});
  EXPECT_EQ(p.pruned().size(), 0u);
  EXPECT_EQ(p.min_degree(), 1);
  p.add(3, ab, 1.0);  // above the truncation
  EXPECT_EQ(p.max_degree(), 1);
}

TEST(Polynomial, MonomialsAreSorted) {
  const Monomial m({ModeLabel("b"), ModeLabel("a"), ModeLabel("b")});
  EXPECT_EQ(m.modes().front().path, "a");
  EXPECT_EQ(m.count(ModeLabel("b")), 2);
  EXPECT_EQ(m.without_one(ModeLabel("b")).count(ModeLabel("b")), 1);
  EXPECT_EQ(Monomial::from_fock(m.fock()), m);
}

TEST(Polynomial, CreateAndAnnihilate) {
  // (a^dag)^2 |0> annihilated by a gives 2 a^dag |0>.
  OperatorPolynomial p(3);
  p.add(0, Monomial({ModeLabel("a"), ModeLabel("a")}), 1.0);
  const auto q = p.annihilated({ModeLabel("a")}, 1);
  EXPECT_EQ(q.coefficient(1, Monomial({ModeLabel("a")})), Complex(2.0));
  const auto r = p.created({ModeLabel("b")}, 2);
  EXPECT_EQ(r.coefficient(2, Monomial({ModeLabel("a"), ModeLabel("a"), ModeLabel("b")})), Complex(1.0));
  EXPECT_EQ(p.created({ModeLabel("b")}, 4).size(), 0u);
}

TEST(Polynomial, Substitution) {
  OperatorPolynomial p(1);
  p.add(0, Monomial({ModeLabel("a"), ModeLabel("a")}), 1.0);
  const auto q = p.substituted([](const ModeLabel& m) -> OperatorPolynomial::Image {
    if (m.path != "a") return {{m, 1.0}};
    return {{ModeLabel("x"), 1.0}, {ModeLabel("y"), Complex(0.0, 1.0)}};
  });
  // (x + i y)^2 = x^2 + 2i xy - y^2
  EXPECT_EQ(q.coefficient(0, Monomial({ModeLabel("x"), ModeLabel("y")})), Complex(0.0, 2.0));
  EXPECT_EQ(q.coefficient(0, Monomial({ModeLabel("y"), ModeLabel("y")})), Complex(-1.0));
}

TEST(FockAmplitudesTest, BosonicFactorAndInverse) {
  PureState s(OperatorPolynomial(2));
  s.poly.add(0, Monomial({ModeLabel("a"), ModeLabel("a")}), 0.5);
  s.poly.add(1, Monomial({ModeLabel("a"), ModeLabel("a")}), 0.25);
  s.poly.add(1, Monomial({ModeLabel("b")}), Complex(0.0, 0.3));
  const auto amps = to_fock_amplitudes(s);
  FockState aa;
  aa.add(ModeLabel("a"), 2);
  EXPECT_NEAR(std::abs(amps.at(aa) - 0.75 * std::sqrt(2.0)), 0.0, 1e-15);
  EXPECT_NEAR(norm_squared(s), 0.75 * 0.75 * 2 + 0.09, 1e-15);
  const auto back = from_fock_amplitudes(amps, 2);
  EXPECT_LT(testing_support::max_abs_diff(to_fock_amplitudes(back), amps), 1e-15);
  PureState t(OperatorPolynomial(3));
  EXPECT_THROW(inner_product(s, t), ValidationError);
}

TEST(DensityOperatorTest, PartialTraceAndFidelity) {
  // (|a H, b H> + |a V, b V>)/sqrt2 traced over b is maximally mixed.
  const InternalMode h{Polarization::horizontal()}, v{Polarization::vertical()};
  PureState s(OperatorPolynomial(1));
  const double r = 1.0 / std::sqrt(2.0);
  s.poly.add(0, Monomial({ModeLabel("a", h), ModeLabel("b", h)}), r);
  s.poly.add(0, Monomial({ModeLabel("a", v), ModeLabel("b", v)}), r);
  const auto rho = partial_trace(s, {"a"});
  EXPECT_EQ(rho.dimension(), 2u);
  EXPECT_TRUE(rho.is_physical());
  EXPECT_NEAR(std::abs(rho.element(ket({ModeLabel("a", h)}), ket({ModeLabel("a", v)}))), 0.0, 1e-15);
  EXPECT_NEAR(rho.element(ket({ModeLabel("a", h)}), ket({ModeLabel("a", h)})).real(), 0.5, 1e-15);

  const auto full = partial_trace(s, {"a", "b"});
  EXPECT_NEAR(fidelity(full, s), 1.0, 1e-15);
  PureState hh(OperatorPolynomial(1));
  hh.poly.add(0, Monomial({ModeLabel("a", h), ModeLabel("b", h)}), 3.0);
  EXPECT_NEAR(fidelity(full, hh), 0.5, 1e-15);
  EXPECT_THROW(partial_trace(s, {}), ValidationError);
}

TEST(DensityOperatorTest, DualRail) {
  PureState s(OperatorPolynomial(1));
  s.poly.add(0, Monomial({ModeLabel("p"), ModeLabel("r")}), 0.6);
  s.poly.add(0, Monomial({ModeLabel("q"), ModeLabel("s")}), 0.8);
  s.poly.add(0, Monomial({ModeLabel("p"), ModeLabel("q")}), 5.0);  // not a qubit pair
  const auto rho = dual_rail(partial_trace(s, {"p", "q", "r", "s"}), {{"p", "q"}, {"r", "s"}});
  ASSERT_EQ(rho.dimension(), 4u);
  EXPECT_NEAR(rho.matrix()(0, 0).real(), 0.36, 1e-15);
  EXPECT_NEAR(rho.matrix()(3, 3).real(), 0.64, 1e-15);
  EXPECT_NEAR(rho.matrix()(0, 3).real(), 0.48, 1e-15);
  PureState empty(OperatorPolynomial(1));
  empty.poly.add(0, Monomial({ModeLabel("x")}), 1.0);
  EXPECT_THROW(dual_rail(partial_trace(empty, {"x"}), {{"p", "q"}}), NumericalError);
}
