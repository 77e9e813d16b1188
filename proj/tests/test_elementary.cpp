#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mirp/elementary.hpp"
#include "oracle.hpp"

using namespace mirp;

namespace {

MultiIndex mi(const std::string& s) { return parse_multi_index(s); }
Forest fo(const std::string& s) { return parse_forest(s); }

Polynomial poly(std::initializer_list<long> c) {
  std::vector<Rational> v;
  for (long x : c) v.emplace_back(x);
  return Polynomial(v);
}

ForestSum single(const Forest& f) {
  ForestSum s;
  s.add(f, Rational(1));
  return s;
}

// f0 = 1 + y, f1 = y², f2 = y - y³/2
PolynomialField sample_field() {
  return PolynomialField({poly({1, 1}), poly({0, 0, 1}), Polynomial({Rational(0), Rational(1), Rational(0), Rational(-1, 2)})});
}

// non-polynomial field with every derivative available
ClosureField trig_field() {
  using Fn = ClosureField::Fn;
  std::vector<Fn> s, c, e;
  for (int k = 0; k < 16; ++k) {
    s.push_back([k](double y) { return std::sin(y + k * M_PI / 2); });
    c.push_back([k](double y) { return std::cos(y + k * M_PI / 2); });
    e.push_back([k](double y) { return k == 0 ? 0.5 * std::exp(0.3 * y) : 0.5 * std::pow(0.3, k) * std::exp(0.3 * y); });
  }
  return ClosureField({e, s, c}, false);
}

SmoothTest exp_test() {
  return SmoothTest([](unsigned k, double y) { return std::pow(0.7, k) * std::exp(0.7 * y); });
}

SmoothTest sin_test() {
  return SmoothTest([](unsigned k, double y) { return std::sin(2 * y + k * M_PI / 2) * std::pow(2.0, k); });
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

TEST(PolynomialTest, Arithmetic) {
  const Polynomial p = poly({1, 2, 3});
  EXPECT_EQ(p.derivative(), poly({2, 6}));
  EXPECT_EQ(p.derivative(2), poly({6}));
  EXPECT_EQ(p.derivative(3), Polynomial());
  EXPECT_EQ(p * poly({0, 1}), poly({0, 1, 2, 3}));
  EXPECT_EQ(p + poly({-1, 0, -3}), poly({0, 2}));
  EXPECT_EQ(p + poly({-1, -2, -3}).derivative(5), p);
  EXPECT_EQ(poly({0, 0, 0}).degree(), -1);
  EXPECT_DOUBLE_EQ(p(2.0), 17.0);
}

TEST(VectorFieldTest, PolynomialDerivatives) {
  const PolynomialField f = sample_field();
  EXPECT_EQ(f.d(), 2u);
  EXPECT_DOUBLE_EQ(f.derivative(1, 1, 3.0), 6.0);
  EXPECT_DOUBLE_EQ(f.derivative(2, 3, 3.0), -3.0);
  EXPECT_DOUBLE_EQ(f.derivative(2, 9, 3.0), 0.0);
  EXPECT_THROW(f.derivative(3, 0, 1.0), InvalidInput);
}

TEST(VectorFieldTest, ClosureOrderLimit) {
  ClosureField f({{[](double y) { return y; }}, {[](double y) { return 2 * y; }, [](double) { return 2.0; }}}, true);
  EXPECT_EQ(f.max_order(), 0u);
  EXPECT_TRUE(f.bounded());
  EXPECT_DOUBLE_EQ(f(1, 3.0), 6.0);
  EXPECT_THROW(f.derivative(1, 1, 3.0), OrderUnavailable);
  EXPECT_THROW(ClosureField({{[](double y) { return y; }}}), InvalidInput);
}

TEST(VectorFieldTest, Linear) {
  LinearField f({0.5, 2.0});
  EXPECT_DOUBLE_EQ(f(0, 4.0), 2.0);
  EXPECT_DOUBLE_EQ(f.derivative(1, 1, 4.0), 2.0);
  EXPECT_DOUBLE_EQ(f.derivative(1, 2, 4.0), 0.0);
}

TEST(UpsilonTest, Examples) {
  // f1 = y², z(1,0)z(1,1) -> f1 f1' = 2y³
  const PolynomialField f = sample_field();
  EXPECT_DOUBLE_EQ(upsilon(mi("z(1,0)z(1,1)"), f, 2.0), 16.0);
  EXPECT_DOUBLE_EQ(upsilon(MultiIndex(), f, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(upsilon(mi("z(1,0)^2z(1,2)"), f, 2.0), 32.0);
  EXPECT_DOUBLE_EQ(upsilon(Forest(), f, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(upsilon(fo("z(1,0)*z(0,0)"), f, 2.0), 12.0);
}

TEST(UpsilonTest, VectorFieldAction) {
  // ψ = y², f1 = y: Υ[z(1,0)](ψ) = f1 ψ' = 2y²
  const PolynomialField f({poly({0}), poly({0, 1})});
  const SmoothTest psi = SmoothTest::polynomial(poly({0, 0, 1}));
  EXPECT_DOUBLE_EQ(upsilon_vf(fo("z(1,0)"), f, psi, 3.0), 18.0);
  EXPECT_DOUBLE_EQ(upsilon_vf(fo("z(1,0)*z(1,0)"), f, SmoothTest::identity(), 3.0), 0.0);
  EXPECT_DOUBLE_EQ(upsilon_vf(Forest(), f, psi, 3.0), 9.0);
}

TEST(UpsilonTest, CompositionIsGlProduct) {
  const auto forests = enumerate_forests(2, 3);
  const PolynomialField pf = sample_field();
  const ClosureField cf = trig_field();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pick(-1.5, 1.5);
  std::size_t checked = 0;
  for (const VectorField* f : {static_cast<const VectorField*>(&pf), static_cast<const VectorField*>(&cf)})
    for (const auto& u : forests)
      for (const auto& v : forests) {
        if (u.degree() + v.degree() > 4) continue;
        const ForestSum prod = gl_product(u, v);
        for (int p = 0; p < 3; ++p) {
          const double y = pick(rng);
          const double lhs = upsilon_compose(single(u), single(v), *f, exp_test(), y);
          const double rhs = upsilon_vf(prod, *f, exp_test(), y);
          ASSERT_TRUE(close(lhs, rhs, 1e-9)) << format(u) << " * " << format(v) << " at " << y << ": " << lhs
                                              << " vs " << rhs;
          ++checked;
        }
      }
  EXPECT_GT(checked, 100u);
}

TEST(UpsilonTest, DeshuffleIsLeibniz) {
  const ClosureField f = trig_field();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> pick(-2.0, 2.0);
  for (const auto& u : enumerate_forests(2, 4)) {
    for (int p = 0; p < 10; ++p) {
      const double y = pick(rng);
      const double lhs = upsilon_product_test(single(u), f, exp_test(), sin_test(), y);
      const double rhs = upsilon_deshuffle(single(u), f, exp_test(), sin_test(), y);
      ASSERT_TRUE(close(lhs, rhs, 1e-9)) << format(u);
    }
  }
}

TEST(UpsilonTest, DerivationIsDerivative) {
  // ∂ Υ[β] = Υ[Dβ]
  const ClosureField f = trig_field();
  for (const auto& b : enumerate_populated(2, 4))
    for (double y : {-1.2, 0.3, 0.9}) {
      const double h = 1e-5;
      const double fd = (upsilon(b, f, y + h) - upsilon(b, f, y - h)) / (2 * h);
      ASSERT_NEAR(upsilon(derivation(b), f, y), fd, 1e-6 * std::max(1.0, std::abs(fd))) << format(b);
    }
}

TEST(TranslatedFieldTest, IdentityTranslation) {
  const FieldPtr f = std::make_shared<PolynomialField>(sample_field());
  const auto g = translated_field(f, Translation({}, 2));
  for (double y : {-1.0, 0.5, 2.0})
    for (unsigned i = 0; i <= 2; ++i)
      for (unsigned k = 0; k <= 4; ++k) EXPECT_DOUBLE_EQ(g->derivative(i, k, y), f->derivative(i, k, y));
}

TEST(TranslatedFieldTest, ItoStratDrift) {
  // f0 + ½ Σ f_j f_j'
  const PolynomialField f = sample_field();
  const PolynomialField g = translate_polynomial(f, Translation({ito_strat_character(2)}, 2));
  Polynomial expect = f.fields()[0];
  for (unsigned j = 1; j <= 2; ++j)
    expect = expect + Rational(1, 2) * (f.fields()[j] * f.fields()[j].derivative());
  EXPECT_EQ(g.fields()[0], expect);
  EXPECT_EQ(g.fields()[1], f.fields()[1]);
  EXPECT_EQ(g.fields()[2], f.fields()[2]);
}

TEST(TranslatedFieldTest, MatchesExactPolynomial) {
  Character c0 = Character::identity(0);
  c0.values[mi("z(1,0)")] = Rational(2);
  c0.values[mi("z(2,0)z(2,1)")] = Rational(-1, 3);
  Character c1 = Character::identity(1);
  c1.values[mi("z(2,0)")] = Rational(1, 2);
  c1.values[mi("z(1,0)z(2,1)")] = Rational(3);
  const Translation ell({c0, c1}, 2);
  const PolynomialField exact = translate_polynomial(sample_field(), ell);
  const auto numeric = translated_field(std::make_shared<PolynomialField>(sample_field()), ell);
  for (double y : {-1.3, 0.0, 0.4, 1.7})
    for (unsigned i = 0; i <= 2; ++i)
      for (unsigned k = 0; k <= 5; ++k)
        EXPECT_TRUE(close(numeric->derivative(i, k, y), exact.derivative(i, k, y), 1e-12)) << i << " " << k;
}

TEST(TranslatedFieldTest, DerivativesMatchFiniteDifferences) {
  const auto g = translated_field(std::make_shared<ClosureField>(trig_field()),
                                  Translation({ito_strat_character(2)}, 2));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pick(-2.0, 2.0);
  const double h = 1e-5;
  for (int p = 0; p < 20; ++p) {
    const double y = pick(rng);
    for (unsigned i = 0; i <= 2; ++i)
      for (unsigned k = 0; k < 4; ++k) {
        const double fd = (g->derivative(i, k, y + h) - g->derivative(i, k, y - h)) / (2 * h);
        const double an = g->derivative(i, k + 1, y);
        ASSERT_LE(std::abs(fd - an), 1e-6 * std::max(1.0, std::abs(an))) << i << " " << k << " at " << y;
      }
  }
}

TEST(TranslatedFieldTest, OrderBudget) {
  const auto f = std::make_shared<ClosureField>(trig_field());
  const auto g = translated_field(f, Translation({ito_strat_character(2)}, 2), 20);
  EXPECT_EQ(g->max_order(), 14u);
  EXPECT_THROW(g->derivative(0, 15, 0.0), OrderUnavailable);
  ClosureField flat({{[](double y) { return y; }}, {[](double y) { return y; }}});
  EXPECT_THROW(translated_field(std::make_shared<ClosureField>(flat), Translation({ito_strat_character(1)}, 1)),
               OrderUnavailable);
  EXPECT_THROW(translated_field(f, Translation({ito_strat_character(1)}, 1)), InvalidInput);
}
