#include "mirp/elementary.hpp"

#include <algorithm>
#include <string>

namespace mirp {

void VectorField::check(unsigned i, unsigned k) const {
  if (i > d()) throw InvalidInput("field direction " + std::to_string(i) + " exceeds d");
  if (k > max_order())
    throw OrderUnavailable("derivative order " + std::to_string(k) + " of field " + std::to_string(i) +
                           " exceeds available order " + std::to_string(max_order()));
}

// ---------------------------------------------------------------- polynomials

Polynomial::Polynomial(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

Polynomial Polynomial::constant(const Rational& c) { return Polynomial({c}); }
Polynomial Polynomial::identity() { return Polynomial({Rational(0), Rational(1)}); }

void Polynomial::trim() {
  while (!c_.empty() && sgn(c_.back()) == 0) c_.pop_back();
}

Polynomial Polynomial::derivative(unsigned k) const {
  if (static_cast<int>(k) > degree()) return {};
  std::vector<Rational> out(c_.size() - k);
  for (std::size_t j = k; j < c_.size(); ++j) {
    Rational f = c_[j];
    for (std::size_t r = 0; r < k; ++r) f *= static_cast<long>(j - r);
    out[j - k] = f;
  }
  return Polynomial(std::move(out));
}

double Polynomial::operator()(double y) const {
  double r = 0;
  for (std::size_t j = c_.size(); j-- > 0;) r = r * y + c_[j].get_d();
  return r;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<Rational> out(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t j = 0; j < a.c_.size(); ++j) out[j] += a.c_[j];
  for (std::size_t j = 0; j < b.c_.size(); ++j) out[j] += b.c_[j];
  return Polynomial(std::move(out));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.c_.empty() || b.c_.empty()) return {};
  std::vector<Rational> out(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
  return Polynomial(std::move(out));
}

Polynomial operator*(const Rational& s, const Polynomial& a) {
  std::vector<Rational> out = a.c_;
  for (auto& c : out) c *= s;
  return Polynomial(std::move(out));
}

// ---------------------------------------------------------------- fields

PolynomialField::PolynomialField(std::vector<Polynomial> fields) : fields_(std::move(fields)) {
  if (fields_.size() < 2) throw InvalidInput("a vector field needs a drift and at least one diffusion direction");
  for (const auto& p : fields_) {
    std::vector<std::vector<double>> per_order;
    for (int k = 0; k <= p.degree(); ++k) {
      const Polynomial dk = p.derivative(static_cast<unsigned>(k));
      std::vector<double> c;
      for (const auto& q : dk.coeffs()) c.push_back(q.get_d());
      per_order.push_back(std::move(c));
    }
    numeric_.push_back(std::move(per_order));
  }
}

double PolynomialField::derivative(unsigned i, unsigned k, double y) const {
  check(i, k);
  if (k >= numeric_[i].size()) return 0.0;
  const auto& c = numeric_[i][k];
  double r = 0;
  for (std::size_t j = c.size(); j-- > 0;) r = r * y + c[j];
  return r;
}

ClosureField::ClosureField(std::vector<std::vector<Fn>> derivatives, bool bounded)
    : fns_(std::move(derivatives)), order_(kUnlimitedOrder), bounded_(bounded) {
  if (fns_.size() < 2) throw InvalidInput("a vector field needs a drift and at least one diffusion direction");
  for (const auto& f : fns_) {
    if (f.empty()) throw InvalidInput("each direction needs at least its value");
    order_ = std::min(order_, static_cast<unsigned>(f.size() - 1));
  }
}

double ClosureField::derivative(unsigned i, unsigned k, double y) const {
  check(i, k);
  return fns_[i][k](y);
}

LinearField::LinearField(std::vector<double> slopes) : a_(std::move(slopes)) {
  if (a_.size() < 2) throw InvalidInput("a vector field needs a drift and at least one diffusion direction");
}

double LinearField::derivative(unsigned i, unsigned k, double y) const {
  check(i, k);
  if (k == 0) return a_[i] * y;
  return k == 1 ? a_[i] : 0.0;
}

SmoothTest SmoothTest::identity() {
  return SmoothTest([](unsigned k, double y) { return k == 0 ? y : (k == 1 ? 1.0 : 0.0); });
}

SmoothTest SmoothTest::polynomial(const Polynomial& p) {
  std::vector<Polynomial> ders;
  for (int k = 0; k <= p.degree(); ++k) ders.push_back(p.derivative(static_cast<unsigned>(k)));
  return SmoothTest([ders](unsigned k, double y) { return k < ders.size() ? ders[k](y) : 0.0; });
}

double SmoothTest::operator()(unsigned k, double y) const {
  if (k > order_) throw OrderUnavailable("test function derivative of order " + std::to_string(k) + " unavailable");
  return fn_(k, y);
}

// ---------------------------------------------------------------- Υ

double upsilon(const MultiIndex& m, const VectorField& f, double y) {
  double r = 1;
  for (const auto& e : m.entries()) {
    const double v = f.derivative(e.var.letter, e.var.arity, y);
    for (std::uint32_t p = 0; p < e.freq; ++p) r *= v;
  }
  return r;
}

double upsilon(const Forest& u, const VectorField& f, double y) {
  double r = 1;
  for (const auto& m : u.items()) r *= upsilon(m, f, y);
  return r;
}

double upsilon(const MiSum& s, const VectorField& f, double y) {
  double r = 0;
  for (const auto& [m, c] : s) r += c.get_d() * upsilon(m, f, y);
  return r;
}

double upsilon_vf(const Forest& u, const VectorField& f, const SmoothTest& psi, double y) {
  return upsilon(u, f, y) * psi(static_cast<unsigned>(u.card()), y);
}

double upsilon_vf(const ForestSum& u, const VectorField& f, const SmoothTest& psi, double y) {
  double r = 0;
  for (const auto& [g, c] : u) r += c.get_d() * upsilon_vf(g, f, psi, y);
  return r;
}

namespace {

// Σ c · Υ_f[M] · ψ^{(n)} keyed by (M, n)
using DiffExpr = FormalSum<std::pair<MultiIndex, unsigned>>;

MultiIndex flatten(const Forest& u) {
  MultiIndex m;
  for (const auto& x : u.items()) m = m * x;
  return m;
}

DiffExpr differentiate(const DiffExpr& e) {
  DiffExpr out;
  for (const auto& [key, c] : e) {
    for (const auto& [dm, dc] : derivation(key.first)) out.add({dm, key.second}, c * dc);
    out.add({key.first, key.second + 1}, c);
  }
  return out;
}

double evaluate(const DiffExpr& e, const VectorField& f, const SmoothTest& psi, double y) {
  double r = 0;
  for (const auto& [key, c] : e) r += c.get_d() * upsilon(key.first, f, y) * psi(key.second, y);
  return r;
}

double binomial(unsigned n, unsigned k) {
  double r = 1;
  for (unsigned j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

}  // namespace

double upsilon_compose(const ForestSum& u, const ForestSum& v, const VectorField& f, const SmoothTest& psi,
                       double y) {
  DiffExpr inner;
  for (const auto& [g, c] : v) inner.add({flatten(g), static_cast<unsigned>(g.card())}, c);
  std::size_t max_card = 0;
  for (const auto& [g, c] : u) max_card = std::max(max_card, g.card());
  std::vector<double> inner_derivs;
  DiffExpr cur = inner;
  for (std::size_t k = 0; k <= max_card; ++k) {
    inner_derivs.push_back(evaluate(cur, f, psi, y));
    if (k < max_card) cur = differentiate(cur);
  }
  double r = 0;
  for (const auto& [g, c] : u) r += c.get_d() * upsilon(g, f, y) * inner_derivs[g.card()];
  return r;
}

double upsilon_deshuffle(const ForestSum& u, const VectorField& f, const SmoothTest& phi, const SmoothTest& psi,
                         double y) {
  double r = 0;
  for (const auto& [p, c] : deshuffle(u))
    r += c.get_d() * upsilon_vf(p.first, f, phi, y) * upsilon_vf(p.second, f, psi, y);
  return r;
}

double upsilon_product_test(const ForestSum& u, const VectorField& f, const SmoothTest& phi, const SmoothTest& psi,
                            double y) {
  double r = 0;
  for (const auto& [g, c] : u) {
    const auto n = static_cast<unsigned>(g.card());
    double prod = 0;
    for (unsigned k = 0; k <= n; ++k) prod += binomial(n, k) * phi(k, y) * psi(n - k, y);
    r += c.get_d() * upsilon(g, f, y) * prod;
  }
  return r;
}

// ---------------------------------------------------------------- f^ℓ

TranslatedField::TranslatedField(FieldPtr base, const Translation& ell, unsigned order_cap) : base_(std::move(base)) {
  if (ell.d() != base_->d()) throw InvalidInput("translation and field use different d");
  unsigned arity = 0;
  for (unsigned i = 0; i <= ell.d(); ++i)
    for (const auto& [a, v] : ell[i].values) arity = std::max(arity, a.max_arity());
  if (base_->max_order() != kUnlimitedOrder && base_->max_order() < arity)
    throw OrderUnavailable("field order " + std::to_string(base_->max_order()) +
                           " is below the arity demanded by the translation");
  order_ = base_->max_order() == kUnlimitedOrder ? order_cap : std::min(order_cap, base_->max_order() - arity);
  table_.resize(ell.d() + 1);
  for (unsigned i = 0; i <= ell.d(); ++i)
    for (unsigned k = 0; k <= order_; ++k) table_[i].push_back(ell.generator_image(Var{i, k}));
}

double TranslatedField::derivative(unsigned i, unsigned k, double y) const {
  check(i, k);
  return upsilon(table_[i][k], *base_, y);
}

FieldPtr translated_field(FieldPtr f, const Translation& ell, unsigned order_cap) {
  return std::make_shared<TranslatedField>(std::move(f), ell, order_cap);
}

PolynomialField translate_polynomial(const PolynomialField& f, const Translation& ell) {
  if (ell.d() != f.d()) throw InvalidInput("translation and field use different d");
  std::vector<Polynomial> out;
  for (unsigned i = 0; i <= f.d(); ++i) {
    Polynomial acc;
    for (const auto& [a, v] : ell[i].values) {
      if (sgn(v) == 0) continue;
      Polynomial term = Polynomial::constant(v / Rational(symmetry_factor(a)));
      for (const auto& e : a.entries()) {
        const Polynomial dk = f.fields()[e.var.letter].derivative(e.var.arity);
        for (std::uint32_t p = 0; p < e.freq; ++p) term = term * dk;
      }
      acc = acc + term;
    }
    out.push_back(std::move(acc));
  }
  return PolynomialField(std::move(out));
}

}  // namespace mirp
