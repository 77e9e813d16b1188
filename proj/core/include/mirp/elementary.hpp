#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "mirp/algebra.hpp"
#include "mirp/translation.hpp"

namespace mirp {

struct OrderUnavailable : InvalidInput {
  using InvalidInput::InvalidInput;
};

constexpr unsigned kUnlimitedOrder = std::numeric_limits<unsigned>::max();

// f_i^{(k)}(y) for i in 0..d
class VectorField {
 public:
  virtual ~VectorField() = default;
  virtual unsigned d() const = 0;
  virtual unsigned max_order() const = 0;
  virtual double derivative(unsigned i, unsigned k, double y) const = 0;
  // consumed by globality reports only
  virtual bool bounded() const { return false; }

  double operator()(unsigned i, double y) const { return derivative(i, 0, y); }

 protected:
  void check(unsigned i, unsigned k) const;
};

using FieldPtr = std::shared_ptr<const VectorField>;

// exact rational coefficients, c0 + c1 y + …
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rational> coeffs);
  static Polynomial constant(const Rational& c);
  static Polynomial identity();

  const std::vector<Rational>& coeffs() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  Polynomial derivative(unsigned k = 1) const;
  double operator()(double y) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Rational& s, const Polynomial& a);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

 private:
  void trim();
  std::vector<Rational> c_;
};

class PolynomialField : public VectorField {
 public:
  explicit PolynomialField(std::vector<Polynomial> fields);
  unsigned d() const override { return static_cast<unsigned>(fields_.size()) - 1; }
  unsigned max_order() const override { return kUnlimitedOrder; }
  double derivative(unsigned i, unsigned k, double y) const override;
  const std::vector<Polynomial>& fields() const { return fields_; }

 private:
  std::vector<Polynomial> fields_;
  // derivative coefficient tables in binary64, filled up to each degree
  std::vector<std::vector<std::vector<double>>> numeric_;
};

// user supplies f_i^{(k)} for k = 0..K
class ClosureField : public VectorField {
 public:
  using Fn = std::function<double(double)>;
  ClosureField(std::vector<std::vector<Fn>> derivatives, bool bounded = false);
  unsigned d() const override { return static_cast<unsigned>(fns_.size()) - 1; }
  unsigned max_order() const override { return order_; }
  double derivative(unsigned i, unsigned k, double y) const override;
  bool bounded() const override { return bounded_; }

 private:
  std::vector<std::vector<Fn>> fns_;
  unsigned order_;
  bool bounded_;
};

// f_i(y) = a_i y
class LinearField : public VectorField {
 public:
  explicit LinearField(std::vector<double> slopes);
  unsigned d() const override { return static_cast<unsigned>(a_.size()) - 1; }
  unsigned max_order() const override { return kUnlimitedOrder; }
  double derivative(unsigned i, unsigned k, double y) const override;

 private:
  std::vector<double> a_;
};

// ψ with derivatives ψ^{(k)}
class SmoothTest {
 public:
  using Fn = std::function<double(unsigned, double)>;
  explicit SmoothTest(Fn fn, unsigned max_order = kUnlimitedOrder) : fn_(std::move(fn)), order_(max_order) {}
  static SmoothTest identity();
  static SmoothTest polynomial(const Polynomial& p);

  double operator()(unsigned k, double y) const;
  unsigned max_order() const { return order_; }

 private:
  Fn fn_;
  unsigned order_;
};

// Π f_i^{(k)}(y)^{β(i,k)}, multiplied over forest components
double upsilon(const MultiIndex& m, const VectorField& f, double y);
double upsilon(const Forest& u, const VectorField& f, double y);
double upsilon(const MiSum& s, const VectorField& f, double y);

// Υ_f[u](ψ)(y) = Π Υ_f[β_i](y) ψ^{(card u)}(y)
double upsilon_vf(const Forest& u, const VectorField& f, const SmoothTest& psi, double y);
double upsilon_vf(const ForestSum& u, const VectorField& f, const SmoothTest& psi, double y);

// Υ_f[u](Υ_f[v](ψ))(y), derivatives of the inner function taken symbolically via D
double upsilon_compose(const ForestSum& u, const ForestSum& v, const VectorField& f, const SmoothTest& psi, double y);
// Σ Υ_f[u1](φ) Υ_f[u2](ψ) over the deshuffle of u
double upsilon_deshuffle(const ForestSum& u, const VectorField& f, const SmoothTest& phi, const SmoothTest& psi,
                         double y);
// Υ_f[u](φψ)
double upsilon_product_test(const ForestSum& u, const VectorField& f, const SmoothTest& phi, const SmoothTest& psi,
                            double y);

// f_i^ℓ = Σ ℓ_i(α)/S(α) Υ_f[α], derivatives through ∂^k Υ_f[α] = Υ_f[D^k α]
class TranslatedField : public VectorField {
 public:
  TranslatedField(FieldPtr base, const Translation& ell, unsigned order_cap = 12);
  unsigned d() const override { return base_->d(); }
  unsigned max_order() const override { return order_; }
  double derivative(unsigned i, unsigned k, double y) const override;
  bool bounded() const override { return false; }

 private:
  FieldPtr base_;
  unsigned order_;
  // [i][k] = Σ ℓ_i(α)/S(α) D^k α
  std::vector<std::vector<MiSum>> table_;
};

FieldPtr translated_field(FieldPtr f, const Translation& ell, unsigned order_cap = 12);

// exact f^ℓ for polynomial f
PolynomialField translate_polynomial(const PolynomialField& f, const Translation& ell);

}  // namespace mirp
