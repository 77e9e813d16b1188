#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "mirp/algebra.hpp"
#include "mirp/translation.hpp"

namespace mirp {

struct UnsupportedLevel : InvalidInput {
  using InvalidInput::InvalidInput;
};

// Numeric tables for one (d, N): populated multi-indices, forests, symmetry
// factors, Grossman–Larson structure constants and the lift recursion.
class Basis {
 public:
  static std::shared_ptr<const Basis> get(unsigned d, unsigned max_norm);

  struct Product {
    std::uint32_t u, v, w;
    double coeff;  // [w](u ⋆ v)
  };
  struct ChenTerm {
    std::uint32_t u, v;
    double weight;
  };
  // one (letter, arity) entry of β and every ordered tuple of populated
  // multi-indices summing to β minus that entry
  struct LiftRule {
    std::uint32_t letter;
    std::vector<std::vector<std::uint32_t>> tuples;
  };

  unsigned d, max_norm;
  // sorted by degree, then canonical order
  std::vector<MultiIndex> mis;
  std::vector<unsigned> mi_degree;
  std::vector<double> mi_sym;
  std::vector<std::uint32_t> mi_forest;
  // ∅ first
  std::vector<Forest> forests;
  std::vector<std::vector<std::uint32_t>> forest_components;
  std::vector<double> forest_sym;
  std::vector<unsigned> forest_degree;
  std::vector<Product> products;
  std::vector<std::vector<ChenTerm>> chen;
  std::vector<std::vector<LiftRule>> lift_rules;

  std::optional<std::size_t> index(const MultiIndex& m) const;
  std::optional<std::size_t> forest_index(const Forest& f) const;

  Basis(unsigned d, unsigned max_norm);

 private:
  std::map<MultiIndex, std::size_t> mi_lookup_;
  std::map<Forest, std::size_t> forest_lookup_;
};

// Real values on the populated basis of one grading.
class GradedValues {
 public:
  GradedValues(unsigned d, Grading g);
  GradedValues(std::shared_ptr<const Basis> basis, Rational gamma);

  const Basis& basis() const { return *basis_; }
  const std::shared_ptr<const Basis>& basis_ptr() const { return basis_; }
  Grading grading() const { return Grading(basis_->max_norm, gamma_); }
  const Rational& gamma() const { return gamma_; }
  unsigned d() const { return basis_->d; }
  std::size_t size() const { return values_.size(); }

  double operator()(const MultiIndex& m) const;
  void set(const MultiIndex& m, double x);
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  bool same_grading(const GradedValues& o) const { return basis_ == o.basis_ && gamma_ == o.gamma_; }
  friend bool operator==(const GradedValues& a, const GradedValues& b) {
    return a.same_grading(b) && a.values_ == b.values_;
  }

 private:
  std::size_t require(const MultiIndex& m) const;

  std::shared_ptr<const Basis> basis_;
  Rational gamma_;
  std::vector<double> values_;
};

// Character; the identity when all stored values are 0.
class GroupElement : public GradedValues {
 public:
  using GradedValues::GradedValues;
};

// Primitive element; vanishes on forests with two or more components.
class LieElement : public GradedValues {
 public:
  using GradedValues::GradedValues;
};

double char_eval(const GroupElement& x, const Forest& f);
GroupElement chen_compose(const GroupElement& a, const GroupElement& b);

// Forest-indexed coefficients of Σ X(u)/S(u) u, and back.
std::vector<double> forest_coefficients(const GroupElement& x);
std::vector<double> gl_multiply(const Basis& basis, const std::vector<double>& a, const std::vector<double>& b);

LieElement log_element(const GroupElement& x);
GroupElement exp_element(const LieElement& l);
// log coefficients on every basis forest, for checking primitivity
std::vector<double> log_coefficients(const GroupElement& x);

class RoughPathGrid {
 public:
  RoughPathGrid(std::vector<double> times, std::vector<GroupElement> increments);

  const std::vector<double>& times() const { return times_; }
  const std::vector<GroupElement>& increments() const { return increments_; }
  unsigned d() const { return increments_.front().d(); }
  Grading grading() const { return increments_.front().grading(); }
  const Basis& basis() const { return increments_.front().basis(); }

  // X between grid points i < j, left-to-right Chen composition
  GroupElement between(std::size_t i, std::size_t j) const;
  // X_{s,t} for grid times s <= t
  GroupElement at(double s, double t) const;
  std::size_t grid_index(double t) const;

  friend bool operator==(const RoughPathGrid& a, const RoughPathGrid& b) {
    return a.times_ == b.times_ && a.increments_ == b.increments_;
  }

 private:
  std::vector<double> times_;
  std::vector<GroupElement> increments_;
};

double rp_norm(const RoughPathGrid& p);
// per basis forest: sup over grid pairs of (|X_{s,t}(u)| / |t-s|^{|u|_γ})^{1/|u|}; ∅ entry is 0
std::vector<double> rp_norm_terms(const RoughPathGrid& p);
// the same norm for the logarithms of the grid increments
double rp_norm_log(const RoughPathGrid& p);

// samples: rows (t, x1, …, xd)
RoughPathGrid lift_piecewise_linear(const std::vector<std::vector<double>>& samples, const Grading& g);
GroupElement lift_segment(const std::vector<double>& dx, const std::shared_ptr<const Basis>& basis,
                          const Rational& gamma);

enum class BrownianMode { ito, strat };

struct BrownianConfig {
  unsigned d = 1;
  double horizon = 1;
  std::size_t n_steps = 1024;
  std::uint64_t seed = 0;
  BrownianMode mode = BrownianMode::strat;
  // lattice steps per output increment
  std::size_t stride = 1;
};

RoughPathGrid lift_brownian(const BrownianConfig& cfg, const Grading& g);
// generator name written into provenance headers
const char* brownian_generator_name();

// (T_ℓ X)(z^β) = X(M_ℓ z^β) on every increment
RoughPathGrid translate_roughpath(const Translation& ell, const RoughPathGrid& p, const Grading& out);
// γ / N_ℓ with truncation ⌊N_ℓ / γ⌋
Grading translated_grading(const Translation& ell, const Rational& gamma);

}  // namespace mirp
