#pragma once

#include <map>
#include <memory>
#include <vector>

#include "mirp/algebra.hpp"

namespace mirp {

// Linear functional on populated multi-indices for one direction, extended
// multiplicatively to forests; value 1 on ∅.
struct Character {
  std::uint32_t direction = 0;
  std::map<MultiIndex, Rational> values;

  Rational operator()(const MultiIndex& m) const;
  Rational operator()(const Forest& f) const;

  // Largest γ-degree over the support, ignoring the identity key z_(direction,0).
  Rational support_bound(const Rational& gamma) const;
  std::uint32_t max_letter() const;

  static Character identity(std::uint32_t direction);
};

// One character per direction 0..d; directions not listed act as the identity.
class Translation {
 public:
  Translation(std::vector<Character> chars, unsigned d);
  const Character& operator[](std::uint32_t i) const { return chars_.at(i); }
  unsigned d() const { return d_; }
  // Integer N with every ℓ_i vanishing above γ-degree N (ceil of the support bound, at least 1).
  unsigned support_norm(const Rational& gamma) const;
  // Image of z_(i,k): Σ ℓ_i(α)/S(α) D^k α
  MiSum generator_image(Var v) const;

 private:
  std::vector<Character> chars_;
  unsigned d_;
};

Character ito_strat_character(unsigned d);

// ▶
MiSum insert_prelie(const MultiIndex& a, const MultiIndex& b);
// ⋆₁; ∅ ⋆₁ a = a exactly when a has no letter-0 variable
MiSum insert_simultaneous(const Forest& f, const MultiIndex& a);
ForestSum insert_simultaneous(const Forest& f, const Forest& g);

// T_ℓ by generator substitution, truncated at degree `trunc`.
MiSum translate(const Translation& ell, const MultiIndex& m, unsigned trunc);
ForestSum translate(const Translation& ell, const Forest& f, unsigned trunc);
ForestSum translate(const Translation& ell, const ForestSum& u, unsigned trunc);

// T⁰_ℓ through Σ ℓ(F)/S(F) F ⋆₁ z^β for a direction-0 character.
MiSum translate_by_insertion(const Character& ell0, const MultiIndex& m, unsigned trunc);

// Δ⁻ by the extraction-contraction procedure.
FormalSum<ForestMi> coproduct_minus(const MultiIndex& b);
// Δ⁻ for every populated b of degree <= max_norm, by transposing ⋆₁ against the basis.
std::map<MultiIndex, FormalSum<ForestMi>> coproduct_minus_by_transpose(unsigned d, unsigned max_norm);

// (ℓ ⊗ id)
MiSum contract_left(const Character& ell, const FormalSum<ForestMi>& s);

// M_ℓ as the transpose of T_ℓ over the populated basis of degree <= max_norm.
class DualTranslation {
 public:
  DualTranslation(const Translation& ell, unsigned max_norm);
  const MiSum& operator()(const MultiIndex& target) const;
  unsigned max_norm() const { return max_norm_; }
  const std::map<MultiIndex, MiSum>& table() const { return table_; }

 private:
  unsigned max_norm_;
  std::map<MultiIndex, MiSum> table_;
};

MiSum m_ell(const Translation& ell, const MultiIndex& b, unsigned trunc);

}  // namespace mirp
