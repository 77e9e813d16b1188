#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace mirp {

using Rational = mpq_class;
using Integer = mpz_class;

struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Abstract variable z_(letter, arity). Letter 0 is time.
struct Var {
  std::uint32_t letter = 0;
  std::uint32_t arity = 0;
  friend auto operator<=>(const Var&, const Var&) = default;
};

class MultiIndex {
 public:
  struct Entry {
    Var var;
    std::uint32_t freq = 0;
    friend auto operator<=>(const Entry&, const Entry&) = default;
  };

  MultiIndex() = default;
  explicit MultiIndex(std::vector<Entry> entries);
  static MultiIndex single(std::uint32_t letter, std::uint32_t arity, std::uint32_t freq = 1);

  const std::vector<Entry>& entries() const { return entries_; }
  std::uint32_t freq(Var v) const;
  bool empty() const { return entries_.empty(); }

  unsigned degree() const;
  // |β| − Σ k β(i,k); populated iff this equals 1.
  long population() const;
  bool is_populated() const { return population() == 1; }
  unsigned letter0_count() const;
  std::uint32_t max_letter() const;
  std::uint32_t max_arity() const;

  MultiIndex operator*(const MultiIndex& other) const;
  // One occurrence of v removed; nullopt when v is absent.
  std::optional<MultiIndex> without(Var v) const;
  MultiIndex with(Var v, std::uint32_t count = 1) const;

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<Entry> entries_;
};

class Forest {
 public:
  Forest() = default;
  explicit Forest(MultiIndex m);
  explicit Forest(std::vector<MultiIndex> items);

  const std::vector<MultiIndex>& items() const { return items_; }
  std::size_t card() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  unsigned degree() const;

  Forest operator*(const Forest& other) const;

  friend auto operator<=>(const Forest&, const Forest&) = default;

 private:
  std::vector<MultiIndex> items_;
};

using ForestPair = std::pair<Forest, Forest>;
using ForestMi = std::pair<Forest, MultiIndex>;

template <class B>
class FormalSum {
 public:
  using Map = std::map<B, Rational>;

  FormalSum() = default;
  explicit FormalSum(const B& b, const Rational& c = 1) { add(b, c); }

  void add(const B& b, const Rational& c) {
    if (sgn(c) == 0) return;
    auto [it, inserted] = terms_.try_emplace(b, c);
    if (!inserted) {
      it->second += c;
      if (sgn(it->second) == 0) terms_.erase(it);
    }
  }

  Rational coefficient(const B& b) const {
    auto it = terms_.find(b);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  const Map& terms() const { return terms_; }
  auto begin() const { return terms_.begin(); }
  auto end() const { return terms_.end(); }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  FormalSum& operator+=(const FormalSum& o) {
    for (const auto& [b, c] : o.terms_) add(b, c);
    return *this;
  }
  FormalSum& operator-=(const FormalSum& o) {
    for (const auto& [b, c] : o.terms_) add(b, -c);
    return *this;
  }
  FormalSum& operator*=(const Rational& s) {
    if (sgn(s) == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [b, c] : terms_) c *= s;
    return *this;
  }
  friend FormalSum operator+(FormalSum a, const FormalSum& b) { return a += b; }
  friend FormalSum operator-(FormalSum a, const FormalSum& b) { return a -= b; }
  friend FormalSum operator*(FormalSum a, const Rational& s) { return a *= s; }
  friend FormalSum operator*(const Rational& s, FormalSum a) { return a *= s; }
  friend bool operator==(const FormalSum& a, const FormalSum& b) { return a.terms_ == b.terms_; }

 private:
  Map terms_;
};

using MiSum = FormalSum<MultiIndex>;
using ForestSum = FormalSum<Forest>;

class Grading {
 public:
  Grading(unsigned max_norm, Rational gamma);
  unsigned max_norm() const { return max_norm_; }
  const Rational& gamma() const { return gamma_; }
  unsigned n_gamma() const;

  friend bool operator==(const Grading& a, const Grading& b) {
    return a.max_norm_ == b.max_norm_ && a.gamma_ == b.gamma_;
  }

 private:
  unsigned max_norm_;
  Rational gamma_;
};

MultiIndex mi_product(const MultiIndex& a, const MultiIndex& b);

unsigned degree(const MultiIndex& m);
unsigned degree(const Forest& f);
Rational gamma_degree(const MultiIndex& m, const Rational& gamma);
Rational gamma_degree(const Forest& f, const Rational& gamma);
bool is_populated(const MultiIndex& m);

Integer symmetry_factor(const MultiIndex& m);
Integer symmetry_factor(const Forest& f);

Rational pairing(const ForestSum& u, const ForestSum& v);
Rational pairing(const MiSum& u, const MiSum& v);
Rational pairing(const FormalSum<ForestMi>& u, const FormalSum<ForestMi>& v);
Rational pairing(const FormalSum<ForestPair>& u, const FormalSum<ForestPair>& v);

MiSum derivation(const MultiIndex& m);
MiSum derivation(const MiSum& s);
MiSum derivation_power(const MultiIndex& m, unsigned k);
ForestSum derivation(const Forest& f);
ForestSum derivation(const ForestSum& s);

MiSum mi_product(const MiSum& a, const MiSum& b);
ForestSum forest_product(const ForestSum& a, const ForestSum& b);

// a ▷ b = a · D b
MiSum prelie_graft(const MultiIndex& a, const MultiIndex& b);
MiSum prelie_graft(const MiSum& a, const MiSum& b);

// ⋆₂
ForestSum graft_simultaneous(const Forest& f, const Forest& g);
ForestSum graft_simultaneous(const ForestSum& f, const ForestSum& g);

FormalSum<ForestPair> deshuffle(const Forest& f);
FormalSum<ForestPair> deshuffle(const ForestSum& s);

// ⋆
ForestSum gl_product(const Forest& u, const Forest& v, std::optional<unsigned> trunc = std::nullopt);
ForestSum gl_product(const ForestSum& u, const ForestSum& v,
                     std::optional<unsigned> trunc = std::nullopt);

std::vector<MultiIndex> enumerate_populated(unsigned d, unsigned max_norm);
// All forests of populated multi-indices with degree <= max_norm, ∅ first.
std::vector<Forest> enumerate_forests(unsigned d, unsigned max_norm);

// Text grammar.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t pos);
  std::size_t position;
};

Rational parse_rational(const std::string& text);
std::string format_rational(const Rational& q);
MultiIndex parse_multi_index(const std::string& text);
Forest parse_forest(const std::string& text);
std::string format(const MultiIndex& m);
std::string format(const Forest& f);
std::string format(const ForestPair& p);
std::string format(const ForestMi& p);
ForestSum parse_forest_sum(const std::string& text);

template <class B>
std::string format(const FormalSum<B>& s) {
  if (s.empty()) return "0";
  std::string out;
  for (const auto& [b, c] : s) {
    if (!out.empty()) out += ' ';
    out += sgn(c) < 0 ? "-(" : "+(";
    out += format_rational(abs(c));
    out += ") ";
    out += format(b);
  }
  return out;
}

}  // namespace mirp
