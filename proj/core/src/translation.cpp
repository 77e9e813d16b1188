#include "mirp/translation.hpp"

#include <algorithm>
#include <functional>

namespace mirp {

// ---------------------------------------------------------------- characters

Rational Character::operator()(const MultiIndex& m) const {
  auto it = values.find(m);
  return it == values.end() ? Rational(0) : it->second;
}

Rational Character::operator()(const Forest& f) const {
  Rational r = 1;
  for (const auto& m : f.items()) {
    r *= (*this)(m);
    if (sgn(r) == 0) break;
  }
  return r;
}

Rational Character::support_bound(const Rational& gamma) const {
  const MultiIndex ident = MultiIndex::single(direction, 0);
  Rational best = 0;
  for (const auto& [m, v] : values) {
    if (m == ident || sgn(v) == 0) continue;
    best = std::max(best, gamma_degree(m, gamma));
  }
  return best;
}

std::uint32_t Character::max_letter() const {
  std::uint32_t r = direction;
  for (const auto& [m, v] : values) r = std::max(r, m.max_letter());
  return r;
}

Character Character::identity(std::uint32_t direction) {
  Character c;
  c.direction = direction;
  c.values[MultiIndex::single(direction, 0)] = 1;
  return c;
}

Character ito_strat_character(unsigned d) {
  Character c = Character::identity(0);
  for (std::uint32_t i = 1; i <= d; ++i)
    c.values[MultiIndex({{Var{i, 0}, 1}, {Var{i, 1}, 1}})] = Rational(1, 2);
  return c;
}

Translation::Translation(std::vector<Character> chars, unsigned d) : d_(d) {
  chars_.reserve(d + 1);
  for (std::uint32_t i = 0; i <= d; ++i) chars_.push_back(Character::identity(i));
  for (auto& c : chars) {
    if (c.direction > d) throw InvalidInput("character direction exceeds d");
    if (c.max_letter() > d) throw InvalidInput("character support uses a letter beyond d");
    for (const auto& [m, v] : c.values)
      if (!m.is_populated()) throw InvalidInput("character key " + format(m) + " is not populated");
    chars_[c.direction] = std::move(c);
  }
}

unsigned Translation::support_norm(const Rational& gamma) const {
  Rational best = 1;
  for (const auto& c : chars_) best = std::max(best, c.support_bound(gamma));
  Integer q = best.get_num() / best.get_den();
  if (q * best.get_den() != best.get_num()) q += 1;
  return static_cast<unsigned>(q.get_ui());
}

MiSum Translation::generator_image(Var v) const {
  const Character& c = chars_.at(v.letter);
  MiSum out;
  for (const auto& [alpha, val] : c.values) {
    if (sgn(val) == 0) continue;
    out += derivation_power(alpha, v.arity) * (val / Rational(symmetry_factor(alpha)));
  }
  return out;
}

// ---------------------------------------------------------------- insertion

namespace {

// (arity, frequency) of each letter-0 variable
std::vector<std::pair<std::uint32_t, std::uint32_t>> letter0_profile(const MultiIndex& a) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (const auto& e : a.entries())
    if (e.var.letter == 0) out.push_back({e.var.arity, e.freq});
  return out;
}

MultiIndex strip_letter0(const MultiIndex& a) {
  std::vector<MultiIndex::Entry> es;
  for (const auto& e : a.entries())
    if (e.var.letter != 0) es.push_back(e);
  return MultiIndex(es);
}

MiSum truncate(const MiSum& s, unsigned trunc) {
  MiSum out;
  for (const auto& [m, c] : s)
    if (m.degree() <= trunc) out.add(m, c);
  return out;
}

}  // namespace

MiSum insert_prelie(const MultiIndex& a, const MultiIndex& b) {
  MiSum out;
  for (const auto& e : b.entries()) {
    if (e.var.letter != 0) continue;
    MultiIndex rest = *b.without(e.var);
    for (const auto& [t, c] : derivation_power(a, e.var.arity)) out.add(t * rest, c * e.freq);
  }
  return out;
}

MiSum insert_simultaneous(const Forest& f, const MultiIndex& a) {
  const std::size_t n = f.card();
  const unsigned zeros = a.letter0_count();
  if (n == 0) return zeros == 0 ? MiSum(a) : MiSum{};
  if (n != zeros) return {};

  const MultiIndex rest = strip_letter0(a);
  const auto& beta = f.items();
  MiSum out;
  // assign components to letter-0 occurrences one at a time; the multiplicity
  // factor is the frequency still available, as in repeated partial derivatives
  std::vector<std::pair<std::uint32_t, std::uint32_t>> avail = letter0_profile(a);
  std::function<void(std::size_t, MiSum, Integer)> rec = [&](std::size_t i, MiSum acc, Integer mult) {
    if (i == n) {
      out += acc * Rational(mult);
      return;
    }
    for (auto& slot : avail) {
      if (slot.second == 0) continue;
      const Integer m = mult * slot.second;
      --slot.second;
      rec(i + 1, mi_product(acc, derivation_power(beta[i], slot.first)), m);
      ++slot.second;
    }
  };
  rec(0, MiSum(rest), Integer(1));
  return out;
}

ForestSum insert_simultaneous(const Forest& f, const Forest& g) {
  if (g.empty()) return f.empty() ? ForestSum(Forest{}) : ForestSum{};
  const auto& beta = f.items();
  const auto& alpha = g.items();
  const std::size_t n = beta.size(), m = alpha.size();
  ForestSum out;
  std::vector<std::size_t> sigma(n, 0);
  while (true) {
    std::vector<std::vector<MultiIndex>> groups(m);
    for (std::size_t i = 0; i < n; ++i) groups[sigma[i]].push_back(beta[i]);
    ForestSum acc(Forest{});
    for (std::size_t j = 0; j < m && !acc.empty(); ++j) {
      ForestSum piece;
      for (const auto& [t, c] : insert_simultaneous(Forest(groups[j]), alpha[j])) piece.add(Forest(t), c);
      acc = forest_product(acc, piece);
    }
    out += acc;
    std::size_t pos = 0;
    while (pos < n && ++sigma[pos] == m) sigma[pos++] = 0;
    if (pos == n) break;
  }
  return out;
}

// ---------------------------------------------------------------- T_ℓ

MiSum translate(const Translation& ell, const MultiIndex& m, unsigned trunc) {
  MiSum acc(MultiIndex{});
  for (const auto& e : m.entries()) {
    const MiSum img = ell.generator_image(e.var);
    for (std::uint32_t r = 0; r < e.freq; ++r) acc = truncate(mi_product(acc, img), trunc);
  }
  return acc;
}

ForestSum translate(const Translation& ell, const Forest& f, unsigned trunc) {
  ForestSum acc(Forest{});
  for (const auto& m : f.items()) {
    ForestSum piece;
    for (const auto& [t, c] : translate(ell, m, trunc)) piece.add(Forest(t), c);
    ForestSum next;
    for (const auto& [x, c] : forest_product(acc, piece))
      if (x.degree() <= trunc) next.add(x, c);
    acc = std::move(next);
  }
  return acc;
}

ForestSum translate(const Translation& ell, const ForestSum& u, unsigned trunc) {
  ForestSum out;
  for (const auto& [f, c] : u) out += translate(ell, f, trunc) * c;
  return out;
}

MiSum translate_by_insertion(const Character& ell0, const MultiIndex& m, unsigned trunc) {
  const unsigned n = m.letter0_count();
  std::vector<std::pair<MultiIndex, Rational>> support;
  for (const auto& [k, v] : ell0.values)
    if (sgn(v) != 0) support.push_back({k, v});
  MiSum out;
  std::vector<MultiIndex> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (cur.size() == n) {
      Forest f(cur);
      Rational w = ell0(f) / Rational(symmetry_factor(f));
      out += insert_simultaneous(f, m) * w;
      return;
    }
    for (std::size_t i = start; i < support.size(); ++i) {
      cur.push_back(support[i].first);
      rec(i);
      cur.pop_back();
    }
  };
  rec(0);
  return truncate(out, trunc);
}

// ---------------------------------------------------------------- Δ⁻

namespace {

using Counts = std::vector<std::uint32_t>;

// preimages β under D^k of the monomial m, with weight [m](D^k β)
std::map<MultiIndex, Integer> lower(const MultiIndex& m, unsigned k) {
  std::map<MultiIndex, Integer> cur{{m, Integer(1)}};
  for (unsigned step = 0; step < k; ++step) {
    std::map<MultiIndex, Integer> next;
    for (const auto& [x, w] : cur) {
      for (const auto& e : x.entries()) {
        if (e.var.arity == 0) continue;
        MultiIndex y = x.without(e.var)->with(Var{e.var.letter, e.var.arity - 1});
        // D y hits x with coefficient y(i, j-1)
        next[y] += w * y.freq(Var{e.var.letter, e.var.arity - 1});
      }
    }
    cur = std::move(next);
  }
  return cur;
}

MultiIndex from_counts(const std::vector<Var>& vars, const Counts& c) {
  std::vector<MultiIndex::Entry> es;
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (c[i]) es.push_back({vars[i], c[i]});
  return MultiIndex(es);
}

Integer factorial_ui(unsigned long n) {
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

}  // namespace

FormalSum<ForestMi> coproduct_minus(const MultiIndex& b) {
  std::vector<Var> vars;
  Counts total;
  for (const auto& e : b.entries()) {
    vars.push_back(e.var);
    total.push_back(e.freq);
  }
  const std::size_t nv = vars.size();

  // accumulated Σ Π weights over ordered extraction sequences, keyed by (F, a)
  std::map<ForestMi, Integer> acc;

  std::function<void(const Counts&, const MultiIndex&, std::vector<MultiIndex>&, std::vector<unsigned>&,
                     const Integer&)>
      extract = [&](const Counts& remaining, const MultiIndex& kept, std::vector<MultiIndex>& forest,
                    std::vector<unsigned>& ks, const Integer& weight) {
        bool done = std::all_of(remaining.begin(), remaining.end(), [](auto x) { return x == 0; });
        if (done) {
          if (forest.empty()) return;
          MultiIndex a = kept;
          for (unsigned k : ks) a = a.with(Var{0, k});
          acc[{Forest(forest), a}] += weight;
          return;
        }
        // next block: any nonempty sub-multiset of what remains
        Counts block(nv, 0);
        while (true) {
          std::size_t pos = 0;
          while (pos < nv && ++block[pos] > remaining[pos]) block[pos++] = 0;
          if (pos == nv) break;
          MultiIndex piece = from_counts(vars, block);
          const long pop = piece.population();
          if (pop > 1) continue;
          const unsigned k = static_cast<unsigned>(1 - pop);
          Counts rest = remaining;
          for (std::size_t i = 0; i < nv; ++i) rest[i] -= block[i];
          for (const auto& [beta, w] : lower(piece, k)) {
            forest.push_back(beta);
            ks.push_back(k);
            extract(rest, kept, forest, ks, weight * w);
            forest.pop_back();
            ks.pop_back();
          }
        }
      };

  // the kept part is letter-0 free; everything else is extracted
  Counts kept(nv, 0);
  while (true) {
    std::vector<MultiIndex> forest;
    std::vector<unsigned> ks;
    Counts remaining = total;
    for (std::size_t i = 0; i < nv; ++i) remaining[i] -= kept[i];
    extract(remaining, from_counts(vars, kept), forest, ks, Integer(1));
    std::size_t pos = 0;
    while (pos < nv && (vars[pos].letter == 0 || ++kept[pos] > total[pos])) kept[pos++] = 0;
    if (pos == nv) break;
  }

  FormalSum<ForestMi> out;
  const Integer sb = symmetry_factor(b);
  for (const auto& [key, w] : acc) {
    const Forest& f = key.first;
    const MultiIndex& a = key.second;
    // ordered sequences visit each listing of F; divide by the number of listings
    Integer listings = factorial_ui(f.card());
    const auto& it = f.items();
    for (std::size_t i = 0; i < it.size();) {
      std::size_t j = i;
      while (j < it.size() && it[j] == it[i]) ++j;
      listings /= factorial_ui(j - i);
      i = j;
    }
    Integer deriv = 1;
    for (const auto& e : a.entries())
      if (e.var.letter == 0) deriv *= factorial_ui(e.freq);
    Rational coeff(w * deriv, listings);
    coeff.canonicalize();
    coeff *= Rational(sb) / Rational(symmetry_factor(f) * symmetry_factor(a));
    out.add(key, coeff);
  }
  if (b.letter0_count() == 0) out.add({Forest{}, b}, 1);
  return out;
}

std::map<MultiIndex, FormalSum<ForestMi>> coproduct_minus_by_transpose(unsigned d, unsigned max_norm) {
  std::map<MultiIndex, FormalSum<ForestMi>> table;
  const auto mis = enumerate_populated(d, max_norm);
  const auto forests = enumerate_forests(d, max_norm);
  for (const auto& a : mis) {
    const unsigned n = a.letter0_count();
    for (const auto& f : forests) {
      if (f.card() != n) continue;
      if (f.degree() + a.degree() > max_norm + n) continue;
      const Rational sfa(symmetry_factor(f) * symmetry_factor(a));
      for (const auto& [b, c] : insert_simultaneous(f, a)) {
        if (b.degree() > max_norm) continue;
        table[b].add({f, a}, c * Rational(symmetry_factor(b)) / sfa);
      }
    }
  }
  return table;
}

MiSum contract_left(const Character& ell, const FormalSum<ForestMi>& s) {
  MiSum out;
  for (const auto& [key, c] : s) out.add(key.second, c * ell(key.first));
  return out;
}

// ---------------------------------------------------------------- M_ℓ

DualTranslation::DualTranslation(const Translation& ell, unsigned max_norm) : max_norm_(max_norm) {
  for (const auto& beta : enumerate_populated(ell.d(), max_norm)) {
    const Rational sb(symmetry_factor(beta));
    for (const auto& [g, c] : translate(ell, beta, max_norm))
      table_[g].add(beta, c * Rational(symmetry_factor(g)) / sb);
  }
}

const MiSum& DualTranslation::operator()(const MultiIndex& target) const {
  static const MiSum kZero;
  if (target.degree() > max_norm_)
    throw InvalidInput("dual translation requested above its truncation: " + format(target));
  auto it = table_.find(target);
  return it == table_.end() ? kZero : it->second;
}

MiSum m_ell(const Translation& ell, const MultiIndex& b, unsigned trunc) {
  if (b.degree() > trunc) throw InvalidInput("multi-index exceeds truncation");
  return DualTranslation(ell, trunc)(b);
}

}  // namespace mirp
