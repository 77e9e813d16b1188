#include "mirp/algebra.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace mirp {

// ---------------------------------------------------------------- MultiIndex

MultiIndex::MultiIndex(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.var < b.var; });
  for (const auto& e : entries) {
    if (e.freq == 0) continue;
    if (!entries_.empty() && entries_.back().var == e.var)
      entries_.back().freq += e.freq;
    else
      entries_.push_back(e);
  }
}

MultiIndex MultiIndex::single(std::uint32_t letter, std::uint32_t arity, std::uint32_t freq) {
  return MultiIndex({Entry{Var{letter, arity}, freq}});
}

std::uint32_t MultiIndex::freq(Var v) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), v,
                             [](const Entry& e, const Var& x) { return e.var < x; });
  return (it != entries_.end() && it->var == v) ? it->freq : 0;
}

unsigned MultiIndex::degree() const {
  unsigned n = 0;
  for (const auto& e : entries_) n += e.freq;
  return n;
}

long MultiIndex::population() const {
  long p = 0;
  for (const auto& e : entries_)
    p += static_cast<long>(e.freq) - static_cast<long>(e.var.arity) * static_cast<long>(e.freq);
  return p;
}

unsigned MultiIndex::letter0_count() const {
  unsigned n = 0;
  for (const auto& e : entries_)
    if (e.var.letter == 0) n += e.freq;
  return n;
}

std::uint32_t MultiIndex::max_letter() const {
  std::uint32_t m = 0;
  for (const auto& e : entries_) m = std::max(m, e.var.letter);
  return m;
}

std::uint32_t MultiIndex::max_arity() const {
  std::uint32_t m = 0;
  for (const auto& e : entries_) m = std::max(m, e.var.arity);
  return m;
}

MultiIndex MultiIndex::operator*(const MultiIndex& other) const {
  std::vector<Entry> out;
  out.reserve(entries_.size() + other.entries_.size());
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() || b != other.entries_.end()) {
    if (b == other.entries_.end() || (a != entries_.end() && a->var < b->var)) {
      out.push_back(*a++);
    } else if (a == entries_.end() || b->var < a->var) {
      out.push_back(*b++);
    } else {
      out.push_back(Entry{a->var, a->freq + b->freq});
      ++a;
      ++b;
    }
  }
  MultiIndex r;
  r.entries_ = std::move(out);
  return r;
}

std::optional<MultiIndex> MultiIndex::without(Var v) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].var != v) continue;
    MultiIndex r = *this;
    if (--r.entries_[i].freq == 0) r.entries_.erase(r.entries_.begin() + static_cast<long>(i));
    return r;
  }
  return std::nullopt;
}

MultiIndex MultiIndex::with(Var v, std::uint32_t count) const {
  return *this * MultiIndex({Entry{v, count}});
}

// ---------------------------------------------------------------- Forest

Forest::Forest(MultiIndex m) {
  if (!m.empty()) items_.push_back(std::move(m));
}

Forest::Forest(std::vector<MultiIndex> items) {
  for (auto& m : items)
    if (!m.empty()) items_.push_back(std::move(m));
  std::sort(items_.begin(), items_.end());
}

unsigned Forest::degree() const {
  unsigned n = 0;
  for (const auto& m : items_) n += m.degree();
  return n;
}

Forest Forest::operator*(const Forest& other) const {
  Forest r;
  r.items_.reserve(items_.size() + other.items_.size());
  std::merge(items_.begin(), items_.end(), other.items_.begin(), other.items_.end(),
             std::back_inserter(r.items_));
  return r;
}

// ---------------------------------------------------------------- Grading

Grading::Grading(unsigned max_norm, Rational gamma) : max_norm_(max_norm), gamma_(std::move(gamma)) {
  gamma_.canonicalize();
  if (max_norm_ < 1) throw InvalidInput("max_norm must be >= 1");
  if (sgn(gamma_) <= 0 || gamma_ >= 1) throw InvalidInput("gamma must lie in (0,1)");
}

unsigned Grading::n_gamma() const {
  Integer q = gamma_.get_den() / gamma_.get_num();
  return static_cast<unsigned>(q.get_ui());
}

// ---------------------------------------------------------------- gradings

MultiIndex mi_product(const MultiIndex& a, const MultiIndex& b) { return a * b; }

unsigned degree(const MultiIndex& m) { return m.degree(); }
unsigned degree(const Forest& f) { return f.degree(); }

Rational gamma_degree(const MultiIndex& m, const Rational& gamma) {
  Rational r = 0;
  for (const auto& e : m.entries()) r += e.var.letter == 0 ? Rational(e.freq) / gamma : Rational(e.freq);
  return r;
}

Rational gamma_degree(const Forest& f, const Rational& gamma) {
  Rational r = 0;
  for (const auto& m : f.items()) r += gamma_degree(m, gamma);
  return r;
}

bool is_populated(const MultiIndex& m) { return m.is_populated(); }

namespace {
Integer factorial(unsigned long n) {
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}
}  // namespace

Integer symmetry_factor(const MultiIndex& m) {
  Integer s = 1;
  for (const auto& e : m.entries()) {
    Integer f = factorial(e.var.arity);
    Integer p;
    mpz_pow_ui(p.get_mpz_t(), f.get_mpz_t(), e.freq);
    s *= p;
  }
  return s;
}

Integer symmetry_factor(const Forest& f) {
  Integer s = 1;
  const auto& it = f.items();
  for (std::size_t i = 0; i < it.size();) {
    std::size_t j = i;
    while (j < it.size() && it[j] == it[i]) ++j;
    const auto r = static_cast<unsigned long>(j - i);
    Integer p;
    Integer si = symmetry_factor(it[i]);
    mpz_pow_ui(p.get_mpz_t(), si.get_mpz_t(), r);
    s *= factorial(r) * p;
    i = j;
  }
  return s;
}

namespace {
template <class B, class SymFn>
Rational pair_sums(const FormalSum<B>& u, const FormalSum<B>& v, SymFn sym) {
  const auto& small = u.size() <= v.size() ? u : v;
  const auto& large = u.size() <= v.size() ? v : u;
  Rational r = 0;
  for (const auto& [b, c] : small) {
    auto it = large.terms().find(b);
    if (it != large.terms().end()) r += c * it->second * Rational(sym(b));
  }
  return r;
}
}  // namespace

Rational pairing(const ForestSum& u, const ForestSum& v) {
  return pair_sums(u, v, [](const Forest& f) { return symmetry_factor(f); });
}
Rational pairing(const MiSum& u, const MiSum& v) {
  return pair_sums(u, v, [](const MultiIndex& m) { return symmetry_factor(m); });
}
Rational pairing(const FormalSum<ForestMi>& u, const FormalSum<ForestMi>& v) {
  return pair_sums(u, v, [](const ForestMi& p) {
    return Integer(symmetry_factor(p.first) * symmetry_factor(p.second));
  });
}
Rational pairing(const FormalSum<ForestPair>& u, const FormalSum<ForestPair>& v) {
  return pair_sums(u, v, [](const ForestPair& p) {
    return Integer(symmetry_factor(p.first) * symmetry_factor(p.second));
  });
}

// ---------------------------------------------------------------- D

MiSum derivation(const MultiIndex& m) {
  MiSum out;
  for (const auto& e : m.entries()) {
    MultiIndex t = m.without(e.var)->with(Var{e.var.letter, e.var.arity + 1});
    out.add(t, Rational(e.freq));
  }
  return out;
}

MiSum derivation(const MiSum& s) {
  MiSum out;
  for (const auto& [m, c] : s) out += derivation(m) * c;
  return out;
}

MiSum derivation_power(const MultiIndex& m, unsigned k) {
  MiSum s(m);
  for (unsigned i = 0; i < k; ++i) s = derivation(s);
  return s;
}

ForestSum derivation(const Forest& f) {
  ForestSum out;
  const auto& items = f.items();
  for (std::size_t j = 0; j < items.size(); ++j) {
    std::vector<MultiIndex> rest;
    for (std::size_t i = 0; i < items.size(); ++i)
      if (i != j) rest.push_back(items[i]);
    Forest others(rest);
    for (const auto& [m, c] : derivation(items[j])) out.add(others * Forest(m), c);
  }
  return out;
}

ForestSum derivation(const ForestSum& s) {
  ForestSum out;
  for (const auto& [f, c] : s) out += derivation(f) * c;
  return out;
}

MiSum mi_product(const MiSum& a, const MiSum& b) {
  MiSum out;
  for (const auto& [x, cx] : a)
    for (const auto& [y, cy] : b) out.add(x * y, cx * cy);
  return out;
}

ForestSum forest_product(const ForestSum& a, const ForestSum& b) {
  ForestSum out;
  for (const auto& [x, cx] : a)
    for (const auto& [y, cy] : b) out.add(x * y, cx * cy);
  return out;
}

MiSum prelie_graft(const MultiIndex& a, const MultiIndex& b) {
  MiSum out;
  for (const auto& [m, c] : derivation(b)) out.add(a * m, c);
  return out;
}

MiSum prelie_graft(const MiSum& a, const MiSum& b) {
  MiSum out;
  for (const auto& [x, cx] : a)
    for (const auto& [y, cy] : b) out += prelie_graft(x, y) * (cx * cy);
  return out;
}

// ---------------------------------------------------------------- ⋆₂

ForestSum graft_simultaneous(const Forest& f, const Forest& g) {
  if (f.empty()) return ForestSum(g);
  if (g.empty()) return ForestSum(f);
  const auto& beta = f.items();
  const auto& alpha = g.items();
  const std::size_t n = beta.size();
  const std::size_t m = alpha.size();

  // D^c α_j cached per (j, c)
  std::vector<std::vector<std::optional<MiSum>>> dpow(m, std::vector<std::optional<MiSum>>(n + 1));
  auto dp = [&](std::size_t j, unsigned c) -> const MiSum& {
    if (!dpow[j][c]) dpow[j][c] = derivation_power(alpha[j], c);
    return *dpow[j][c];
  };

  ForestSum out;
  std::vector<std::size_t> sigma(n, 0);
  while (true) {
    std::vector<MultiIndex> prefactor(m);
    std::vector<unsigned> count(m, 0);
    for (std::size_t i = 0; i < n; ++i) {
      prefactor[sigma[i]] = prefactor[sigma[i]] * beta[i];
      ++count[sigma[i]];
    }
    ForestSum acc(Forest{});
    for (std::size_t j = 0; j < m; ++j) {
      ForestSum piece;
      for (const auto& [t, c] : dp(j, count[j])) piece.add(Forest(prefactor[j] * t), c);
      acc = forest_product(acc, piece);
    }
    out += acc;
    std::size_t pos = 0;
    while (pos < n && ++sigma[pos] == m) sigma[pos++] = 0;
    if (pos == n) break;
  }
  return out;
}

ForestSum graft_simultaneous(const ForestSum& f, const ForestSum& g) {
  ForestSum out;
  for (const auto& [x, cx] : f)
    for (const auto& [y, cy] : g) out += graft_simultaneous(x, y) * (cx * cy);
  return out;
}

// ---------------------------------------------------------------- Δ_⧢

FormalSum<ForestPair> deshuffle(const Forest& f) {
  const auto& items = f.items();
  const std::size_t n = items.size();
  FormalSum<ForestPair> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<MultiIndex> left, right;
    for (std::size_t i = 0; i < n; ++i) (mask >> i & 1 ? left : right).push_back(items[i]);
    out.add(ForestPair{Forest(left), Forest(right)}, 1);
  }
  return out;
}

FormalSum<ForestPair> deshuffle(const ForestSum& s) {
  FormalSum<ForestPair> out;
  for (const auto& [f, c] : s) out += deshuffle(f) * c;
  return out;
}

// ---------------------------------------------------------------- ⋆

ForestSum gl_product(const Forest& u, const Forest& v, std::optional<unsigned> trunc) {
  if (trunc && u.degree() + v.degree() > *trunc) return {};
  if (u.empty()) return ForestSum(v);
  if (v.empty()) return ForestSum(u);
  ForestSum out;
  for (const auto& [split, c] : deshuffle(u)) {
    for (const auto& [g, cg] : graft_simultaneous(split.second, v)) out.add(split.first * g, c * cg);
  }
  return out;
}

ForestSum gl_product(const ForestSum& u, const ForestSum& v, std::optional<unsigned> trunc) {
  ForestSum out;
  for (const auto& [x, cx] : u)
    for (const auto& [y, cy] : v) out += gl_product(x, y, trunc) * (cx * cy);
  return out;
}

// ---------------------------------------------------------------- enumeration

std::vector<MultiIndex> enumerate_populated(unsigned d, unsigned max_norm) {
  std::vector<MultiIndex> out;
  if (max_norm == 0) return out;
  std::vector<Var> vars;
  for (std::uint32_t k = 0; k < max_norm; ++k)
    for (std::uint32_t i = 0; i <= d; ++i) vars.push_back(Var{i, k});

  std::vector<MultiIndex::Entry> cur;
  std::function<void(std::size_t, unsigned, unsigned)> rec = [&](std::size_t idx, unsigned deg,
                                                                  unsigned arity_sum) {
    if (idx == vars.size()) {
      if (deg >= 1 && deg == arity_sum + 1) out.emplace_back(cur);
      return;
    }
    rec(idx + 1, deg, arity_sum);
    const Var v = vars[idx];
    for (unsigned f = 1; deg + f <= max_norm && arity_sum + f * v.arity + 1 <= max_norm; ++f) {
      cur.push_back({v, f});
      rec(idx + 1, deg + f, arity_sum + f * v.arity);
      cur.pop_back();
    }
  };
  rec(0, 0, 0);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Forest> enumerate_forests(unsigned d, unsigned max_norm) {
  const auto mis = enumerate_populated(d, max_norm);
  std::vector<Forest> out;
  std::vector<MultiIndex> cur;
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t start, unsigned budget) {
    out.emplace_back(cur);
    for (std::size_t i = start; i < mis.size(); ++i) {
      const unsigned dg = mis[i].degree();
      if (dg > budget) continue;
      cur.push_back(mis[i]);
      rec(i, budget - dg);
      cur.pop_back();
    }
  };
  rec(0, max_norm);
  std::sort(out.begin(), out.end(), [](const Forest& a, const Forest& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return a < b;
  });
  return out;
}

// ---------------------------------------------------------------- text

ParseError::ParseError(const std::string& what, std::size_t pos)
    : std::runtime_error(what + " at position " + std::to_string(pos)), position(pos) {}

Rational parse_rational(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw ParseError("empty rational", 0);
  if (s.find('/') != std::string::npos) {
    Rational q;
    if (q.set_str(s, 10) != 0) throw ParseError("malformed rational '" + raw + "'", 0);
    if (q.get_den() == 0) throw ParseError("zero denominator", s.find('/'));
    q.canonicalize();
    return q;
  }
  // decimal with optional exponent, converted exactly
  std::size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
  std::string digits;
  long scale = 0;
  bool any = false;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) digits += s[i++], any = true;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      digits += s[i++];
      --scale;
      any = true;
    }
  }
  if (!any) throw ParseError("malformed number '" + raw + "'", i);
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    std::size_t start = i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t ds = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (ds == i) throw ParseError("malformed exponent", i);
    scale += std::stol(s.substr(start, i - start));
  }
  if (i != s.size()) throw ParseError("trailing characters in number", i);
  Integer num(digits.empty() ? "0" : digits, 10);
  Integer p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  Rational q = scale < 0 ? Rational(num, p) : Rational(num * p);
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

std::string format_rational(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

namespace {

struct Cursor {
  const std::string& s;
  std::size_t pos = 0;
  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool at_end() {
    skip();
    return pos >= s.size();
  }
  char peek() {
    skip();
    return pos < s.size() ? s[pos] : '\0';
  }
  void expect(char c) {
    if (peek() != c) throw ParseError(std::string("expected '") + c + "'", pos);
    ++pos;
  }
  std::uint32_t number() {
    skip();
    if (pos < s.size() && s[pos] == '-') throw ParseError("negative index", pos);
    std::size_t start = pos;
    std::uint64_t v = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      v = v * 10 + static_cast<std::uint64_t>(s[pos] - '0');
      if (v > 0xffffffffu) throw ParseError("index too large", start);
      ++pos;
    }
    if (start == pos) throw ParseError("expected a number", pos);
    return static_cast<std::uint32_t>(v);
  }
};

// multi-index factors until '*' or end; "1" alone is the unit
MultiIndex parse_mi(Cursor& c) {
  if (c.peek() == '1') {
    ++c.pos;
    return {};
  }
  std::vector<MultiIndex::Entry> entries;
  bool any = false;
  while (c.peek() == 'z') {
    ++c.pos;
    c.expect('(');
    std::uint32_t i = c.number();
    c.expect(',');
    std::uint32_t k = c.number();
    c.expect(')');
    std::uint32_t m = 1;
    if (c.peek() == '^') {
      ++c.pos;
      std::size_t at = c.pos;
      m = c.number();
      if (m == 0) throw ParseError("zero exponent", at);
    }
    entries.push_back({Var{i, k}, m});
    any = true;
  }
  if (!any) throw ParseError("malformed token", c.pos);
  return MultiIndex(std::move(entries));
}

Forest parse_forest_at(Cursor& c) {
  std::vector<MultiIndex> items;
  items.push_back(parse_mi(c));
  while (c.peek() == '*') {
    ++c.pos;
    items.push_back(parse_mi(c));
  }
  return Forest(std::move(items));
}

}  // namespace

MultiIndex parse_multi_index(const std::string& text) {
  Cursor c{text};
  MultiIndex m = parse_mi(c);
  if (!c.at_end()) throw ParseError("unexpected character", c.pos);
  return m;
}

Forest parse_forest(const std::string& text) {
  Cursor c{text};
  Forest f = parse_forest_at(c);
  if (!c.at_end()) throw ParseError("unexpected character", c.pos);
  return f;
}

std::string format(const MultiIndex& m) {
  if (m.empty()) return "1";
  std::string out;
  for (const auto& e : m.entries()) {
    out += "z(" + std::to_string(e.var.letter) + "," + std::to_string(e.var.arity) + ")";
    if (e.freq > 1) out += "^" + std::to_string(e.freq);
  }
  return out;
}

std::string format(const Forest& f) {
  if (f.empty()) return "1";
  std::string out;
  for (const auto& m : f.items()) {
    if (!out.empty()) out += '*';
    out += format(m);
  }
  return out;
}

std::string format(const ForestPair& p) { return format(p.first) + " ⊗ " + format(p.second); }
std::string format(const ForestMi& p) { return format(p.first) + " ⊗ " + format(p.second); }

ForestSum parse_forest_sum(const std::string& text) {
  Cursor c{text};
  ForestSum out;
  if (c.peek() == '0') {
    ++c.pos;
    if (!c.at_end()) throw ParseError("unexpected character", c.pos);
    return out;
  }
  while (!c.at_end()) {
    int sign = 1;
    if (c.peek() == '+' || c.peek() == '-') sign = c.s[c.pos++] == '-' ? -1 : 1;
    c.expect('(');
    std::size_t close = text.find(')', c.pos);
    if (close == std::string::npos) throw ParseError("unterminated coefficient", c.pos);
    Rational q = parse_rational(text.substr(c.pos, close - c.pos));
    c.pos = close + 1;
    Forest f = parse_forest_at(c);
    out.add(f, sign * q);
  }
  return out;
}

}  // namespace mirp
