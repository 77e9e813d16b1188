#include "mirp/verify.hpp"

#include <chrono>
#include <functional>
#include <tuple>

#include "mirp/algebra.hpp"
#include "mirp/translation.hpp"

namespace mirp {

namespace {

constexpr std::size_t kMaxReported = 10;

class Suite {
 public:
  explicit Suite(std::string name) : start_(std::chrono::steady_clock::now()) { r_.name = std::move(name); }

  void check(bool ok, const std::function<std::string()>& describe) {
    ++r_.checked;
    if (ok) return;
    ++r_.failed;
    if (r_.failures.size() < kMaxReported) r_.failures.push_back(describe());
  }

  SuiteResult finish() {
    r_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return std::move(r_);
  }

 private:
  SuiteResult r_;
  std::chrono::steady_clock::time_point start_;
};

std::string join(std::initializer_list<std::string> parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += " | ";
    out += p;
  }
  return out;
}

std::vector<Forest> nonempty_forests(unsigned d, unsigned n) {
  auto all = enumerate_forests(d, n);
  all.erase(all.begin());
  return all;
}

FormalSum<ForestPair> tensor_gl(const FormalSum<ForestPair>& a, const FormalSum<ForestPair>& b) {
  FormalSum<ForestPair> out;
  for (const auto& [x, cx] : a)
    for (const auto& [y, cy] : b) {
      const ForestSum left = gl_product(x.first, y.first);
      const ForestSum right = gl_product(x.second, y.second);
      for (const auto& [l, cl] : left)
        for (const auto& [r, cr] : right) out.add({l, r}, cx * cy * cl * cr);
    }
  return out;
}

bool all_populated(const ForestSum& s) {
  for (const auto& [f, c] : s)
    for (const auto& m : f.items())
      if (!m.is_populated()) return false;
  return true;
}

bool all_populated(const MiSum& s) {
  for (const auto& [m, c] : s)
    if (!m.is_populated()) return false;
  return true;
}

MiSum insert_prelie_sum(const MiSum& a, const MiSum& b) {
  MiSum out;
  for (const auto& [x, cx] : a)
    for (const auto& [y, cy] : b) out += insert_prelie(x, y) * (cx * cy);
  return out;
}

MiSum truncated(const MiSum& s, unsigned n) {
  MiSum out;
  for (const auto& [m, c] : s)
    if (m.degree() <= n) out.add(m, c);
  return out;
}

// a direction-0 character with cross terms and a direction-1 character mixing letters
Translation mixed_translation(unsigned d) {
  Character c0 = Character::identity(0);
  c0.values[MultiIndex::single(1, 0)] = Rational(2);
  c0.values[MultiIndex({{Var{d, 0}, 1}, {Var{d, 1}, 1}})] = Rational(-1, 3);
  Character c1 = Character::identity(1);
  c1.values[MultiIndex::single(d, 0)] = Rational(1, 2);
  c1.values[MultiIndex({{Var{1, 0}, 1}, {Var{d, 1}, 1}})] = Rational(3);
  return Translation({c0, c1}, d);
}

}  // namespace

SuiteResult verify_prelie_nap(const VerifyOptions& opt) {
  Suite s("prelie-nap");
  const auto basis = enumerate_populated(opt.d, opt.prelie_degree);
  for (const auto& a : basis)
    for (const auto& b : basis)
      for (const auto& c : basis) {
        const MiSum A(a), B(b), C(c);
        const MiSum ab_c = prelie_graft(prelie_graft(A, B), C);
        MiSum lhs = ab_c - prelie_graft(A, prelie_graft(B, C));
        MiSum rhs = prelie_graft(prelie_graft(B, A), C) - prelie_graft(B, prelie_graft(A, C));
        auto who = [&] { return join({format(a), format(b), format(c)}); };
        s.check(lhs == rhs, [&] { return "pre-Lie " + who(); });
        s.check(ab_c == prelie_graft(prelie_graft(A, C), B), [&] { return "NAP " + who(); });
      }
  return s.finish();
}

SuiteResult verify_gl_associativity(const VerifyOptions& opt) {
  Suite s("gl-associativity");
  const auto forests = nonempty_forests(opt.d, opt.product_degree);
  bool fault = opt.inject_fault;
  for (const auto& u : forests)
    for (const auto& v : forests) {
      if (u.degree() + v.degree() >= opt.product_degree) continue;
      const ForestSum uv = gl_product(u, v);
      for (const auto& w : forests) {
        if (u.degree() + v.degree() + w.degree() > opt.product_degree) continue;
        ForestSum lhs = gl_product(uv, ForestSum(w));
        const ForestSum rhs = gl_product(ForestSum(u), gl_product(v, w));
        if (fault) {
          lhs.add(lhs.begin()->first, 1);
          fault = false;
        }
        s.check(lhs == rhs, [&] { return join({format(u), format(v), format(w)}); });
      }
    }
  return s.finish();
}

SuiteResult verify_gl_unit(const VerifyOptions& opt) {
  Suite s("gl-unit");
  const Forest unit;
  for (const auto& u : enumerate_forests(opt.d, opt.product_degree)) {
    const ForestSum want(u);
    s.check(gl_product(unit, u) == want && gl_product(u, unit) == want, [&] { return format(u); });
  }
  return s.finish();
}

SuiteResult verify_bialgebra(const VerifyOptions& opt) {
  Suite s("bialgebra");
  const auto forests = enumerate_forests(opt.d, opt.bialgebra_degree);
  for (const auto& u : forests)
    for (const auto& v : forests) {
      if (u.degree() + v.degree() > opt.bialgebra_degree) continue;
      const auto lhs = deshuffle(gl_product(u, v));
      const auto rhs = tensor_gl(deshuffle(u), deshuffle(v));
      s.check(lhs == rhs, [&] { return join({format(u), format(v)}); });
    }
  return s.finish();
}

SuiteResult verify_deshuffle_coassociativity(const VerifyOptions& opt) {
  Suite s("deshuffle-coassociativity");
  using Triple = std::tuple<Forest, Forest, Forest>;
  for (const auto& u : enumerate_forests(opt.d, opt.coproduct_degree)) {
    FormalSum<Triple> lhs, rhs;
    for (const auto& [p, c] : deshuffle(u)) {
      for (const auto& [q, cq] : deshuffle(p.first)) lhs.add({q.first, q.second, p.second}, c * cq);
      for (const auto& [q, cq] : deshuffle(p.second)) rhs.add({p.first, q.first, q.second}, c * cq);
    }
    s.check(lhs == rhs, [&] { return format(u); });
  }
  return s.finish();
}

SuiteResult verify_deshuffle_cocommutativity(const VerifyOptions& opt) {
  Suite s("deshuffle-cocommutativity");
  for (const auto& u : enumerate_forests(opt.d, opt.coproduct_degree)) {
    const auto cop = deshuffle(u);
    FormalSum<ForestPair> swapped;
    for (const auto& [p, c] : cop) swapped.add({p.second, p.first}, c);
    s.check(cop == swapped, [&] { return format(u); });
  }
  return s.finish();
}

SuiteResult verify_population(const VerifyOptions& opt) {
  Suite s("population");
  const unsigned n = opt.product_degree;
  const auto basis = enumerate_populated(opt.d, n);
  for (const auto& a : basis)
    for (const auto& b : basis) {
      if (a.degree() + b.degree() > n) continue;
      s.check(all_populated(prelie_graft(a, b)), [&] { return "▷ " + join({format(a), format(b)}); });
    }
  const auto forests = enumerate_forests(opt.d, n);
  for (const auto& u : forests)
    for (const auto& v : forests) {
      if (u.degree() + v.degree() > n) continue;
      s.check(all_populated(graft_simultaneous(u, v)), [&] { return "⋆₂ " + join({format(u), format(v)}); });
      s.check(all_populated(gl_product(u, v)), [&] { return "⋆ " + join({format(u), format(v)}); });
    }
  return s.finish();
}

SuiteResult verify_grading(const VerifyOptions& opt) {
  Suite s("grading");
  const Rational gamma(1, 3);
  const auto forests = enumerate_forests(opt.d, opt.product_degree);
  for (const auto& u : forests)
    for (const auto& v : forests) {
      if (u.degree() + v.degree() > opt.product_degree) continue;
      bool ok = gamma_degree(u * v, gamma) == gamma_degree(u, gamma) + gamma_degree(v, gamma);
      for (const auto& [t, c] : gl_product(u, v)) ok = ok && t.degree() <= u.degree() + v.degree();
      s.check(ok, [&] { return join({format(u), format(v)}); });
    }
  return s.finish();
}

SuiteResult verify_coproduct_routes(const VerifyOptions& opt) {
  Suite s("coproduct-minus-routes");
  const auto table = coproduct_minus_by_transpose(opt.d, opt.insertion_degree);
  for (const auto& b : enumerate_populated(opt.d, opt.insertion_degree)) {
    auto it = table.find(b);
    const FormalSum<ForestMi> transposed = it == table.end() ? FormalSum<ForestMi>{} : it->second;
    s.check(coproduct_minus(b) == transposed, [&] { return format(b); });
  }
  return s.finish();
}

SuiteResult verify_adjointness(const VerifyOptions& opt) {
  Suite s("insertion-adjointness");
  const unsigned n = opt.insertion_degree;
  const auto basis = enumerate_populated(opt.d, n);
  const auto forests = enumerate_forests(opt.d, n);
  std::map<MultiIndex, FormalSum<ForestMi>> cop;
  for (const auto& b : basis) cop.emplace(b, coproduct_minus(b));
  for (const auto& f : forests)
    for (const auto& a : basis) {
      if (f.degree() + a.degree() > n) continue;
      const MiSum ins = insert_simultaneous(f, a);
      const FormalSum<ForestMi> fa({f, a});
      for (const auto& b : basis) {
        const Rational lhs = ins.coefficient(b) * Rational(symmetry_factor(b));
        const Rational rhs = pairing(fa, cop.at(b));
        s.check(lhs == rhs, [&] { return join({format(f), format(a), format(b)}); });
      }
    }
  return s.finish();
}

SuiteResult verify_insertion_prelie(const VerifyOptions& opt) {
  Suite s("insertion-prelie");
  const auto basis = enumerate_populated(opt.d, opt.prelie_degree);
  for (const auto& a : basis)
    for (const auto& b : basis)
      for (const auto& c : basis) {
        const MiSum A(a), B(b), C(c);
        const MiSum lhs = insert_prelie_sum(insert_prelie_sum(A, B), C) - insert_prelie_sum(A, insert_prelie_sum(B, C));
        const MiSum rhs = insert_prelie_sum(insert_prelie_sum(B, A), C) - insert_prelie_sum(B, insert_prelie_sum(A, C));
        s.check(lhs == rhs, [&] { return join({format(a), format(b), format(c)}); });
      }
  return s.finish();
}

SuiteResult verify_translation_morphism(const VerifyOptions& opt) {
  Suite s("translation-morphism");
  const unsigned n = opt.insertion_degree;
  const auto forests = enumerate_forests(opt.d, n);
  const auto basis = enumerate_populated(opt.d, n);
  for (const Translation& ell : {Translation({ito_strat_character(opt.d)}, opt.d), mixed_translation(opt.d)}) {
    for (const auto& u : forests)
      for (const auto& v : forests) {
        if (u.degree() + v.degree() > n) continue;
        const ForestSum lhs = translate(ell, gl_product(u, v, n), n);
        const ForestSum rhs = gl_product(translate(ell, u, n), translate(ell, v, n), n);
        s.check(lhs == rhs, [&] { return "⋆ " + join({format(u), format(v)}); });
      }
    for (const auto& a : basis)
      for (const auto& b : basis) {
        if (a.degree() + b.degree() > n) continue;
        MiSum lhs;
        for (const auto& [t, c] : prelie_graft(a, b)) lhs += translate(ell, t, n) * c;
        const MiSum rhs = truncated(prelie_graft(translate(ell, a, n), translate(ell, b, n)), n);
        s.check(lhs == rhs, [&] { return "▷ " + join({format(a), format(b)}); });
      }
  }
  return s.finish();
}

SuiteResult verify_dual_translation(const VerifyOptions& opt) {
  Suite s("dual-translation");
  const unsigned n = opt.insertion_degree;
  const auto basis = enumerate_populated(opt.d, n);
  for (const Translation& ell : {Translation({ito_strat_character(opt.d)}, opt.d), mixed_translation(opt.d)}) {
    const DualTranslation m(ell, n);
    for (const auto& b : basis) {
      const MiSum tb = translate(ell, b, n);
      s.check(all_populated(tb) && all_populated(m(b)), [&] { return "population " + format(b); });
      for (const auto& g : basis)
        s.check(pairing(tb, MiSum(g)) == pairing(MiSum(b), m(g)), [&] { return join({format(b), format(g)}); });
    }
  }
  // direction 0: transpose of T_ℓ equals the contracted extraction-contraction coproduct
  const Character ell0 = ito_strat_character(opt.d);
  const DualTranslation m0(Translation({ell0}, opt.d), n);
  for (const auto& b : basis)
    s.check(m0(b) == contract_left(ell0, coproduct_minus(b)), [&] { return "(ℓ⊗id)Δ⁻ " + format(b); });
  return s.finish();
}

std::vector<SuiteResult> verify_algebra(const VerifyOptions& opt) {
  return {verify_prelie_nap(opt),        verify_gl_associativity(opt),           verify_gl_unit(opt),
          verify_bialgebra(opt),         verify_deshuffle_coassociativity(opt), verify_deshuffle_cocommutativity(opt),
          verify_population(opt),        verify_grading(opt)};
}

std::vector<SuiteResult> verify_insertion(const VerifyOptions& opt) {
  return {verify_coproduct_routes(opt), verify_adjointness(opt), verify_insertion_prelie(opt),
          verify_translation_morphism(opt), verify_dual_translation(opt)};
}

std::vector<SuiteResult> verify_all(const VerifyOptions& opt) {
  auto out = verify_algebra(opt);
  for (auto& r : verify_insertion(opt)) out.push_back(std::move(r));
  return out;
}

}  // namespace mirp
