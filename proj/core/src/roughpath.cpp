#include "mirp/roughpath.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <random>

namespace mirp {

// ---------------------------------------------------------------- tables

namespace {

std::optional<MultiIndex> quotient(const MultiIndex& m, const MultiIndex& divisor) {
  std::vector<MultiIndex::Entry> es;
  for (const auto& e : m.entries()) es.push_back(e);
  for (const auto& e : divisor.entries()) {
    auto it = std::find_if(es.begin(), es.end(), [&](const auto& x) { return x.var == e.var; });
    if (it == es.end() || it->freq < e.freq) return std::nullopt;
    it->freq -= e.freq;
  }
  return MultiIndex(es);
}

}  // namespace

Basis::Basis(unsigned d_, unsigned n) : d(d_), max_norm(n) {
  mis = enumerate_populated(d, n);
  std::stable_sort(mis.begin(), mis.end(), [](const auto& a, const auto& b) { return a.degree() < b.degree(); });
  for (std::size_t i = 0; i < mis.size(); ++i) {
    mi_lookup_[mis[i]] = i;
    mi_degree.push_back(mis[i].degree());
    mi_sym.push_back(symmetry_factor(mis[i]).get_d());
  }
  forests = enumerate_forests(d, n);
  for (std::size_t i = 0; i < forests.size(); ++i) {
    const Forest& f = forests[i];
    forest_lookup_[f] = i;
    std::vector<std::uint32_t> comp;
    for (const auto& m : f.items()) comp.push_back(static_cast<std::uint32_t>(mi_lookup_.at(m)));
    forest_components.push_back(std::move(comp));
    forest_sym.push_back(symmetry_factor(f).get_d());
    forest_degree.push_back(f.degree());
  }
  for (const auto& m : mis) mi_forest.push_back(static_cast<std::uint32_t>(forest_lookup_.at(Forest(m))));

  chen.resize(mis.size());
  std::vector<std::int64_t> mi_of_forest(forests.size(), -1);
  for (std::size_t i = 0; i < mis.size(); ++i) mi_of_forest[mi_forest[i]] = static_cast<std::int64_t>(i);
  for (std::uint32_t u = 0; u < forests.size(); ++u)
    for (std::uint32_t v = 0; v < forests.size(); ++v) {
      if (forest_degree[u] + forest_degree[v] > n) continue;
      for (const auto& [w, c] : gl_product(forests[u], forests[v])) {
        const auto wi = static_cast<std::uint32_t>(forest_lookup_.at(w));
        const double coeff = c.get_d();
        products.push_back({u, v, wi, coeff});
        if (mi_of_forest[wi] >= 0) {
          const auto b = static_cast<std::size_t>(mi_of_forest[wi]);
          chen[b].push_back({u, v, mi_sym[b] * coeff / (forest_sym[u] * forest_sym[v])});
        }
      }
    }

  lift_rules.resize(mis.size());
  for (std::size_t b = 0; b < mis.size(); ++b) {
    for (const auto& e : mis[b].entries()) {
      const MultiIndex rest = *mis[b].without(e.var);
      LiftRule rule{e.var.letter, {}};
      std::vector<std::uint32_t> cur;
      std::function<void(const MultiIndex&, unsigned)> rec = [&](const MultiIndex& left, unsigned k) {
        if (k == 0) {
          if (left.empty()) rule.tuples.push_back(cur);
          return;
        }
        for (std::size_t j = 0; j < mis.size(); ++j) {
          if (mi_degree[j] > left.degree()) break;
          auto q = quotient(left, mis[j]);
          if (!q) continue;
          cur.push_back(static_cast<std::uint32_t>(j));
          rec(*q, k - 1);
          cur.pop_back();
        }
      };
      rec(rest, e.var.arity);
      if (!rule.tuples.empty()) lift_rules[b].push_back(std::move(rule));
    }
  }
}

std::shared_ptr<const Basis> Basis::get(unsigned d, unsigned max_norm) {
  if (d < 1) throw InvalidInput("d must be at least 1");
  if (max_norm < 1) throw InvalidInput("max_norm must be at least 1");
  static std::mutex mu;
  static std::map<std::pair<unsigned, unsigned>, std::shared_ptr<const Basis>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{d, max_norm}];
  if (!slot) slot = std::make_shared<const Basis>(d, max_norm);
  return slot;
}

std::optional<std::size_t> Basis::index(const MultiIndex& m) const {
  auto it = mi_lookup_.find(m);
  if (it == mi_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Basis::forest_index(const Forest& f) const {
  auto it = forest_lookup_.find(f);
  if (it == forest_lookup_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------- values

GradedValues::GradedValues(unsigned d, Grading g) : GradedValues(Basis::get(d, g.max_norm()), g.gamma()) {}

GradedValues::GradedValues(std::shared_ptr<const Basis> basis, Rational gamma)
    : basis_(std::move(basis)), gamma_(std::move(gamma)), values_(basis_->mis.size(), 0.0) {
  (void)Grading(basis_->max_norm, gamma_);  // validates γ
}

std::size_t GradedValues::require(const MultiIndex& m) const {
  auto i = basis_->index(m);
  if (!i) {
    if (!m.is_populated()) throw InvalidInput("not populated: " + format(m));
    throw InvalidInput("outside truncation or alphabet: " + format(m));
  }
  return *i;
}

double GradedValues::operator()(const MultiIndex& m) const { return values_[require(m)]; }
void GradedValues::set(const MultiIndex& m, double x) { values_[require(m)] = x; }

double char_eval(const GroupElement& x, const Forest& f) {
  if (f.degree() > x.basis().max_norm) throw InvalidInput("forest above truncation: " + format(f));
  double r = 1;
  for (const auto& m : f.items()) r *= x(m);
  return r;
}

namespace {

std::vector<double> forest_values(const GradedValues& x) {
  const Basis& b = x.basis();
  std::vector<double> out(b.forests.size(), 1.0);
  for (std::size_t u = 1; u < out.size(); ++u)
    for (auto c : b.forest_components[u]) out[u] *= x[c];
  return out;
}

void require_same(const GradedValues& a, const GradedValues& b) {
  if (!a.same_grading(b)) throw InvalidInput("grading mismatch");
}

}  // namespace

GroupElement chen_compose(const GroupElement& a, const GroupElement& b) {
  require_same(a, b);
  const Basis& basis = a.basis();
  const auto fa = forest_values(a), fb = forest_values(b);
  GroupElement out(a.basis_ptr(), a.gamma());
  for (std::size_t beta = 0; beta < basis.mis.size(); ++beta) {
    double s = 0;
    for (const auto& t : basis.chen[beta]) s += fa[t.u] * fb[t.v] * t.weight;
    out[beta] = s;
  }
  return out;
}

std::vector<double> forest_coefficients(const GroupElement& x) {
  auto out = forest_values(x);
  for (std::size_t u = 0; u < out.size(); ++u) out[u] /= x.basis().forest_sym[u];
  return out;
}

std::vector<double> gl_multiply(const Basis& basis, const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(basis.forests.size(), 0.0);
  for (const auto& p : basis.products) out[p.w] += a[p.u] * b[p.v] * p.coeff;
  return out;
}

std::vector<double> log_coefficients(const GroupElement& x) {
  const Basis& basis = x.basis();
  auto y = forest_coefficients(x);
  y[0] = 0;
  std::vector<double> acc(y.size(), 0.0), power = y;
  for (unsigned n = 1; n <= basis.max_norm; ++n) {
    const double c = (n % 2 ? 1.0 : -1.0) / n;
    for (std::size_t u = 0; u < acc.size(); ++u) acc[u] += c * power[u];
    power = gl_multiply(basis, power, y);
  }
  return acc;
}

LieElement log_element(const GroupElement& x) {
  const Basis& basis = x.basis();
  const auto acc = log_coefficients(x);
  LieElement out(x.basis_ptr(), x.gamma());
  for (std::size_t b = 0; b < basis.mis.size(); ++b) out[b] = basis.mi_sym[b] * acc[basis.mi_forest[b]];
  return out;
}

GroupElement exp_element(const LieElement& l) {
  const Basis& basis = l.basis();
  std::vector<double> y(basis.forests.size(), 0.0);
  for (std::size_t b = 0; b < basis.mis.size(); ++b) y[basis.mi_forest[b]] = l[b] / basis.mi_sym[b];
  std::vector<double> acc(y.size(), 0.0), power = y;
  acc[0] = 1;
  double fact = 1;
  for (unsigned n = 1; n <= basis.max_norm; ++n) {
    fact *= n;
    for (std::size_t u = 0; u < acc.size(); ++u) acc[u] += power[u] / fact;
    power = gl_multiply(basis, power, y);
  }
  GroupElement out(l.basis_ptr(), l.gamma());
  for (std::size_t b = 0; b < basis.mis.size(); ++b) out[b] = basis.mi_sym[b] * acc[basis.mi_forest[b]];
  return out;
}

// ---------------------------------------------------------------- grids

RoughPathGrid::RoughPathGrid(std::vector<double> times, std::vector<GroupElement> increments)
    : times_(std::move(times)), increments_(std::move(increments)) {
  if (times_.size() < 2) throw InvalidInput("a rough path grid needs at least two times");
  if (increments_.size() + 1 != times_.size()) throw InvalidInput("increment count must be one less than time count");
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (!(times_[i] > times_[i - 1])) throw InvalidInput("times must be strictly increasing");
  for (const auto& x : increments_) require_same(x, increments_.front());
}

GroupElement RoughPathGrid::between(std::size_t i, std::size_t j) const {
  if (i > j || j >= times_.size()) throw InvalidInput("grid indices out of order");
  if (i == j) return GroupElement(increments_.front().basis_ptr(), increments_.front().gamma());
  GroupElement x = increments_[i];
  for (std::size_t k = i + 1; k < j; ++k) x = chen_compose(x, increments_[k]);
  return x;
}

std::size_t RoughPathGrid::grid_index(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.end() || *it != t) throw InvalidInput("off-grid time");
  return static_cast<std::size_t>(it - times_.begin());
}

GroupElement RoughPathGrid::at(double s, double t) const { return between(grid_index(s), grid_index(t)); }

namespace {

template <class ValueFn>
std::vector<double> norm_terms(const RoughPathGrid& p, bool log_only, ValueFn&& values_of) {
  const Basis& basis = p.basis();
  std::vector<double> gdeg(basis.forests.size());
  for (std::size_t u = 0; u < gdeg.size(); ++u) gdeg[u] = gamma_degree(basis.forests[u], p.grading().gamma()).get_d();
  std::vector<double> best(basis.forests.size(), 0.0);
  const auto& t = p.times();
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    GroupElement x = p.increments()[i];
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      if (j > i + 1) x = chen_compose(x, p.increments()[j - 1]);
      const auto vals = values_of(x);
      const double h = t[j] - t[i];
      for (std::size_t u = 1; u < basis.forests.size(); ++u) {
        if (log_only && basis.forest_components[u].size() > 1) continue;
        const double v = std::fabs(vals[u]);
        if (v == 0) continue;
        best[u] = std::max(best[u], std::pow(v / std::pow(h, gdeg[u]), 1.0 / basis.forest_degree[u]));
      }
    }
  }
  return best;
}

}  // namespace

std::vector<double> rp_norm_terms(const RoughPathGrid& p) {
  return norm_terms(p, false, [](const GroupElement& x) { return forest_values(x); });
}

double rp_norm(const RoughPathGrid& p) {
  const auto terms = rp_norm_terms(p);
  return *std::max_element(terms.begin(), terms.end());
}

double rp_norm_log(const RoughPathGrid& p) {
  const auto terms = norm_terms(p, true, [](const GroupElement& x) {
    const Basis& b = x.basis();
    const LieElement l = log_element(x);
    std::vector<double> out(b.forests.size(), 0.0);
    for (std::size_t k = 0; k < b.mis.size(); ++k) out[b.mi_forest[k]] = l[k];
    return out;
  });
  return *std::max_element(terms.begin(), terms.end());
}

// ---------------------------------------------------------------- lifts

namespace {

double rule_integrand(const Basis::LiftRule& rule, const std::vector<double>& x) {
  double s = 0;
  for (const auto& tuple : rule.tuples) {
    double p = 1;
    for (auto j : tuple) p *= x[j];
    s += p;
  }
  return s;
}

}  // namespace

GroupElement lift_segment(const std::vector<double>& dx, const std::shared_ptr<const Basis>& basis,
                          const Rational& gamma) {
  if (dx.size() != basis->d + 1) throw InvalidInput("increment dimension mismatch");
  GroupElement out(basis, gamma);
  // on an affine segment every integrand is a monomial in (u - s) of degree |β| - 1
  std::vector<double> x(basis->mis.size(), 0.0);
  for (std::size_t b = 0; b < basis->mis.size(); ++b) {
    double s = 0;
    for (const auto& rule : basis->lift_rules[b]) s += dx[rule.letter] * rule_integrand(rule, x);
    x[b] = s / basis->mi_degree[b];
    out[b] = x[b];
  }
  return out;
}

RoughPathGrid lift_piecewise_linear(const std::vector<std::vector<double>>& samples, const Grading& g) {
  if (samples.size() < 2) throw InvalidInput("at least two samples are required");
  const std::size_t width = samples.front().size();
  if (width < 2) throw InvalidInput("samples need a time column and at least one coordinate");
  const auto d = static_cast<unsigned>(width - 1);
  auto basis = Basis::get(d, g.max_norm());
  std::vector<double> times;
  std::vector<GroupElement> incs;
  for (std::size_t r = 0; r < samples.size(); ++r) {
    if (samples[r].size() != width) throw InvalidInput("ragged sample rows");
    times.push_back(samples[r][0]);
    if (r == 0) continue;
    if (!(samples[r][0] > samples[r - 1][0])) throw InvalidInput("non-monotone times");
    std::vector<double> dx(width);
    for (std::size_t c = 0; c < width; ++c) dx[c] = samples[r][c] - samples[r - 1][c];
    incs.push_back(lift_segment(dx, basis, g.gamma()));
  }
  return RoughPathGrid(std::move(times), std::move(incs));
}

const char* brownian_generator_name() { return "std::mt19937_64 + std::normal_distribution<double> (libstdc++)"; }

RoughPathGrid lift_brownian(const BrownianConfig& cfg, const Grading& g) {
  if (g.max_norm() > 3) throw UnsupportedLevel("Brownian lifts are limited to max_norm <= 3");
  if (cfg.d < 1) throw InvalidInput("d must be at least 1");
  if (cfg.n_steps == 0 || (cfg.n_steps & (cfg.n_steps - 1))) throw InvalidInput("n_steps must be a power of two");
  if (cfg.stride == 0 || cfg.n_steps % cfg.stride) throw InvalidInput("stride must divide n_steps");
  if (!(cfg.horizon > 0)) throw InvalidInput("horizon must be positive");

  auto basis = Basis::get(cfg.d, g.max_norm());
  const std::size_t nb = basis->mis.size();
  const double dt = cfg.horizon / static_cast<double>(cfg.n_steps);
  const double sdt = std::sqrt(dt);
  std::mt19937_64 gen(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool ito = cfg.mode == BrownianMode::ito;

  std::vector<double> times{0.0};
  std::vector<GroupElement> incs;
  std::vector<double> dx(cfg.d + 1), old(nb), cur(nb);
  dx[0] = dt;
  for (std::size_t block = 0; block < cfg.n_steps / cfg.stride; ++block) {
    std::fill(cur.begin(), cur.end(), 0.0);
    for (std::size_t step = 0; step < cfg.stride; ++step) {
      for (unsigned i = 1; i <= cfg.d; ++i) dx[i] = sdt * normal(gen);
      old = cur;
      for (std::size_t b = 0; b < nb; ++b) {
        double s = 0;
        for (const auto& rule : basis->lift_rules[b]) {
          const double before = rule_integrand(rule, old);
          // time integrals and Stratonovich integrals use the trapezoid
          const double integrand =
              (ito && rule.letter != 0) ? before : 0.5 * (before + rule_integrand(rule, cur));
          s += dx[rule.letter] * integrand;
        }
        cur[b] = old[b] + s;
      }
    }
    GroupElement x(basis, g.gamma());
    for (std::size_t b = 0; b < nb; ++b) x[b] = cur[b];
    incs.push_back(std::move(x));
    times.push_back(static_cast<double>((block + 1) * cfg.stride) * dt);
  }
  return RoughPathGrid(std::move(times), std::move(incs));
}

// ---------------------------------------------------------------- translation

Grading translated_grading(const Translation& ell, const Rational& gamma) {
  const unsigned n_ell = ell.support_norm(gamma);
  Rational out_gamma = gamma / n_ell;
  Rational ratio = Rational(n_ell) / gamma;
  Integer n = ratio.get_num() / ratio.get_den();
  return Grading(static_cast<unsigned>(n.get_ui()), out_gamma);
}

RoughPathGrid translate_roughpath(const Translation& ell, const RoughPathGrid& p, const Grading& out) {
  if (ell.d() != p.d()) throw InvalidInput("translation and path use different d");
  auto out_basis = Basis::get(p.d(), out.max_norm());
  const Basis& in = p.basis();
  const DualTranslation m(ell, out.max_norm());
  struct Entry {
    std::size_t target, source;
    double coeff;
  };
  std::vector<Entry> map;
  for (std::size_t b = 0; b < out_basis->mis.size(); ++b) {
    for (const auto& [g, c] : m(out_basis->mis[b])) {
      auto src = in.index(g);
      if (!src)
        throw InvalidInput("translated value at " + format(out_basis->mis[b]) + " needs degree " +
                           std::to_string(g.degree()) + " but the input path is truncated at " +
                           std::to_string(in.max_norm));
      map.push_back({b, *src, c.get_d()});
    }
  }
  std::vector<GroupElement> incs;
  for (const auto& x : p.increments()) {
    GroupElement y(out_basis, out.gamma());
    for (const auto& e : map) y[e.target] += e.coeff * x[e.source];
    incs.push_back(std::move(y));
  }
  return RoughPathGrid(p.times(), std::move(incs));
}

}  // namespace mirp
