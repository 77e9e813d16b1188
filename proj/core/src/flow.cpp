#include "mirp/flow.hpp"

#include <cmath>
#include <map>
#include <string>

namespace mirp {

std::vector<std::size_t> active_terms(const Basis& basis, const Rational& gamma) {
  const Rational n_gamma = Grading(basis.max_norm, gamma).n_gamma();
  const MultiIndex drift = MultiIndex::single(0, 0);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < basis.mis.size(); ++i) {
    const Rational g = gamma_degree(basis.mis[i], gamma);
    if ((g >= 1 && g <= n_gamma) || basis.mis[i] == drift) out.push_back(i);
  }
  return out;
}

namespace {

struct Term {
  const MultiIndex* mi;
  double weight;
};

std::vector<Term> weighted_terms(const GradedValues& x) {
  const Basis& basis = x.basis();
  std::vector<Term> out;
  for (std::size_t i : active_terms(basis, x.gamma()))
    if (x[i] != 0.0) out.push_back({&basis.mis[i], x[i] / basis.mi_sym[i]});
  return out;
}

double field_value(const std::vector<Term>& terms, const VectorField& f, double y) {
  double r = 0;
  for (const auto& t : terms) r += t.weight * upsilon(*t.mi, f, y);
  return r;
}

}  // namespace

double davie_expansion(const GroupElement& x, const VectorField& f, double y) {
  return y + field_value(weighted_terms(x), f, y);
}

double davie_expansion(const RoughPathGrid& p, const VectorField& f, double s, double t, double y) {
  return davie_expansion(p.at(s, t), f, y);
}

double logode_step(const LieElement& lambda, const VectorField& f, double y, unsigned substeps, double guard) {
  if (substeps < 1) throw InvalidInput("substeps must be >= 1");
  const auto terms = weighted_terms(lambda);
  if (terms.empty()) return y;
  const double h = 1.0 / substeps;
  double z = y;
  for (unsigned n = 0; n < substeps; ++n) {
    const double k1 = field_value(terms, f, z);
    const double k2 = field_value(terms, f, z + 0.5 * h * k1);
    const double k3 = field_value(terms, f, z + 0.5 * h * k2);
    const double k4 = field_value(terms, f, z + h * k3);
    const double next = z + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!std::isfinite(next) || std::abs(next) > guard)
      throw Diverged("log-ODE state left the guard at substep " + std::to_string(n + 1), n + 1, z);
    z = next;
  }
  return z;
}

double almost_flow(const RoughPathGrid& p, const VectorField& f, double s, double t, double y, unsigned substeps) {
  return logode_step(log_element(p.at(s, t)), f, y, substeps);
}

std::vector<std::size_t> mesh_indices(const RoughPathGrid& p, const SolveConfig& cfg) {
  const std::size_t n = p.times().size() - 1;
  std::vector<std::size_t> idx;
  if (cfg.mesh_level) {
    const unsigned lvl = *cfg.mesh_level;
    if (lvl >= 63 || n % (std::size_t{1} << lvl) != 0)
      throw InvalidInput("dyadic mesh level " + std::to_string(lvl) + " does not divide the " + std::to_string(n) +
                         " path intervals");
    const std::size_t stride = n >> lvl;
    for (std::size_t i = 0; i <= n; i += stride) idx.push_back(i);
  } else if (!cfg.mesh.empty()) {
    for (double t : cfg.mesh) idx.push_back(p.grid_index(t));
    for (std::size_t i = 1; i < idx.size(); ++i)
      if (idx[i] <= idx[i - 1]) throw InvalidInput("mesh times must be strictly increasing");
  } else {
    for (std::size_t i = 0; i <= n; ++i) idx.push_back(i);
  }
  return idx;
}

FlowSolution solve_flow(const RoughPathGrid& p, const VectorField& f, double y0, const SolveConfig& cfg) {
  if (cfg.substeps < 1) throw InvalidInput("substeps must be >= 1");
  const auto idx = mesh_indices(p, cfg);
  FlowSolution sol;
  sol.times.push_back(p.times()[idx.front()]);
  sol.values.push_back(y0);
  double y = y0;
  for (std::size_t j = 1; j < idx.size(); ++j) {
    try {
      y = logode_step(log_element(p.between(idx[j - 1], idx[j])), f, y, cfg.substeps, cfg.guard);
    } catch (const Diverged& e) {
      sol.truncated = true;
      sol.diverged_substep = e.substep;
      break;
    }
    sol.times.push_back(p.times()[idx[j]]);
    sol.values.push_back(y);
  }
  return sol;
}

std::vector<std::pair<double, double>> dyadic_pairs(const RoughPathGrid& p, unsigned coarsest, unsigned finest) {
  if (coarsest > finest) throw InvalidInput("coarsest level above finest");
  std::vector<std::pair<double, double>> out;
  for (unsigned lvl = coarsest; lvl <= finest; ++lvl) {
    SolveConfig cfg;
    cfg.mesh_level = lvl;
    const auto idx = mesh_indices(p, cfg);
    for (std::size_t j = 1; j < idx.size(); ++j) out.emplace_back(p.times()[idx[j - 1]], p.times()[idx[j]]);
  }
  return out;
}

double loglog_slope(const std::vector<std::pair<double, double>>& points) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (const auto& [x, y] : points) {
    if (!(x > 0) || !(y > 0)) continue;
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::nan("");
  const double den = n * sxx - sx * sx;
  return den == 0 ? std::nan("") : (n * sxy - sx * sy) / den;
}

DavieReport davie_residual_report(const RoughPathGrid& p, const VectorField& f, const FlowSolution& sol,
                                  const std::vector<std::pair<double, double>>& pairs) {
  std::map<double, std::size_t> at;
  for (std::size_t j = 0; j < sol.times.size(); ++j) at[sol.times[j]] = j;
  auto value = [&](double t) {
    auto it = at.find(t);
    if (it == at.end()) throw InvalidInput("no solution value at t = " + std::to_string(t));
    return sol.values[it->second];
  };
  DavieReport rep;
  // scales keyed by index span so equal-width pairs group exactly
  std::map<std::size_t, std::pair<double, double>> by_span;
  for (const auto& [s, t] : pairs) {
    const double r = std::abs(value(t) - davie_expansion(p, f, s, t, value(s)));
    rep.rows.push_back({s, t, r});
    const std::size_t span = p.grid_index(t) - p.grid_index(s);
    auto& slot = by_span[span];
    slot.first = std::max(slot.first, t - s);
    slot.second = std::max(slot.second, r);
  }
  for (const auto& [span, sc] : by_span) rep.scales.push_back(sc);
  rep.slope = loglog_slope(rep.scales);
  const Grading g = p.grading();
  rep.target = (g.n_gamma() + 1) * g.gamma().get_d();
  return rep;
}

FlowSolution reference_ode_solve(const VectorField& f, const std::vector<std::function<double(double)>>& driver_rates,
                                 double y0, double t0, double t1, std::size_t n) {
  if (n == 0) throw InvalidInput("reference solver needs at least one step");
  if (driver_rates.size() != f.d()) throw InvalidInput("driver dimension does not match the field");
  auto rhs = [&](double t, double y) {
    double r = f(0, y);
    for (unsigned i = 1; i <= f.d(); ++i) r += f(i, y) * driver_rates[i - 1](t);
    return r;
  };
  const double h = (t1 - t0) / static_cast<double>(n);
  FlowSolution sol;
  sol.times.push_back(t0);
  sol.values.push_back(y0);
  double y = y0;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = t0 + static_cast<double>(j) * h;
    const double k1 = rhs(t, y);
    const double k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
    const double k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
    const double k4 = rhs(t + h, y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!std::isfinite(y)) throw Diverged("reference solution is not finite at step " + std::to_string(j + 1), j + 1,
                                          sol.values.back());
    sol.times.push_back(j + 1 == n ? t1 : t0 + static_cast<double>(j + 1) * h);
    sol.values.push_back(y);
  }
  return sol;
}

}  // namespace mirp
