#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mirp/elementary.hpp"
#include "mirp/roughpath.hpp"

namespace mirp {

struct Diverged : std::runtime_error {
  Diverged(const std::string& what, std::size_t substep, double last_finite)
      : std::runtime_error(what), substep(substep), last_finite(last_finite) {}
  std::size_t substep;
  double last_finite;
};

struct SolveConfig {
  // uniform dyadic mesh with 2^level intervals; must pick out grid points of the path
  std::optional<unsigned> mesh_level;
  // explicit mesh of grid times; used when mesh_level is unset, path grid when both are empty
  std::vector<double> mesh;
  unsigned substeps = 8;
  double guard = 1e12;
};

struct FlowSolution {
  std::vector<double> times;
  std::vector<double> values;
  // stopped early on divergence; values end at the last finite state
  bool truncated = false;
  std::size_t diverged_substep = 0;
};

// The multi-indices driving the log-ODE vector field and the Davie expansion:
// 1 <= |β|_γ <= N_γ, plus z_(0,0) regardless of γ.
std::vector<std::size_t> active_terms(const Basis& basis, const Rational& gamma);

double davie_expansion(const GroupElement& x, const VectorField& f, double y);
double davie_expansion(const RoughPathGrid& p, const VectorField& f, double s, double t, double y);

double logode_step(const LieElement& lambda, const VectorField& f, double y, unsigned substeps = 8,
                   double guard = 1e12);
// μ_{s,t}(y) for grid times s <= t
double almost_flow(const RoughPathGrid& p, const VectorField& f, double s, double t, double y,
                   unsigned substeps = 8);

// grid indices selected by the config
std::vector<std::size_t> mesh_indices(const RoughPathGrid& p, const SolveConfig& cfg);

FlowSolution solve_flow(const RoughPathGrid& p, const VectorField& f, double y0, const SolveConfig& cfg = {});

struct DavieRow {
  double s, t, residual;
};

struct DavieReport {
  std::vector<DavieRow> rows;
  // per dyadic scale: |t-s| and the largest residual at that scale
  std::vector<std::pair<double, double>> scales;
  double slope;
  double target;
};

// consecutive pairs of the uniform dyadic meshes at levels coarsest..finest
std::vector<std::pair<double, double>> dyadic_pairs(const RoughPathGrid& p, unsigned coarsest, unsigned finest);

// slope fitted to log(max residual per scale) against log|t-s|
DavieReport davie_residual_report(const RoughPathGrid& p, const VectorField& f, const FlowSolution& sol,
                                  const std::vector<std::pair<double, double>>& pairs);

// least-squares slope of log y against log x over points with y > 0; NaN with fewer than two
double loglog_slope(const std::vector<std::pair<double, double>>& points);

// classical RK4 on dY = f_0(Y)dt + Σ f_i(Y) Ẋ^i(t) dt with n uniform steps
FlowSolution reference_ode_solve(const VectorField& f, const std::vector<std::function<double(double)>>& driver_rates,
                                 double y0, double t0, double t1, std::size_t n);

}  // namespace mirp
