#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mirp/flow.hpp"
#include "mirp/verify.hpp"
#include "mirp_io/io.hpp"

using namespace mirp;
using io::Json;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kDiverged = 3 };

struct Common {
  unsigned d = 1;
  std::string gamma = "1/2";
  unsigned max_norm = 2;
  std::uint64_t seed = 0;
  std::optional<unsigned> mesh_level;
  unsigned substeps = 8;
  std::string out;
  bool no_timestamp = false;
};

void emit(const Common& c, const std::string& text) {
  if (c.out.empty())
    std::cout << text;
  else
    io::write_text_file(c.out, text);
}

Grading grading_of(const Common& c) { return Grading(c.max_norm, parse_rational(c.gamma)); }

io::Provenance prov(const Common& c, const std::string& cmd, Json config) {
  if (!config.contains("d")) config["d"] = c.d;
  if (!config.contains("gamma")) config["gamma"] = c.gamma;
  if (!config.contains("max_norm")) config["max_norm"] = c.max_norm;
  config["seed"] = c.seed;
  return {cmd, std::move(config), !c.no_timestamp};
}

void describe_path(Json& cfg, const RoughPathGrid& p) {
  cfg["d"] = p.d();
  cfg["gamma"] = format_rational(p.grading().gamma());
  cfg["max_norm"] = p.grading().max_norm();
}

RoughPathGrid load_grid(const std::string& path) { return io::grid_from_json(io::read_json_file(path)); }

// ---------------------------------------------------------------- subcommands

int run_enumerate(const Common& c, bool with_gamma) {
  std::ostringstream os;
  if (c.max_norm > 0) {
    const Rational gamma = parse_rational(c.gamma);
    if (with_gamma) (void)Grading(c.max_norm, gamma);
    for (const auto& m : enumerate_populated(c.d, c.max_norm)) {
      os << format(m) << "\t" << m.degree();
      os << "\t" << (with_gamma ? format_rational(gamma_degree(m, gamma)) : std::string("-"));
      os << "\t" << symmetry_factor(m).get_str() << "\t" << (m.is_populated() ? "populated" : "unpopulated") << "\n";
    }
  }
  emit(c, os.str());
  return kOk;
}

int run_verify(const Common& c, bool max_norm_given, bool inject_fault) {
  VerifyOptions opt;
  opt.d = c.d;
  if (max_norm_given) {
    opt.prelie_degree = opt.product_degree = opt.bialgebra_degree = opt.coproduct_degree = opt.insertion_degree =
        c.max_norm;
  }
  opt.inject_fault = inject_fault;
  const auto results = verify_all(opt);
  Json j;
  Json cfg{{"prelie_degree", opt.prelie_degree},   {"product_degree", opt.product_degree},
           {"bialgebra_degree", opt.bialgebra_degree}, {"coproduct_degree", opt.coproduct_degree},
           {"insertion_degree", opt.insertion_degree}, {"inject_fault", inject_fault}};
  j["provenance"] = io::provenance_json(prov(c, "verify", cfg));
  Json suites = Json::array();
  bool ok = true;
  for (const auto& r : results) {
    Json s{{"name", r.name}, {"checked", r.checked}, {"failed", r.failed}, {"failures", r.failures}};
    if (!c.no_timestamp) s["seconds"] = r.seconds;
    suites.push_back(std::move(s));
    if (!r.ok()) {
      ok = false;
      for (const auto& f : r.failures) std::cerr << "FAIL " << r.name << ": " << f << "\n";
    }
  }
  j["suites"] = std::move(suites);
  j["ok"] = ok;
  emit(c, j.dump(2) + "\n");
  return ok ? kOk : kVerifyFailed;
}

struct LiftArgs {
  std::string samples;
  bool brownian = false;
  std::string mode = "strat";
  std::size_t n_steps = 1024;
  std::size_t stride = 1;
  double horizon = 1;
};

int run_lift(const Common& c, const LiftArgs& a) {
  const Grading g = grading_of(c);
  Json cfg;
  std::optional<RoughPathGrid> grid;
  if (a.brownian == !a.samples.empty()) throw InvalidInput("lift needs exactly one of --samples or --brownian");
  if (a.brownian) {
    BrownianConfig bc;
    bc.d = c.d;
    bc.horizon = a.horizon;
    bc.n_steps = a.n_steps;
    bc.seed = c.seed;
    bc.stride = a.stride;
    if (a.mode == "ito")
      bc.mode = BrownianMode::ito;
    else if (a.mode == "strat")
      bc.mode = BrownianMode::strat;
    else
      throw InvalidInput("mode must be ito or strat");
    cfg = Json{{"source", "brownian"}, {"mode", a.mode}, {"n_steps", a.n_steps}, {"stride", a.stride},
               {"horizon", a.horizon}};
    grid = lift_brownian(bc, g);
  } else {
    std::ifstream in(a.samples);
    if (!in) throw InvalidInput("cannot open " + a.samples);
    cfg = Json{{"source", "samples"}, {"samples", a.samples}};
    grid = lift_piecewise_linear(io::read_samples_csv(in), g);
  }
  Json j = io::to_json(*grid);
  Json outj;
  outj["provenance"] = io::provenance_json(prov(c, "lift", cfg));
  for (const auto& [k, v] : j.items()) outj[k] = v;
  emit(c, outj.dump(1) + "\n");
  return kOk;
}

struct SolveArgs {
  std::string path, field;
  double y0 = 0;
  unsigned coarsest = 2;
  std::optional<unsigned> finest;
  std::string sidecar;
};

SolveConfig solve_config(const Common& c) {
  SolveConfig sc;
  sc.mesh_level = c.mesh_level;
  sc.substeps = c.substeps;
  return sc;
}

std::optional<unsigned> dyadic_levels(const RoughPathGrid& p) {
  const std::size_t n = p.times().size() - 1;
  if (n == 0 || (n & (n - 1)) != 0) return std::nullopt;
  unsigned l = 0;
  while ((std::size_t{1} << l) < n) ++l;
  return l;
}

DavieReport report_for(const RoughPathGrid& p, const PolynomialField& f, const FlowSolution& sol, const SolveArgs& a,
                       const Common& c) {
  const auto top = dyadic_levels(p);
  if (!top) throw InvalidInput("residual reports need a path grid with 2^L intervals");
  unsigned finest = a.finest.value_or(c.mesh_level ? *c.mesh_level : *top);
  finest = std::min(finest, c.mesh_level.value_or(*top));
  return davie_residual_report(p, f, sol, dyadic_pairs(p, a.coarsest, finest));
}

int run_solve(const Common& c, const SolveArgs& a) {
  const RoughPathGrid p = load_grid(a.path);
  const PolynomialField f = io::field_from_json(io::read_json_file(a.field));
  if (f.d() != p.d()) throw InvalidInput("field has d=" + std::to_string(f.d()) + " but the path has d=" + std::to_string(p.d()));
  const FlowSolution sol = solve_flow(p, f, a.y0, solve_config(c));
  Json cfg{{"path", a.path}, {"field", a.field}, {"y0", a.y0}, {"substeps", c.substeps}};
  describe_path(cfg, p);
  cfg["mesh_level"] = c.mesh_level ? Json(*c.mesh_level) : Json(nullptr);
  const auto pv = prov(c, "solve", cfg);
  std::ostringstream os;
  io::write_provenance_comments(os, pv);
  io::write_solution_csv(os, sol);
  emit(c, os.str());
  if (!a.sidecar.empty()) {
    Json side;
    side["provenance"] = io::provenance_json(pv);
    side["truncated"] = sol.truncated;
    if (sol.truncated) side["diverged_substep"] = sol.diverged_substep;
    if (!sol.truncated) side["davie"] = io::to_json(report_for(p, f, sol, a, c));
    io::write_text_file(a.sidecar, side.dump(1) + "\n");
  }
  if (sol.truncated) {
    std::cerr << "error: solution diverged after t = " << io::format_double(sol.times.back()) << " (substep "
              << sol.diverged_substep << ")\n";
    return kDiverged;
  }
  return kOk;
}

int run_davie_report(const Common& c, const SolveArgs& a) {
  const RoughPathGrid p = load_grid(a.path);
  const PolynomialField f = io::field_from_json(io::read_json_file(a.field));
  if (f.d() != p.d()) throw InvalidInput("field and path dimensions differ");
  const FlowSolution sol = solve_flow(p, f, a.y0, solve_config(c));
  if (sol.truncated) {
    std::cerr << "error: solution diverged after t = " << io::format_double(sol.times.back()) << "\n";
    return kDiverged;
  }
  Json cfg{{"path", a.path}, {"field", a.field}, {"y0", a.y0}, {"substeps", c.substeps}, {"coarsest", a.coarsest}};
  describe_path(cfg, p);
  cfg["mesh_level"] = c.mesh_level ? Json(*c.mesh_level) : Json(nullptr);
  Json j;
  j["provenance"] = io::provenance_json(prov(c, "davie-report", cfg));
  const Json rep = io::to_json(report_for(p, f, sol, a, c));
  for (const auto& [k, v] : rep.items()) j[k] = v;
  emit(c, j.dump(1) + "\n");
  return kOk;
}

int run_translate(const Common& c, const std::string& path, const std::string& translation) {
  const RoughPathGrid p = load_grid(path);
  const Translation ell = io::translation_from_json(io::read_json_file(translation));
  const Grading out = translated_grading(ell, p.grading().gamma());
  const RoughPathGrid tp = translate_roughpath(ell, p, out);
  Json j;
  Json cfg{{"path", path}, {"translation", translation}};
  describe_path(cfg, p);
  j["provenance"] = io::provenance_json(prov(c, "translate", cfg));
  const Json body = io::to_json(tp);
  for (const auto& [k, v] : body.items()) j[k] = v;
  emit(c, j.dump(1) + "\n");
  return kOk;
}

int run_translate_field(const Common& c, const std::string& field, const std::string& translation) {
  const PolynomialField f = io::field_from_json(io::read_json_file(field));
  const Translation ell = io::translation_from_json(io::read_json_file(translation));
  Json j;
  j["provenance"] = io::provenance_json(prov(c, "translate-field", Json{{"field", field}, {"translation", translation}}));
  const Json body = io::to_json(translate_polynomial(f, ell));
  for (const auto& [k, v] : body.items()) j[k] = v;
  emit(c, j.dump(1) + "\n");
  return kOk;
}

struct DemoArgs {
  std::size_t paths = 10000;
  std::size_t n_steps = 4096;
  std::size_t checkpoints = 4;
};

int run_ito_strat_demo(const Common& c, const DemoArgs& a) {
  if (a.checkpoints == 0 || a.n_steps % a.checkpoints) throw InvalidInput("checkpoints must divide n-steps");
  if (a.paths < 2) throw InvalidInput("need at least two paths");
  const Grading g(2, Rational(1, 2));
  const unsigned d = c.d;
  const std::size_t cells = a.checkpoints * d * d;
  std::vector<double> sum(cells, 0.0), sq(cells, 0.0);
  std::vector<double> times;
  for (std::size_t n = 0; n < a.paths; ++n) {
    BrownianConfig bc;
    bc.d = d;
    bc.n_steps = a.n_steps;
    bc.stride = a.n_steps / a.checkpoints;
    bc.seed = c.seed + n;
    bc.mode = BrownianMode::ito;
    const RoughPathGrid pi = lift_brownian(bc, g);
    bc.mode = BrownianMode::strat;
    const RoughPathGrid ps = lift_brownian(bc, g);
    if (times.empty()) times.assign(ps.times().begin() + 1, ps.times().end());
    for (std::size_t k = 0; k < a.checkpoints; ++k) {
      const GroupElement xi = pi.between(0, k + 1), xs = ps.between(0, k + 1);
      for (unsigned i = 1; i <= d; ++i)
        for (unsigned j = 1; j <= d; ++j) {
          const MultiIndex key = MultiIndex::single(i, 0) * MultiIndex::single(j, 1);
          const double diff = xs(key) - xi(key);
          const std::size_t cell = (k * d + (i - 1)) * d + (j - 1);
          sum[cell] += diff;
          sq[cell] += diff * diff;
        }
    }
  }
  std::ostringstream os;
  io::write_provenance_comments(
      os, prov(c, "ito-strat-demo", Json{{"paths", a.paths}, {"n_steps", a.n_steps}, {"checkpoints", a.checkpoints}}));
  os << "t,i,j,mean,se,expected\n";
  const double np = static_cast<double>(a.paths);
  for (std::size_t k = 0; k < a.checkpoints; ++k)
    for (unsigned i = 1; i <= d; ++i)
      for (unsigned j = 1; j <= d; ++j) {
        const std::size_t cell = (k * d + (i - 1)) * d + (j - 1);
        const double mean = sum[cell] / np;
        const double se = std::sqrt(std::max(0.0, sq[cell] / np - mean * mean) / (np - 1));
        os << io::format_double(times[k]) << "," << i << "," << j << "," << io::format_double(mean) << ","
           << io::format_double(se) << "," << io::format_double(i == j ? times[k] / 2 : 0.0) << "\n";
      }
  emit(c, os.str());
  return kOk;
}

void add_common(CLI::App* app, Common& c, bool mesh) {
  app->add_option("--d", c.d, "number of noise letters")->check(CLI::Range(1u, 64u));
  app->add_option("--gamma", c.gamma, "regularity as p/q");
  app->add_option("--max-norm", c.max_norm, "truncation degree N");
  app->add_option("--seed", c.seed, "64-bit seed");
  app->add_option("--out", c.out, "output file (stdout when omitted)");
  app->add_flag("--no-timestamp", c.no_timestamp, "omit the timestamp from provenance");
  if (mesh) {
    app->add_option("--mesh-level", c.mesh_level, "dyadic mesh level");
    app->add_option("--substeps", c.substeps, "RK4 substeps per log-ODE step")->check(CLI::PositiveNumber);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-index rough paths: algebra, lifts, log-ODE solver and translations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::version());

  Common c;
  bool inject_fault = false;

  auto* en = app.add_subcommand("enumerate", "list populated multi-indices of degree <= N");
  add_common(en, c, false);

  auto* ve = app.add_subcommand("verify", "run the exact identity suites");
  add_common(ve, c, false);
#ifdef MIRP_FAULT_INJECTION
  ve->add_flag("--inject-fault", inject_fault, "perturb one associativity coefficient (harness self-test)");
#endif

  LiftArgs la;
  auto* li = app.add_subcommand("lift", "lift a sampled or Brownian path");
  add_common(li, c, false);
  li->add_option("--samples", la.samples, "CSV with header t,x1,...,xd");
  li->add_flag("--brownian", la.brownian, "lattice Brownian motion");
  li->add_option("--mode", la.mode, "ito or strat");
  li->add_option("--n-steps", la.n_steps, "lattice steps (power of two)");
  li->add_option("--stride", la.stride, "lattice steps per grid increment");
  li->add_option("--horizon", la.horizon, "final time");

  SolveArgs sa;
  auto* so = app.add_subcommand("solve", "solve the RDE with the log-ODE method");
  add_common(so, c, true);
  so->add_option("--path", sa.path, "rough path JSON")->required();
  so->add_option("--field", sa.field, "polynomial vector field JSON")->required();
  so->add_option("--y0", sa.y0, "initial value");
  so->add_option("--sidecar", sa.sidecar, "JSON sidecar with the residual report");
  so->add_option("--coarsest", sa.coarsest, "coarsest dyadic level in the residual report");
  so->add_option("--finest", sa.finest, "finest dyadic level in the residual report");

  auto* dr = app.add_subcommand("davie-report", "Davie residuals and fitted slope");
  add_common(dr, c, true);
  dr->add_option("--path", sa.path, "rough path JSON")->required();
  dr->add_option("--field", sa.field, "polynomial vector field JSON")->required();
  dr->add_option("--y0", sa.y0, "initial value");
  dr->add_option("--coarsest", sa.coarsest, "coarsest dyadic level");
  dr->add_option("--finest", sa.finest, "finest dyadic level");

  std::string tr_path, tr_field, tr_ell;
  auto* tr = app.add_subcommand("translate", "translate a rough path by a character family");
  add_common(tr, c, false);
  tr->add_option("--path", tr_path, "rough path JSON")->required();
  tr->add_option("--translation", tr_ell, "translation JSON")->required();

  auto* tf = app.add_subcommand("translate-field", "translate a polynomial vector field");
  add_common(tf, c, false);
  tf->add_option("--field", tr_field, "polynomial vector field JSON")->required();
  tf->add_option("--translation", tr_ell, "translation JSON")->required();

  DemoArgs da;
  auto* de = app.add_subcommand("ito-strat-demo", "Monte-Carlo table of level-2 Stratonovich minus Ito");
  add_common(de, c, false);
  de->add_option("--paths", da.paths, "number of seeded paths");
  de->add_option("--n-steps", da.n_steps, "lattice steps on [0,1]");
  de->add_option("--checkpoints", da.checkpoints, "number of reporting times");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*en) return run_enumerate(c, en->count("--gamma") > 0);
    if (*ve) return run_verify(c, ve->count("--max-norm") > 0, inject_fault);
    if (*li) return run_lift(c, la);
    if (*so) return run_solve(c, sa);
    if (*dr) return run_davie_report(c, sa);
    if (*tr) return run_translate(c, tr_path, tr_ell);
    if (*tf) return run_translate_field(c, tr_field, tr_ell);
    if (*de) return run_ito_strat_demo(c, da);
  } catch (const Diverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDiverged;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
