#include "pfi/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pfi/darboux.hpp"
#include "pfi/integrals.hpp"
#include "pfi/numlab.hpp"
#include "pfi/problem.hpp"

namespace pfi::cli {

using nlohmann::json;

namespace {

struct Outcome {
  json report;
  int code = kExitOk;
};

// Failure of the input rather than of a check.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string problem;
  bool verbose = false;
  std::size_t samples = 8;
  std::uint64_t seed = 0;
  // find-darboux
  unsigned degree = 2;
  std::string cofactor;
  std::vector<std::string> cofactor_basis;
  std::size_t attempts = 16;
  // build-integral
  int theorem = 0;
  std::string f;
  bool allow_improper = false;
  // verify, independence, simulate
  std::vector<std::string> integrals;
  // simulate
  std::vector<double> x0;
  double t_end = 10;
  double dt = 1e-3;
  std::string method = "rk4";
  double tolerance = 1e-10;
  std::string csv;
};

Polynomial parse_flag(const std::string& text, const VarTable& vars, Mode mode, const Bindings& b, const char* flag) {
  try {
    return parse_expression(text, vars, mode, b);
  } catch (const ParseError& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

json residual_json(const Polynomial& residual, const VarTable& vars) {
  return {{"zero", residual.is_zero()}, {"max_abs_coefficient", residual.max_abs_coefficient()},
          {"text", render(residual, vars)}};
}

// ------------------------------------------------------------ check-structure

bool grid_is_skew(const std::vector<std::vector<Polynomial>>& grid) {
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = i; j < grid.size(); ++j)
      if (!vanishes(grid[i][j] + grid[j][i])) return false;
  return true;
}

Outcome check_structure(const ProblemDef& def, const Options& opt) {
  Outcome o;
  auto& r = o.report;
  r["source"] = to_string(def.source());
  r["n"] = def.n();
  r["m"] = def.m;
  r["s"] = def.s;
  if (def.structure && !grid_is_skew(*def.structure)) {
    r["skew"] = false;
    r["ok"] = false;
    o.code = kExitFailed;
    return o;
  }
  r["skew"] = true;
  const auto sys = make_system(def);
  const auto& j = sys.structure();

  const auto jacobi = check_jacobi(j);
  json violations = json::array();
  for (const auto& v : jacobi.violations) {
    if (violations.size() == 10) break;
    violations.push_back({{"i", v.i + 1}, {"j", v.j + 1}, {"k", v.k + 1}, {"residual", render(v.residual, def.variables)}});
  }
  r["jacobi"] = {{"ok", jacobi.ok}, {"violations", violations}, {"violation_count", jacobi.violations.size()}};

  const auto rank = generic_rank(j, opt.samples, opt.seed);
  r["generic_rank"] = rank;
  r["symplectic"] = rank == def.n();

  bool casimirs_ok = true;
  json casimirs = json::array();
  for (const auto& d : sys.casimirs()) {
    const bool ok = check_casimir(j, d);
    casimirs_ok = casimirs_ok && ok;
    casimirs.push_back({{"expression", render(d, def.variables)}, {"ok", ok}});
  }
  r["casimirs"] = casimirs;

  bool canonical_ok = true;
  if (!def.structure) {
    const auto inst = make_instance(def);
    const auto back = transform_structure(j, inst.chart_map());
    const auto target = canonical_matrix(def.m, def.s, back.mode());
    for (std::size_t a = 0; a < def.n(); ++a)
      for (std::size_t b = 0; b < def.n(); ++b) canonical_ok = canonical_ok && vanishes(back(a, b) - target(a, b));
    r["transforms_to_canonical"] = canonical_ok;
  }
  const bool ok = jacobi.ok && casimirs_ok && canonical_ok;
  r["ok"] = ok;
  o.code = ok ? kExitOk : kExitFailed;
  return o;
}

// ------------------------------------------------------------ find-darboux

Monomial monomial_flag(const std::string& text, const ProblemDef& def) {
  const auto p = parse_flag(text, def.variables, Mode::Exact, {}, "--cofactor-basis");
  if (p.size() != 1 || !p.terms().begin()->second.is_one())
    throw UsageError("--cofactor-basis: '" + text + "' is not a monic monomial");
  return p.terms().begin()->first;
}

Outcome find_darboux(const ProblemDef& def, const Options& opt) {
  const auto sys = make_system(def);
  const auto field = hamiltonian_vector_field(sys);
  Outcome o;
  auto& r = o.report;
  r["degree"] = opt.degree;
  json found = json::array();

  auto describe = [&](const Polynomial& f, const Polynomial& k) {
    const auto check = verify_candidate(field, f, k);
    return json{{"F", render(f, def.variables)},
                {"K", render(k, def.variables)},
                {"mode", to_string(f.mode())},
                {"certified", check.ok},
                {"proper", check.proper},
                {"residual_max", check.residual.max_abs_coefficient()}};
  };

  if (!opt.cofactor_basis.empty()) {
    std::vector<Monomial> basis;
    for (const auto& t : opt.cofactor_basis) basis.push_back(monomial_flag(t, def));
    BilinearSearchOptions search;
    search.degree = opt.degree;
    search.attempts = opt.attempts;
    search.seed = opt.seed;
    r["method"] = "bilinear";
    r["seed"] = opt.seed;
    r["attempts"] = opt.attempts;
    for (const auto& c : search_bilinear_restricted(field, basis, search)) found.push_back(describe(c.F, c.K));
  } else {
    std::optional<Polynomial> k = def.cofactor;
    if (!opt.cofactor.empty()) k = parse_flag(opt.cofactor, def.variables, def.mode, def.parameters, "--cofactor");
    if (!k) throw UsageError("find-darboux needs a cofactor (file or --cofactor) or --cofactor-basis");
    r["method"] = "cofactor";
    r["cofactor"] = render(*k, def.variables);
    Polynomial kk = *k;
    if (kk.mode() != field.front().mode()) kk = to_float(kk);
    for (const auto& f : search_with_cofactor(field, kk, opt.degree)) found.push_back(describe(f, kk));
  }
  r["candidates"] = found;
  const bool any = std::any_of(found.begin(), found.end(), [](const json& c) { return c["certified"].get<bool>(); });
  r["ok"] = any;
  o.code = any ? kExitOk : kExitFailed;
  return o;
}

// ------------------------------------------------------------ build-integral

Outcome build_integral(const ProblemDef& def, const Options& opt) {
  std::optional<TheoremKind> kind;
  if (opt.theorem != 0) kind = static_cast<TheoremKind>(opt.theorem - 1);
  const auto inst = make_instance(def, kind);
  std::optional<Polynomial> f = def.F;
  if (!opt.f.empty()) f = parse_flag(opt.f, def.chart_variables, def.mode, def.parameters, "--F");
  if (!f) throw UsageError("build-integral needs F (file or --F)");

  Outcome o;
  auto& r = o.report;
  r["theorem"] = to_string(inst.kind());
  json flags = json::array();
  for (const auto& h : hypothesis_report(inst, f).flags)
    flags.push_back({{"name", h.name}, {"ok", h.ok}, {"detail", h.detail}});
  r["hypotheses"] = flags;
  r["F"] = render(*f, def.chart_variables);

  std::optional<IntegralConstruction> built;
  try {
    built = construct_HF(inst, *f, false);
  } catch (const NotDarboux& e) {
    r["ok"] = false;
    r["error"] = e.what();
    o.code = kExitFailed;
    return o;
  }
  const auto& c = *built;
  r["cofactor"] = render(c.cofactor, def.chart_variables);
  r["proper"] = c.proper;
  if (!c.proper && !opt.allow_improper) {
    r["ok"] = false;
    r["error"] = "F is not a proper Darboux polynomial (pass --allow-improper to build anyway)";
    o.code = kExitFailed;
    return o;
  }
  r["H_F_chart"] = render(c.chart, def.chart_variables);
  r["H_F"] = render(c.native, def.variables);
  r["H_F_mode"] = to_string(c.native.mode());
  r["rationalized"] = c.rationalized;
  r["total_degree"] = c.native.total_degree();

  const auto sys = build_system(inst, def.variables);
  const auto v = verify_first_integral(sys, c.native);
  r["first_integral"] = {{"ok", v.ok}, {"residual", residual_json(v.residual, def.variables)}};
  const auto ind = independence_report(sys, c.native, opt.samples, opt.seed);
  r["additional"] = ind.additional;
  r["ranks"] = ind.ranks;
  r["ok"] = v.ok;
  o.code = v.ok ? kExitOk : kExitFailed;
  return o;
}

// ------------------------------------------------------------ verify, independence

Polynomial single_integral(const ProblemDef& def, const Options& opt) {
  if (opt.integrals.size() != 1) throw UsageError("exactly one --integral is required");
  return parse_flag(opt.integrals.front(), def.variables, def.mode, def.parameters, "--integral");
}

Outcome verify(const ProblemDef& def, const Options& opt) {
  const auto sys = make_system(def);
  const auto integral = single_integral(def, opt);
  const auto v = verify_first_integral(sys, integral);
  Outcome o;
  o.report = {{"integral", render(integral, def.variables)}, {"ok", v.ok}, {"residual", residual_json(v.residual, def.variables)}};
  o.code = v.ok ? kExitOk : kExitFailed;
  return o;
}

Outcome independence(const ProblemDef& def, const Options& opt) {
  const auto sys = make_system(def);
  const auto integral = single_integral(def, opt);
  const auto ind = independence_report(sys, integral, opt.samples, opt.seed);
  Outcome o;
  o.report = {{"integral", render(integral, def.variables)},
              {"additional", ind.additional},
              {"ranks", ind.ranks},
              {"target_rank", sys.casimirs().size() + 2},
              {"samples", opt.samples},
              {"seed", opt.seed}};
  o.report["ok"] = ind.additional;
  o.code = ind.additional ? kExitOk : kExitFailed;
  return o;
}

// ------------------------------------------------------------ simulate

Outcome simulate(const ProblemDef& def, const Options& opt) {
  const auto sys = make_system(def);
  numlab::IntegrateOptions io;
  if (opt.method == "rk4") io.method = numlab::Method::RK4;
  else if (opt.method == "rk45") io.method = numlab::Method::RK45;
  else throw UsageError("--method must be rk4 or rk45");
  io.dt = opt.dt;
  io.tolerance = opt.tolerance;

  std::vector<std::pair<std::string, Polynomial>> invariants = {{"H", sys.hamiltonian()}};
  for (std::size_t j = 0; j < sys.casimirs().size(); ++j)
    invariants.emplace_back("D" + std::to_string(j + 1), sys.casimirs()[j]);
  for (std::size_t j = 0; j < opt.integrals.size(); ++j)
    invariants.emplace_back("I" + std::to_string(j + 1),
                            parse_flag(opt.integrals[j], def.variables, def.mode, def.parameters, "--integral"));

  const auto traj = numlab::integrate(sys, opt.x0, opt.t_end, io);
  Outcome o;
  auto& r = o.report;
  r["method"] = numlab::to_string(io.method);
  r["dt"] = io.dt;
  if (io.method == numlab::Method::RK45) r["tolerance"] = io.tolerance;
  r["t_end"] = traj.times.back();
  r["steps"] = traj.times.size() - 1;
  r["completed"] = traj.completed;
  if (!traj.completed) r["message"] = traj.message;
  r["final_state"] = traj.states.back();
  json drift = json::array();
  for (const auto& d : numlab::drift_report(traj, invariants)) drift.push_back({{"name", d.name}, {"max_relative", d.max_relative}});
  r["drift"] = drift;
  if (!opt.csv.empty()) {
    std::ofstream file(opt.csv);
    if (!file) throw UsageError("--csv: cannot write " + opt.csv);
    numlab::write_csv(file, traj, def.variables.names(), invariants);
    r["csv"] = opt.csv;
  }
  r["ok"] = traj.completed;
  o.code = traj.completed ? kExitOk : kExitFailed;
  return o;
}

void summarize(std::ostream& err, const std::string& command, const Outcome& o) {
  err << command << ": " << (o.code == kExitOk ? "ok" : o.code == kExitFailed ? "FAILED" : "error");
  for (const char* key : {"error", "H_F", "generic_rank", "additional", "residual"}) {
    if (!o.report.contains(key)) continue;
    const auto& v = o.report[key];
    err << "\n  " << key << ": " << (v.is_object() && v.contains("text") ? v["text"].get<std::string>() : v.dump());
  }
  err << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Poisson systems: structure checks, Darboux polynomials and polynomial first integrals", "pfi"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  Options opt;
  app.add_flag("-v,--verbose", opt.verbose, "Human-readable summary on stderr");

  auto problem = [&](CLI::App* sub) { sub->add_option("problem", opt.problem, "Problem file (JSON)")->required(); };
  auto sampling = [&](CLI::App* sub) {
    sub->add_option("--samples", opt.samples, "Random sample points")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "Random seed");
  };

  auto* check = app.add_subcommand("check-structure", "Skew symmetry, Jacobi identity, rank and Casimirs");
  problem(check);
  sampling(check);

  auto* find = app.add_subcommand("find-darboux", "Search Darboux polynomials of the file's system");
  problem(find);
  find->add_option("--degree", opt.degree, "Degree bound for F");
  find->add_option("--cofactor", opt.cofactor, "Fixed cofactor K (native variables)");
  find->add_option("--cofactor-basis", opt.cofactor_basis, "Monomials spanning K, e.g. q2,1")->delimiter(',');
  find->add_option("--attempts", opt.attempts, "Random starts for the bilinear search")->check(CLI::PositiveNumber);
  find->add_option("--seed", opt.seed, "Random seed");

  auto* build = app.add_subcommand("build-integral", "Construct H_F = F(q,p) F(q,-p) in native variables");
  problem(build);
  build->add_option("--theorem", opt.theorem, "1, 2 or 3 (default: inferred from the file)")->check(CLI::Range(1, 3));
  build->add_option("--F", opt.f, "Darboux polynomial in chart variables (overrides the file)");
  build->add_flag("--allow-improper", opt.allow_improper, "Accept F with zero cofactor");
  sampling(build);

  auto* ver = app.add_subcommand("verify", "Exact Lie-derivative check of a candidate first integral");
  problem(ver);
  ver->add_option("--integral", opt.integrals, "Expression in native variables")->required();

  auto* ind = app.add_subcommand("independence", "Sampled rank of grad H, grad D_j and grad I");
  problem(ind);
  ind->add_option("--integral", opt.integrals, "Expression in native variables")->required();
  sampling(ind);

  auto* sim = app.add_subcommand("simulate", "Integrate the system and report invariant drift");
  problem(sim);
  sim->add_option("--x0", opt.x0, "Initial state, comma separated")->required()->delimiter(',');
  sim->add_option("--t-end", opt.t_end, "Final time");
  sim->add_option("--dt", opt.dt, "Step (rk4) or initial step (rk45)");
  sim->add_option("--method", opt.method, "rk4 or rk45");
  sim->add_option("--tol", opt.tolerance, "rk45 error tolerance");
  sim->add_option("--csv", opt.csv, "Write the trajectory as CSV");
  sim->add_option("--integral", opt.integrals, "Extra invariant to monitor (repeatable)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    json report{{"ok", false}, {"error", e.what()}};
    if (!app.get_subcommands().empty()) report["command"] = app.get_subcommands().front()->get_name();
    out << report.dump(2) << '\n';
    err << app.help();
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  Outcome o;
  try {
    const auto def = load_problem(opt.problem);
    if (command == "check-structure") o = check_structure(def, opt);
    else if (command == "find-darboux") o = find_darboux(def, opt);
    else if (command == "build-integral") o = build_integral(def, opt);
    else if (command == "verify") o = verify(def, opt);
    else if (command == "independence") o = independence(def, opt);
    else o = simulate(def, opt);
    o.report["problem"] = def.name;
  } catch (const std::exception& e) {
    o.report = {{"ok", false}, {"error", e.what()}};
    o.code = kExitUsage;
  }
  o.report["command"] = command;
  out << o.report.dump(2) << '\n';
  if (opt.verbose) summarize(err, command, o);
  return o.code;
}

}  // namespace pfi::cli
