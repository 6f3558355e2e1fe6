#pragma once

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "calculus.hpp"
#include "expression.hpp"
#include "odes.hpp"
#include "series.hpp"

namespace octode::cli {

using Json = nlohmann::ordered_json;

/// Compact JSON with every floating value at 17 significant digits; non-finite values become null.
inline void dump_to(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump();
        out += ':';
        dump_to(it.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump_to(j[i], out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
      } else {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
      }
      break;
    }
    default: out += j.dump();
  }
}

inline std::string dump(const Json& j) {
  std::string s;
  dump_to(j, s);
  return s;
}

inline Json tuple_json(const CdNum& z) {
  Json a = Json::array();
  for (int k = 0; k < z.dim(); ++k) a.push_back(z[k]);
  return a;
}

// ---------------------------------------------------------------- problem files

struct ProblemFile {
  int level = 2;
  std::string kind;
  std::map<std::string, std::string> ingredients;
  std::map<std::string, double> scalars;
  double alpha0 = 0.0;
  std::string eta = "0";
  GridSpec grid;

  bool has(const std::string& k) const { return ingredients.count(k) > 0; }
  Func func(const std::string& k) const {
    auto it = ingredients.find(k);
    if (it == ingredients.end()) throw Error(ErrorCode::InvalidArgument, "missing ingredient '" + k + "'");
    return Func::parse(it->second);
  }
  Func func_or(const std::string& k, const std::string& fallback) const {
    return Func::parse(has(k) ? ingredients.at(k) : fallback);
  }
  CdNum number(const std::string& k, const std::string& fallback) const {
    return parse_cdnum(has(k) ? ingredients.at(k) : fallback, 0);
  }
  double scalar(const std::string& k, double fallback) const {
    auto it = scalars.find(k);
    return it == scalars.end() ? fallback : it->second;
  }
  BoundaryData boundary() const { return {alpha0, Func::parse(eta)}; }
};

inline ProblemFile parse_problem(const Json& j) {
  ProblemFile p;
  try {
    p.level = j.value("algebra_level", 2);
    if (p.level < 2 || p.level > 4) throw Error(ErrorCode::InvalidArgument, "algebra_level must be 2, 3 or 4");
    p.kind = j.at("kind").get<std::string>();
    if (j.contains("ingredients"))
      for (auto it = j["ingredients"].begin(); it != j["ingredients"].end(); ++it)
        p.ingredients[it.key()] = it.value().get<std::string>();
    if (j.contains("scalars"))
      for (auto it = j["scalars"].begin(); it != j["scalars"].end(); ++it) p.scalars[it.key()] = it.value().get<double>();
    if (j.contains("boundary")) {
      const auto& b = j["boundary"];
      p.alpha0 = b.value("alpha0", 0.0);
      if (b.contains("eta")) p.eta = b["eta"].get<std::string>();
    }
    p.grid.level = p.level;
    if (j.contains("grid")) {
      const auto& g = j["grid"];
      p.grid.points = g.value("points", 50);
      p.grid.seed = g.value("seed", 0);
      p.grid.radius = g.value("radius", 0.3);
      p.grid.span = g.value("span", 1.0);
      p.grid.margin = g.value("margin", 0.05);
      p.grid.plane = g.value("plane", -1);
      if (g.contains("center_re")) p.grid.center_re = g["center_re"].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("problem file: ") + e.what());
  }
  return p;
}

inline ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SyntaxError, path + ": " + e.what());
  }
  return parse_problem(j);
}

/// Residual function of the problem described by the file, for user-supplied y.
using ResidualFn = std::function<double(const ScalarMap&, const CdNum&)>;

struct Built {
  Solution sol;
  ResidualFn residual;
  double alpha0 = 0.0;
};

inline GridSpec pgrid_of(const ProblemFile& p) {
  GridSpec g = parameter_grid(p.level, p.scalar("p_re", 0.2), p.scalar("p_span", 1.0), p.grid.radius, p.grid.points);
  g.seed = p.grid.seed;
  return g;
}

/// Sets up the problem; solves unless `solve` is false.
inline Built build(const ProblemFile& p, bool solve) {
  const GridSpec& g = p.grid;
  const BoundaryData bd = p.boundary();
  Built b;
  b.alpha0 = p.alpha0;
  auto wire = [&](const auto& pr) { b.residual = [pr](const ScalarMap& y, const CdNum& x) { return pr.residual(y, x); }; };
  const std::string& k = p.kind;

  if (k == "simplest") {
    SimplestProblem pr{p.func("f"), p.func_or("h", "1"), bd};
    wire(pr);
    if (solve) b.sol = solve_simplest(pr, g);
  } else if (k == "linear") {
    LinearProblem pr{p.func("b"), p.func("Q"), p.func_or("h", "1"), bd};
    wire(pr);
    if (solve) b.sol = solve_linear(pr, g);
  } else if (k == "separated") {
    SeparatedProblem pr{p.func("f"), p.func("s"), p.func_or("h", "1"), bd, std::nullopt};
    wire(pr);
    if (solve) b.sol = solve_separated(pr, g);
  } else if (k == "homogeneous") {
    HomogeneousProblem pr{p.func("f"), p.number("h", "1"),
                          p.scalar("left", 0.0) != 0.0 ? RatioSide::Left : RatioSide::Right, bd};
    wire(pr);
    if (solve) b.sol = solve_homogeneous_ratio(pr, g);
  } else if (k == "bernoulli") {
    BernoulliProblem pr{p.func("p"), p.func("s"), p.scalar("m", 2.0), p.func_or("h", "1"), bd};
    wire(pr);
    if (solve) b.sol = solve_bernoulli(pr, g);
  } else if (k == "generalized_bernoulli") {
    GeneralizedBernoulliProblem pr{p.func("f"), p.func("p"), p.func_or("s", "0"), p.scalar("k", 1.0),
                                   p.scalar("m", 2.0), p.func_or("h", "1"), bd};
    wire(pr);
    if (solve) b.sol = solve_generalized_bernoulli(pr, g);
  } else if (k == "quadratic") {
    QuadraticProblem pr{p.func("b"), p.func("c"), p.number("h", "1"), static_cast<int>(p.scalar("branch", 0)), bd};
    wire(pr);
    if (solve) b.sol = solve_quadratic(pr, g);
  } else if (k == "clairaut") {
    ClairautProblem pr{p.func("eta"), p.func_or("phi", "0"), bd};
    wire(pr);
    if (solve) {
      auto both = solve_clairaut(pr, g, pgrid_of(p));
      b.sol = p.scalar("general", 0.0) != 0.0 ? both.general : both.singular;
    }
  } else if (k == "lagrange") {
    LagrangeProblem pr;
    pr.f = p.func_or("f", "0");
    pr.s = p.func_or("s", "0");
    pr.eta = p.func("eta");
    pr.h = p.number("h", "1");
    pr.p0 = CdNum(0, p.scalar("p0", 0.5));
    pr.x0 = CdNum(0, p.scalar("x0", 0.0));
    pr.bd = bd;
    wire(pr);
    if (solve) {
      if (p.scalars.count("slope"))
        b.sol = lagrange_constant_slope(pr, CdNum(0, p.scalar("slope", 0.0)), g);
      else if (p.scalars.count("C"))
        b.sol = lagrange_sqrt_family(pr, p.scalar("C", 0.0), g);
      else
        b.sol = solve_lagrange(pr, pgrid_of(p));
    }
  } else if (k == "nth_order") {
    NthOrderProblem pr;
    pr.n = static_cast<int>(p.scalar("n", 2));
    pr.g = p.func("g");
    pr.h.assign(pr.n, p.func_or("h", "1"));
    pr.bd = bd;
    for (int j = 1; j < pr.n; ++j) pr.higher.push_back(p.func_or("eta" + std::to_string(j), "0"));
    wire(pr);
    if (solve) b.sol = solve_nth_order_iterated(pr, g);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown kind '" + k + "'");
  }
  return b;
}

inline Json report_json(const Solution& s, const std::string& kind) {
  Json r;
  r["kind"] = kind;
  r["max_residual"] = s.residual.max;
  r["mean_residual"] = s.residual.mean;
  r["tolerance"] = s.tolerance;
  r["grid_points"] = static_cast<int>(s.residual.points.size());
  r["solution"] = s.printable;
  r["branch_notes"] = s.branch_notes;
  r["failures"] = s.residual.failures;
  r["verified"] = s.verified;
  return r;
}

inline void report_text(const Json& r, std::ostream& out) {
  out << "kind: " << r["kind"].get<std::string>() << "\n";
  out << "solution: " << r["solution"].get<std::string>() << "\n";
  for (const auto& n : r["branch_notes"]) out << "note: " << n.get<std::string>() << "\n";
  const auto num = [](const Json& v) { return v.is_null() ? std::string("inf") : format_double(v.get<double>(), 6); };
  out << "max residual: " << num(r["max_residual"]) << "  mean: " << num(r["mean_residual"])
      << "  tolerance: " << num(r["tolerance"]) << "  points: " << r["grid_points"].get<int>() << "\n";
  for (const auto& f : r["failures"]) out << "failed: " << f.get<std::string>() << "\n";
  out << (r["verified"].get<bool>() ? "PASS" : "FAIL") << "\n";
}

inline int emit(const Json& r, bool json, std::ostream& out) {
  if (json)
    out << dump(r) << "\n";
  else
    report_text(r, out);
  return r["verified"].get<bool>() ? 0 : 1;
}

// ---------------------------------------------------------------- commands

inline int cmd_series(const std::string& file, int order, bool json, std::ostream& out);

inline int cmd_solve(const std::string& file, bool json, std::ostream& out) {
  const ProblemFile p = load_problem(file);
  if (p.kind == "cauchy") return cmd_series(file, static_cast<int>(p.scalar("order", 12)), json, out);
  return emit(report_json(build(p, true).sol, p.kind), json, out);
}

inline int cmd_check(const std::string& file, const std::string& expr, bool json, std::ostream& out) {
  const ProblemFile p = load_problem(file);
  const Built b = build(p, false);
  const Func y = Func::parse(expr);
  Solution s;
  s.y = y.map();
  s.printable = y.label();
  s.repr = Solution::Repr::ClosedForm;
  s.tolerance = p.scalar("tolerance", default_context().tolerance);
  const ResidualFn res = b.residual;
  finalize(s, residual_over(make_grid(detail::grid_for(p.grid, p.alpha0)), [&](const CdNum& x) { return res(s.y, x); }));
  return emit(report_json(s, p.kind), json, out);
}

inline int cmd_series(const std::string& file, int order, bool json, std::ostream& out) {
  const ProblemFile p = load_problem(file);
  if (p.kind != "cauchy") throw Error(ErrorCode::InvalidArgument, "series needs kind 'cauchy'");
  const Phrase F = parse_expression(p.ingredients.count("rhs") ? p.ingredients.at("rhs") : "0");
  const bool has_t = p.has("t_term");
  const Phrase T = parse_expression(has_t ? p.ingredients.at("t_term") : "0");
  CauchyProblem cp;
  cp.level = p.level;
  cp.t0 = p.alpha0;
  cp.rhs.push_back([F, T, has_t](const SeriesArgs& a) {
    MSeries r = compose(F, a.u[0]);
    if (has_t) r += compose(T, a.t);
    return r;
  });
  const CdNum u0 = parse_cdnum(p.eta, p.level);
  cp.initial.push_back([u0, order](const std::vector<MSeries>&) { return MSeries::constant(u0, 1, order); });
  const SeriesSolution s = cauchy_series_solve(cp, order);

  Json r;
  r["kind"] = p.kind;
  r["order"] = order;
  Json coeffs = Json::array();
  for (int k = 0; k <= order; ++k) coeffs.push_back(tuple_json(s.u[0].coeff(k)));
  r["coefficients"] = coeffs;
  r["radius"] = s.radius;
  r["max_residual"] = s.residual_max;
  r["tolerance"] = p.scalar("tolerance", tol::kNewton);
  r["grid_points"] = static_cast<int>(s.residual_points.size());
  r["solution"] = "truncated series in t - t0";
  r["branch_notes"] = Json::array({s.note});
  r["failures"] = Json::array();
  r["verified"] = s.residual_max <= r["tolerance"].get<double>();
  if (json) {
    out << dump(r) << "\n";
  } else {
    for (int k = 0; k <= order; ++k) out << "c" << k << " = " << to_string(s.u[0].coeff(k)) << "\n";
    out << "radius estimate: " << format_double(s.radius, 6) << "\n";
    out << "max residual: " << format_double(s.residual_max, 6) << "\n";
    out << (r["verified"].get<bool>() ? "PASS" : "FAIL") << "\n";
  }
  return r["verified"].get<bool>() ? 0 : 1;
}

inline int cmd_table(int level, bool json, std::ostream& out) {
  detail::check_level(level);
  const int n = dim_of(level);
  auto entry = [&](int j, int k) {
    const SignedBasis s = basis_product(level, j, k);
    return std::string(s.sign > 0 ? "+" : "-") + "e" + std::to_string(s.index);
  };
  if (json) {
    Json t = Json::array();
    for (int j = 0; j < n; ++j) {
      Json row = Json::array();
      for (int k = 0; k < n; ++k) row.push_back(entry(j, k));
      t.push_back(row);
    }
    out << dump(Json{{"level", level}, {"table", t}}) << "\n";
  } else {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        std::string e = entry(j, k);
        out << (k ? " " : "") << std::string(4 - std::min<size_t>(4, e.size()), ' ') << e;
      }
      out << "\n";
    }
  }
  return 0;
}

inline int cmd_integrate(const std::string& expr, const std::string& from, const std::string& to,
                         const std::vector<std::string>& via, const std::string& mode, bool json, std::ostream& out) {
  const Phrase f = parse_expression(expr);
  std::vector<CdNum> nodes{parse_cdnum(from, f.level())};
  for (const auto& v : via) nodes.push_back(parse_cdnum(v, f.level()));
  nodes.push_back(parse_cdnum(to, f.level()));
  const Path path(nodes);
  Json r;
  r["integrand"] = print_phrase(f);
  std::vector<std::pair<std::string, CdNum>> vals;
  if (mode == "symbolic" || mode == "both") vals.emplace_back("symbolic", line_integral(f, path, IntegralMode::Symbolic));
  if (mode == "quadrature" || mode == "both")
    vals.emplace_back("quadrature", line_integral(f, path, IntegralMode::Quadrature));
  if (vals.empty()) throw Error(ErrorCode::InvalidArgument, "mode must be symbolic, quadrature or both");
  for (const auto& [k, v] : vals) r[k] = tuple_json(v);
  if (json) {
    out << dump(r) << "\n";
  } else if (vals.size() == 1) {
    out << to_string(vals[0].second) << "\n";
  } else {
    for (const auto& [k, v] : vals) out << k << ": " << to_string(v) << "\n";
    out << "difference: " << format_double((vals[0].second - vals[1].second).norm(), 6) << "\n";
  }
  return 0;
}

inline int cmd_eval(const std::string& expr, const std::string& at, bool json, std::ostream& out) {
  const Phrase f = parse_expression(expr);
  const CdNum z = parse_cdnum(at, f.level());
  const CdNum v = f(z);
  if (json)
    out << dump(Json{{"value", tuple_json(v)}}) << "\n";
  else
    out << to_string(v) << "\n";
  return 0;
}

/// Entry point shared by the tool and the tests. args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"octode: differential equations over Cayley-Dickson algebras"};
  app.require_subcommand(1);
  bool json = false;
  app.add_flag("--json", json, "machine-readable output");

  std::string file, expr, from, to, at, mode = "symbolic";
  std::vector<std::string> via;
  int level = 2, order = 12;

  auto* solve = app.add_subcommand("solve", "solve a problem file and verify the residual");
  solve->add_option("problem", file)->required();
  auto* check = app.add_subcommand("check", "verify a user-supplied solution y(z)");
  check->add_option("problem", file)->required();
  check->add_option("solution", expr)->required();
  auto* integ = app.add_subcommand("integrate", "line integral of f along a polyline");
  integ->add_option("expr", expr)->required();
  integ->add_option("--from", from)->required();
  integ->add_option("--to", to)->required();
  integ->add_option("--path", via, "intermediate nodes");
  integ->add_option("--mode", mode, "symbolic, quadrature or both");
  auto* ev = app.add_subcommand("eval", "evaluate an expression");
  ev->add_option("expr", expr)->required();
  ev->add_option("--at", at)->required();
  auto* table = app.add_subcommand("table", "basis multiplication table");
  table->add_option("level", level)->required();
  auto* series = app.add_subcommand("series", "power-series Cauchy solve");
  series->add_option("problem", file)->required();
  series->add_option("--order", order);
  for (auto* s : {solve, check, integ, ev, table, series}) s->add_flag("--json", json, "machine-readable output");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*solve) return cmd_solve(file, json, out);
    if (*check) return cmd_check(file, expr, json, out);
    if (*integ) return cmd_integrate(expr, from, to, via, mode, json, out);
    if (*ev) return cmd_eval(expr, at, json, out);
    if (*table) return cmd_table(level, json, out);
    if (*series) return cmd_series(file, order, json, out);
  } catch (const Error& e) {
    if (json)
      out << dump(Json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}}) << "\n";
    else
      err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    if (json)
      out << dump(Json{{"error", "Internal"}, {"message", e.what()}}) << "\n";
    else
      err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace octode::cli
