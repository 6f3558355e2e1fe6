#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "octode/cli.hpp"

using namespace octode;

namespace {
struct Out {
  int code;
  std::string out, err;
};

Out call(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int c = cli::run(args, o, e);
  return {c, o.str(), e.str()};
}

std::string problem(const std::string& name) { return std::string(OCTODE_PROBLEMS_DIR) + "/" + name; }

std::string write_temp(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p.string();
}
}  // namespace

TEST(Cli, TableAndEval) {
  const auto t = call({"table", "2"});
  EXPECT_EQ(t.code, 0);
  std::istringstream rows(t.out);
  std::string line;
  std::getline(rows, line);
  std::getline(rows, line);
  std::istringstream cells(line);
  std::vector<std::string> row{std::istream_iterator<std::string>(cells), {}};
  ASSERT_EQ(row.size(), 4u);
  EXPECT_EQ(row[2], "+e3");

  const auto j = call({"table", "3", "--json"});
  const auto doc = cli::Json::parse(j.out);
  EXPECT_EQ(doc["table"][1][2], "+e3");
  EXPECT_EQ(doc["table"][2][1], "-e3");
  EXPECT_EQ(doc["table"].size(), 8u);

  EXPECT_EQ(call({"eval", "e1*z*e2", "--at", "e4"}).out, "-1*e7\n");
  EXPECT_EQ(call({"eval", "(e1*(z*e2))", "--at", "e4"}).out, "1*e7\n");
}

TEST(Cli, Integrate) {
  EXPECT_EQ(call({"integrate", "z", "--from", "0", "--to", "1"}).out, "0.5\n");
  const auto both = call({"integrate", "z^2 + (e1*z)*e2", "--from", "0", "--to", "e1 + e2", "--path", "e1", "--mode",
                          "both", "--json"});
  ASSERT_EQ(both.code, 0);
  const auto doc = cli::Json::parse(both.out);
  for (size_t k = 0; k < doc["symbolic"].size(); ++k)
    EXPECT_NEAR(doc["symbolic"][k].get<double>(), doc["quadrature"][k].get<double>(), 1e-8);
}

TEST(Cli, SolveBundledProblems) {
  for (const char* f : {"clairaut_quarter_square.json", "linear_quaternion.json", "separated_octonion.json", "lagrange_sqrt.json",
                        "cauchy_exp.json"}) {
    const auto r = call({"solve", problem(f), "--json"});
    EXPECT_EQ(r.code, 0) << f << r.out << r.err;
    const auto doc = cli::Json::parse(r.out);
    EXPECT_TRUE(doc["verified"].get<bool>()) << f;
    EXPECT_LE(doc["max_residual"].get<double>(), doc["tolerance"].get<double>()) << f;
    for (const char* key : {"max_residual", "tolerance", "grid_points", "solution", "branch_notes"})
      EXPECT_TRUE(doc.contains(key)) << f << " " << key;
  }
  const auto text = call({"solve", problem("clairaut_quarter_square.json")});
  EXPECT_NE(text.out.find("y = x^2"), std::string::npos);
  EXPECT_NE(text.out.find("PASS"), std::string::npos);
}

TEST(Cli, JsonIsDeterministic) {
  for (const char* f : {"clairaut_quarter_square.json", "separated_octonion.json", "cauchy_exp.json"}) {
    const auto a = call({"solve", problem(f), "--json"}), b = call({"solve", problem(f), "--json"});
    EXPECT_EQ(a.out, b.out) << f;
    EXPECT_FALSE(a.out.empty());
  }
}

TEST(Cli, ExitCodeFollowsResidual) {
  const std::string f = problem("clairaut_quarter_square.json");
  const auto good = call({"check", f, "z^2", "--json"});
  EXPECT_EQ(good.code, 0);
  const auto gd = cli::Json::parse(good.out);
  EXPECT_LE(gd["max_residual"].get<double>(), gd["tolerance"].get<double>());

  const auto bad = call({"check", f, "z^2 + 0.001", "--json"});
  EXPECT_EQ(bad.code, 1);
  const auto bd = cli::Json::parse(bad.out);
  EXPECT_GT(bd["max_residual"].get<double>(), bd["tolerance"].get<double>());
  EXPECT_FALSE(bd["verified"].get<bool>());
  EXPECT_NE(call({"check", f, "z^2 + 0.001"}).out.find("FAIL"), std::string::npos);
}

TEST(Cli, Errors) {
  const auto missing = call({"solve", "/nonexistent/problem.json", "--json"});
  EXPECT_EQ(missing.code, 2);
  EXPECT_TRUE(cli::Json::parse(missing.out).contains("error"));

  const std::string bad_kind = write_temp("octode_bad_kind.json",
                                          R"({"algebra_level": 2, "kind": "riccati", "ingredients": {}, "scalars": {},
                                              "boundary": {"alpha0": 0, "eta": "0"}})");
  const auto k = call({"solve", bad_kind, "--json"});
  EXPECT_EQ(k.code, 2);
  const auto doc = cli::Json::parse(k.out);
  EXPECT_EQ(doc["error"], "InvalidArgument");

  const auto syn = call({"eval", "z +* 1", "--at", "0", "--json"});
  EXPECT_EQ(syn.code, 2);
  EXPECT_EQ(cli::Json::parse(syn.out)["error"], "SyntaxError");
  const auto unk = call({"eval", "w", "--at", "0"});
  EXPECT_EQ(unk.code, 2);
  EXPECT_NE(unk.err.find("UnknownSymbol"), std::string::npos);

  EXPECT_NE(call({"table", "7"}).code, 0);
  EXPECT_NE(call({}).code, 0);
}

TEST(Cli, SeriesCommand) {
  const auto r = call({"series", problem("cauchy_exp.json"), "--order", "10", "--json"});
  ASSERT_EQ(r.code, 0) << r.out;
  const auto doc = cli::Json::parse(r.out);
  ASSERT_EQ(doc["coefficients"].size(), 11u);
  double f = 1;
  for (int k = 0; k <= 10; ++k) {
    if (k) f *= k;
    EXPECT_NEAR(doc["coefficients"][k][0].get<double>(), 1.0 / f, 1e-12);
  }
}

TEST(Cli, NonFiniteBecomesNull) {
  cli::Json j;
  j["a"] = std::numeric_limits<double>::infinity();
  j["b"] = 0.1;
  EXPECT_EQ(cli::dump(j), R"({"a":null,"b":0.10000000000000001})");
}
