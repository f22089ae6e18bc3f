#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "test_helpers.hpp"
#include "starpde/problem_io.hpp"

using namespace starpde;
using starpde::testing::simple_spec;

namespace {

std::string data_file(const char* name) { return std::string(STARPDE_DATA_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(STARPDE_CLI_PATH) + " " + args + " > cli_stdout.txt 2> cli_stderr.txt";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("every shipped problem file loads and the sound ones validate clean") {
  const char* sound[] = {"heat_neumann_1edge.json", "kirchhoff_heat_3edge.json",
                         "kirchhoff_elliptic_2edge.json", "quasilinear_sin_1edge.json",
                         "truncation_bump_2edge.json"};
  for (const char* name : sound) {
    ProblemSpec p = load_problem(data_file(name));
    ValidationReport rep = validate_assumptions(p);
    INFO(name, ":\n", rep.to_text());
    CHECK_FALSE(rep.has_fail());
  }
  ProblemSpec broken = load_problem(data_file("broken_monotonicity.json"));
  CHECK(validate_assumptions(broken).has_fail());
}

TEST_CASE("schema violations carry JSON-pointer paths") {
  try {
    load_problem_text(R"({"junction": {"edges": 2, "lengths": [1.0]},
      "coefficients": {}, "envelope": {}, "horizon": 1.0})");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.pointer == "/junction/lengths");
  }
  try {
    load_problem_text(R"({"junction": {"edges": 1, "lengths": [1.0]},
      "coefficients": {"sigma": ["t + 1"], "hamiltonian": ["0"],
        "vertex_condition": "p1", "initial": ["0"], "outer_boundary": ["0"]},
      "envelope": {"m": 2, "nu_lower": 1, "nu_upper": 1, "c_h": 1,
        "root_b": 0, "root_B": [0]},
      "horizon": 1.0})");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.pointer == "/coefficients/sigma/0");
    CHECK(std::string(e.what()).find("'t'") != std::string::npos);
  }
  CHECK_THROWS_AS(load_problem_text("not json"), SchemaError);
  CHECK_THROWS_AS(load_problem(data_file("no_such_file.json")), SchemaError);
}

TEST_CASE("a single-edge one-step export has six data rows") {
  ProblemSpec p = simple_spec(1, {1.0}, "1", "u-1", "p1", "1", "1", 1.0, 1.0, {0.0});
  RotheConfig cfg;
  cfg.steps = 2;  // scheme minimum; export the first two snapshots' worth below
  cfg.nodes_per_edge = 3;
  ParabolicSolution sol = solve_parabolic(p, cfg);
  REQUIRE(sol.completed);
  export_solution(sol, "export_test.csv", ExportFormat::Csv);
  std::istringstream is(slurp("export_test.csv"));
  std::string line;
  std::getline(is, line);
  CHECK(line == "edge,k,t,x,u,du_dx");
  int rows = 0;
  while (std::getline(is, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 9);  // 3 snapshots x 3 nodes; n = 1 would give 6
}

TEST_CASE("re-export is byte identical and round-trips at full precision") {
  ProblemSpec p = load_problem(data_file("kirchhoff_heat_3edge.json"));
  RotheConfig cfg;
  cfg.steps = 4;
  cfg.nodes_per_edge = 17;
  ParabolicSolution sol = solve_parabolic(p, cfg);
  REQUIRE(sol.completed);
  export_solution(sol, "export_a.csv", ExportFormat::Csv);
  export_solution(sol, "export_b.csv", ExportFormat::Csv);
  CHECK(slurp("export_a.csv") == slurp("export_b.csv"));

  // reading the u column back reproduces the sup norm exactly
  double sup_file = 0.0;
  std::istringstream is(slurp("export_a.csv"));
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    std::size_t at = 0;
    for (int field = 0; field < 4; ++field) at = line.find(',', at) + 1;
    sup_file = std::max(sup_file, std::abs(std::strtod(line.c_str() + at, nullptr)));
  }
  double sup_mem = 0.0;
  for (int k = 0; k <= 4; ++k) sup_mem = std::max(sup_mem, sup_norm(sol.snapshot(k)));
  CHECK(sup_file == doctest::Approx(sup_mem).epsilon(1e-15));

  export_solution(sol, "export_a.jsonl", ExportFormat::Jsonl);
  std::istringstream js(slurp("export_a.jsonl"));
  int rows = 0;
  while (std::getline(js, line))
    if (!line.empty()) {
      auto obj = nlohmann::json::parse(line);
      CHECK(obj.contains("edge"));
      CHECK(obj.contains("du_dx"));
      ++rows;
    }
  CHECK(rows == 3 * 5 * 17);
}

TEST_CASE("vertex rows repeat identically across edges in the export") {
  ProblemSpec p = load_problem(data_file("kirchhoff_heat_3edge.json"));
  RotheConfig cfg;
  cfg.steps = 2;
  cfg.nodes_per_edge = 5;
  ParabolicSolution sol = solve_parabolic(p, cfg);
  REQUIRE(sol.completed);
  export_solution(sol, "export_v.csv", ExportFormat::Csv);
  std::istringstream is(slurp("export_v.csv"));
  std::string line;
  std::getline(is, line);
  std::vector<std::string> vertex_u[3];
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    int edge = line[0] - '1';
    std::size_t at = 0;
    std::vector<std::string> fields;
    while (true) {
      std::size_t comma = line.find(',', at);
      fields.push_back(line.substr(at, comma - at));
      if (comma == std::string::npos) break;
      at = comma + 1;
    }
    if (fields[3] == "0") vertex_u[edge].push_back(fields[4]);
  }
  CHECK(vertex_u[0] == vertex_u[1]);
  CHECK(vertex_u[1] == vertex_u[2]);
}

TEST_CASE("a dt-ladder on the heat fixture fits first order") {
  ProblemSpec p = load_problem(data_file("heat_neumann_1edge.json"));
  ConvergenceRequest req;
  req.kind = LadderKind::TimeSteps;
  req.ladder = {8, 16, 32, 64};
  req.fixed_nodes = 201;
  for (int i = 0; i < 1; ++i)
    req.reference.push_back(Coefficient::parse(
        "exp(-2.4674011002723395*t)*cos(1.5707963267948966*x)", CoeffKind::Reference));
  ConvergenceReport rep = run_convergence(p, req);
  INFO(rep.to_text());
  CHECK(rep.applicable);
  CHECK(rep.fitted_order == doctest::Approx(1.0).epsilon(0.15));
  CHECK(rep.pass);
}

TEST_CASE("an h-ladder against the finest grid fits second order") {
  ProblemSpec p = load_problem(data_file("heat_neumann_1edge.json"));
  ConvergenceRequest req;
  req.kind = LadderKind::Nodes;
  req.ladder = {26, 51, 101, 201};
  req.fixed_steps = 64;
  ConvergenceReport rep = run_convergence(p, req);
  INFO(rep.to_text());
  CHECK(rep.applicable);
  CHECK(rep.rungs.size() == 3);  // finest rung is the reference
  CHECK(rep.fitted_order >= 1.9);
  CHECK(rep.pass);
}

TEST_CASE("the all-zero problem reports NOT-APPLICABLE") {
  ProblemSpec p = simple_spec(1, {1.0}, "1", "0", "p1", "0", "0", 1e-9, 0.0, {0.0});
  ConvergenceRequest req;
  req.kind = LadderKind::TimeSteps;
  req.ladder = {4, 8, 16};
  req.fixed_nodes = 51;
  req.reference.push_back(Coefficient::parse("0", CoeffKind::Reference));
  ConvergenceReport rep = run_convergence(p, req);
  CHECK_FALSE(rep.applicable);
  CHECK(rep.pass);
  CHECK(rep.to_text().find("NOT-APPLICABLE") != std::string::npos);
}

TEST_CASE("ladder validation") {
  ProblemSpec p = load_problem(data_file("heat_neumann_1edge.json"));
  ConvergenceRequest req;
  req.kind = LadderKind::TimeSteps;
  req.ladder = {8, 4};
  CHECK_THROWS_AS(run_convergence(p, req), ConfigError);
  req.ladder = {4, 8};
  CHECK_THROWS_AS(run_convergence(p, req), ConfigError);
}

TEST_CASE("CLI: exit codes for success, validation failure, and bad input") {
  CHECK(run_cli("validate \"" + data_file("heat_neumann_1edge.json") + "\"") == 0);
  CHECK(run_cli("validate \"" + data_file("broken_monotonicity.json") + "\"") == 2);
  CHECK(run_cli("validate \"" + data_file("no_such.json") + "\"") == 3);
  CHECK(run_cli("solve-elliptic \"" + data_file("kirchhoff_elliptic_2edge.json") +
                "\" --nodes 101") == 0);
}

TEST_CASE("CLI: repeated runs are byte identical") {
  std::string fixture = data_file("heat_neumann_1edge.json");
  REQUIRE(run_cli("solve-parabolic \"" + fixture + "\" --steps 8 --nodes 51 --out run_a.csv") == 0);
  std::string first_stdout = slurp("cli_stdout.txt");
  REQUIRE(run_cli("solve-parabolic \"" + fixture + "\" --steps 8 --nodes 51 --out run_b.csv") == 0);
  CHECK(slurp("run_a.csv") == slurp("run_b.csv"));
  CHECK(slurp("cli_stdout.txt") == first_stdout);
}

TEST_CASE("CLI: validate before solve does not change the solve") {
  std::string fixture = data_file("heat_neumann_1edge.json");
  REQUIRE(run_cli("solve-parabolic \"" + fixture + "\" --steps 8 --nodes 51 --out run_c.csv") == 0);
  REQUIRE(run_cli("validate \"" + fixture + "\"") == 0);
  REQUIRE(run_cli("solve-parabolic \"" + fixture + "\" --steps 8 --nodes 51 --out run_d.csv") == 0);
  CHECK(slurp("run_c.csv") == slurp("run_d.csv"));
}

TEST_CASE("CLI: estimates runs the monitor stack on a fixture") {
  std::string fixture = data_file("kirchhoff_elliptic_2edge.json");
  CHECK(run_cli("estimates \"" + fixture + "\" --steps 8 --nodes 51") == 0);
  std::string text = slurp("cli_stdout.txt");
  CHECK(text.find("lemma_4_1") != std::string::npos);
  CHECK(text.find("lemma_2_1") != std::string::npos);
  CHECK(text.find("prop_4_4") != std::string::npos);
}

TEST_CASE("elliptic exports carry one k=0 row per node") {
  ProblemSpec p = load_problem(data_file("kirchhoff_elliptic_2edge.json"));
  JunctionGrid grid = build_grid(p.junction, 11);
  EllipticSolution sol = solve_elliptic_junction(p, grid);
  REQUIRE(sol.converged);
  export_solution(sol, "export_ell.csv", ExportFormat::Csv);
  std::istringstream is(slurp("export_ell.csv"));
  std::string line;
  std::getline(is, line);
  CHECK(line == "edge,k,t,x,u,du_dx");
  int rows = 0;
  while (std::getline(is, line))
    if (!line.empty()) {
      ++rows;
      CHECK(line.find(",0,0,") != std::string::npos);  // k = 0, t = 0
    }
  CHECK(rows == 22);
}

TEST_CASE("the quasilinear manufactured run converges at first order in dt") {
  // exact solution u(t,x) = exp(-t) sin(x) via the forcing term
  ProblemSpec p = load_problem(data_file("quasilinear_sin_1edge.json"));
  double errs[2] = {0.0, 0.0};
  int ns[2] = {8, 32};
  for (int run = 0; run < 2; ++run) {
    RotheConfig cfg;
    cfg.steps = ns[run];
    cfg.nodes_per_edge = 101;
    ParabolicSolution sol = solve_parabolic(p, cfg);
    REQUIRE(sol.completed);
    const JunctionGrid& grid = sol.grid();
    for (int k = 0; k <= cfg.steps; ++k) {
      GridFunction u = sol.snapshot(k);
      for (int j = 0; j < 101; ++j)
        errs[run] = std::max(errs[run], std::abs(u.at(0, j) - std::exp(-sol.time(k)) *
                                                                  std::sin(grid.node_x(0, j))));
    }
  }
  CHECK(errs[0] <= 0.05);
  CHECK(errs[0] / errs[1] >= 2.5);  // 4x steps, first order, h^2 floor allowed
}

TEST_CASE("concurrent multi-edge runs are bitwise deterministic") {
  ProblemSpec p = load_problem(data_file("kirchhoff_heat_3edge.json"));
  RotheConfig cfg;
  cfg.steps = 8;
  cfg.nodes_per_edge = 51;
  ParabolicSolution a = solve_parabolic(p, cfg);
  ParabolicSolution b = solve_parabolic(p, cfg);
  REQUIRE(a.completed);
  REQUIRE(b.completed);
  for (int k = 0; k <= 8; ++k) {
    GridFunction ua = a.snapshot(k), ub = b.snapshot(k);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 51; ++j) CHECK(ua.at(i, j) == ub.at(i, j));
  }
}
