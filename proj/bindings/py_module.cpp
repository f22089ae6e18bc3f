#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "starpde/analysis.hpp"
#include "starpde/problem_io.hpp"

namespace py = pybind11;
using namespace starpde;

namespace {

SpaceTimeSamples make_samples(std::vector<double> times, std::vector<double> coords,
                              std::vector<std::vector<double>> values) {
  SpaceTimeSamples s;
  s.times = std::move(times);
  s.coords = std::move(coords);
  s.values = std::move(values);
  return s;
}

std::vector<double> edge_values(const GridFunction& u, int edge) { return u.edge_nodes(edge); }

std::vector<double> edge_coords(const JunctionGrid& g, int edge) {
  std::vector<double> xs(g.nodes_per_edge[edge]);
  for (int j = 0; j < g.nodes_per_edge[edge]; ++j) xs[j] = g.node_x(edge, j);
  return xs;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "quasilinear parabolic solver on star junctions with a nonlinear vertex condition";

  py::register_exception<ParseError>(m, "ExpressionParseError", PyExc_ValueError);
  py::register_exception<SchemaError>(m, "SchemaValidationError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigurationError", PyExc_ValueError);
  py::register_exception<EvalError>(m, "EvaluationError", PyExc_ValueError);
  py::register_exception<SolveError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<BracketError>(m, "BracketSignError", PyExc_RuntimeError);

  py::enum_<CoeffKind>(m, "CoeffKind")
      .value("SIGMA", CoeffKind::Sigma)
      .value("HAMILTONIAN", CoeffKind::Hamiltonian)
      .value("VERTEX_CONDITION", CoeffKind::VertexCondition)
      .value("INITIAL", CoeffKind::Initial)
      .value("OUTER_BOUNDARY", CoeffKind::OuterBoundary)
      .value("FORCING", CoeffKind::Forcing)
      .value("REFERENCE", CoeffKind::Reference);

  py::class_<Coefficient>(m, "Coefficient")
      .def_static("parse", &Coefficient::parse, py::arg("text"), py::arg("kind"),
                  py::arg("num_edges") = 1)
      .def("print", &Coefficient::print)
      .def(
          "__call__",
          [](const Coefficient& c, double x, double t, double u, double p,
             std::vector<double> p_vec) {
            EvalPoint pt;
            pt.x = x;
            pt.t = t;
            pt.u = u;
            pt.p = p;
            pt.p_vec = p_vec;
            return c.eval(pt);
          },
          py::arg("x") = 0.0, py::arg("t") = 0.0, py::arg("u") = 0.0, py::arg("p") = 0.0,
          py::arg("p_vec") = std::vector<double>{})
      .def("__repr__", [](const Coefficient& c) { return "Coefficient('" + c.print() + "')"; });

  py::class_<ProblemSpec>(m, "ProblemSpec")
      .def_property_readonly("num_edges", &ProblemSpec::num_edges)
      .def_property_readonly("horizon", [](const ProblemSpec& p) { return p.horizon; })
      .def_property_readonly("lengths",
                             [](const ProblemSpec& p) { return p.junction.lengths; });

  m.def("load_problem", &load_problem, py::arg("path"));
  m.def("load_problem_text", &load_problem_text, py::arg("json_text"));

  py::class_<CompatibilityReport>(m, "CompatibilityReport")
      .def_readonly("ok", &CompatibilityReport::ok)
      .def_readonly("f_residual", &CompatibilityReport::f_residual)
      .def_readonly("outer_residuals", &CompatibilityReport::outer_residuals)
      .def("to_text", &CompatibilityReport::to_text);
  m.def("compatibility_check", &compatibility_check, py::arg("problem"), py::arg("tol") = 1e-6);

  py::class_<ValidationReport>(m, "ValidationReport")
      .def("has_fail", &ValidationReport::has_fail)
      .def("to_text", &ValidationReport::to_text);
  m.def(
      "validate_assumptions",
      [](const ProblemSpec& p, std::uint64_t seed) {
        SamplingPlan plan;
        plan.seed = seed;
        return validate_assumptions(p, plan);
      },
      py::arg("problem"), py::arg("seed") = SamplingPlan{}.seed);

  py::class_<EllipticSolution>(m, "EllipticSolution")
      .def_readonly("theta_star", &EllipticSolution::theta_star)
      .def_readonly("vertex_flux", &EllipticSolution::vertex_flux)
      .def_readonly("f_residual", &EllipticSolution::f_residual)
      .def_readonly("f_tol_effective", &EllipticSolution::f_tol_effective)
      .def_readonly("bisection_iterations", &EllipticSolution::bisection_iterations)
      .def_readonly("converged", &EllipticSolution::converged)
      .def("values", [](const EllipticSolution& s, int edge) { return edge_values(s.solution, edge); },
           py::arg("edge"))
      .def("coords",
           [](const EllipticSolution& s, int edge) { return edge_coords(s.solution.grid(), edge); },
           py::arg("edge"));

  m.def(
      "solve_elliptic",
      [](const ProblemSpec& p, int nodes, double theta_tol, double f_tol) {
        JunctionGrid grid = build_grid(p.junction, nodes);
        EllipticOptions opts;
        opts.theta_tol = theta_tol;
        opts.f_tol = f_tol;
        return solve_elliptic_junction(p, grid, opts);
      },
      py::arg("problem"), py::arg("nodes") = 201, py::arg("theta_tol") = 1e-12,
      py::arg("f_tol") = 1e-9);

  py::class_<StepDiagnostics>(m, "StepDiagnostics")
      .def_readonly("theta_star", &StepDiagnostics::theta_star)
      .def_readonly("f_residual", &StepDiagnostics::f_residual)
      .def_readonly("f_tol_effective", &StepDiagnostics::f_tol_effective)
      .def_readonly("bisection_iterations", &StepDiagnostics::bisection_iterations);

  py::class_<ParabolicSolution>(m, "ParabolicSolution")
      .def_readonly("steps", &ParabolicSolution::steps)
      .def_readonly("horizon", &ParabolicSolution::horizon)
      .def_readonly("completed", &ParabolicSolution::completed)
      .def_readonly("failed_step", &ParabolicSolution::failed_step)
      .def_readonly("diagnostics", &ParabolicSolution::diagnostics)
      .def_property_readonly("dt", &ParabolicSolution::dt)
      .def("time", &ParabolicSolution::time, py::arg("k"))
      .def("values",
           [](const ParabolicSolution& s, int k, int edge) {
             return edge_values(s.snapshot(k), edge);
           },
           py::arg("k"), py::arg("edge"))
      .def("coords",
           [](const ParabolicSolution& s, int edge) { return edge_coords(s.grid(), edge); },
           py::arg("edge"))
      .def("__call__", &interpolant_eval, py::arg("t"), py::arg("x"), py::arg("edge") = 0);

  m.def(
      "solve_parabolic",
      [](const ProblemSpec& p, int steps, int nodes, double compat_tol) {
        RotheConfig cfg;
        cfg.steps = steps;
        cfg.nodes_per_edge = nodes;
        cfg.compat_tol = compat_tol;
        return solve_parabolic(p, cfg);
      },
      py::arg("problem"), py::arg("steps") = 32, py::arg("nodes") = 101,
      py::arg("compat_tol") = 1e-6);

  // analysis toolkit
  m.def("interpolation_bound", &interpolation_bound, py::arg("nu1"), py::arg("nu2"),
        py::arg("gamma"));
  m.def(
      "holder_seminorm_x",
      [](std::vector<double> times, std::vector<double> coords,
         std::vector<std::vector<double>> values, double alpha) {
        return holder_seminorm_x(make_samples(std::move(times), std::move(coords), std::move(values)),
                                 alpha);
      },
      py::arg("times"), py::arg("coords"), py::arg("values"), py::arg("alpha"));
  m.def(
      "holder_seminorm_t",
      [](std::vector<double> times, std::vector<double> coords,
         std::vector<std::vector<double>> values, double alpha) {
        return holder_seminorm_t(make_samples(std::move(times), std::move(coords), std::move(values)),
                                 alpha);
      },
      py::arg("times"), py::arg("coords"), py::arg("values"), py::arg("alpha"));
  m.def("time_difference_recursion", &time_difference_recursion, py::arg("c_h"), py::arg("horizon"),
        py::arg("steps"), py::arg("m0"));

  py::class_<TimeDifferenceReport>(m, "TimeDifferenceReport")
      .def_readonly("m0", &TimeDifferenceReport::m0)
      .def_readonly("measured", &TimeDifferenceReport::measured)
      .def_readonly("bound", &TimeDifferenceReport::bound)
      .def_readonly("passed", &TimeDifferenceReport::pass);
  m.def("time_difference_bound", &time_difference_bound, py::arg("solution"), py::arg("problem"),
        py::arg("margin") = 0.2);

  m.def(
      "barrier_params",
      [](double m_bound, double mu_at_2m, double nu_lower, double min_length) {
        BarrierParams b = barrier_params(m_bound, mu_at_2m, nu_lower, min_length);
        return py::make_tuple(b.beta, b.theta, b.kappa);
      },
      py::arg("m_bound"), py::arg("mu_at_2m"), py::arg("nu_lower"), py::arg("min_length"));

  m.def(
      "check_comparison",
      [](const ParabolicSolution& sub, const ParabolicSolution& super, double tol) {
        return check_comparison(sub, super, tol).ordered;
      },
      py::arg("sub"), py::arg("super"), py::arg("tol") = 1e-8);

  m.attr("__version__") = "0.1.0";
}
