import math
import os
from pathlib import Path

import pytest

import starpde


def data_file(name: str) -> str:
    base = os.environ.get("STARPDE_DATA_DIR")
    if base is None:
        base = Path(__file__).resolve().parents[2] / "data" / "problems"
    return str(Path(base) / name)


def test_coefficient_parse_eval_roundtrip():
    c = starpde.Coefficient.parse("(1+abs(p))^2", starpde.CoeffKind.SIGMA)
    assert c(x=0.0, p=1.0) == pytest.approx(4.0)
    assert starpde.Coefficient.parse(c.print(), starpde.CoeffKind.SIGMA).print() == c.print()
    with pytest.raises(ValueError):
        starpde.Coefficient.parse("u + q", starpde.CoeffKind.HAMILTONIAN)


def test_elliptic_solve_matches_closed_form():
    p = starpde.load_problem(data_file("kirchhoff_elliptic_2edge.json"))
    assert p.num_edges == 2
    sol = starpde.solve_elliptic(p, nodes=201)
    assert sol.converged
    assert sol.theta_star == pytest.approx(1.0, abs=1e-5)
    values = sol.values(0)
    coords = sol.coords(0)
    assert values[0] == pytest.approx(sol.theta_star)
    assert max(abs(v - math.cosh(x)) for v, x in zip(values, coords)) < 1e-4


def test_parabolic_solve_and_interpolant():
    p = starpde.load_problem(data_file("heat_neumann_1edge.json"))
    sol = starpde.solve_parabolic(p, steps=16, nodes=101)
    assert sol.completed
    lam = (math.pi / 2.0) ** 2
    exact = math.exp(-lam * 0.25) * math.cos(math.pi * 0.3 / 2.0)
    assert sol(0.25, 0.3, 0) == pytest.approx(exact, abs=0.02)
    report = starpde.time_difference_bound(sol, p)
    assert report.passed


def test_validation_catches_broken_monotonicity():
    broken = starpde.load_problem(data_file("broken_monotonicity.json"))
    assert starpde.validate_assumptions(broken).has_fail()
    sound = starpde.load_problem(data_file("heat_neumann_1edge.json"))
    assert not starpde.validate_assumptions(sound).has_fail()
    assert starpde.compatibility_check(sound).ok


def test_analysis_helpers():
    assert starpde.interpolation_bound(1.0, 1.0, 1.0) == pytest.approx(4.0)
    table = starpde.time_difference_recursion(1.0, 1.0, 10, 1.0)
    assert table[-1] == pytest.approx((10.0 / 9.0) ** 10, abs=1e-10)
    beta, theta, kappa = starpde.barrier_params(1.0, 1.0, 1.0, 1.0)
    assert beta == 2.0
    assert theta == pytest.approx(5.0 * math.exp(4.0))
    assert kappa == pytest.approx((math.exp(4.0) - 1.0) / (5.0 * math.exp(4.0)))
    xs = [i / 1000.0 for i in range(1001)]
    vals = [[math.sqrt(x) for x in xs]]
    assert starpde.holder_seminorm_x([0.0], xs, vals, 0.5) == pytest.approx(1.0, abs=1e-3)


def test_comparison_of_ordered_runs():
    lo = starpde.load_problem(data_file("heat_neumann_1edge.json"))
    hi_text = Path(data_file("heat_neumann_1edge.json")).read_text()
    hi = starpde.load_problem_text(
        hi_text.replace('"cos(1.5707963267948966*x)"', '"1.1*cos(1.5707963267948966*x)"')
    )
    a = starpde.solve_parabolic(lo, steps=8, nodes=51)
    b = starpde.solve_parabolic(hi, steps=8, nodes=51)
    assert starpde.check_comparison(a, b)
