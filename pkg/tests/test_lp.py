import numpy as np
import pytest
from scipy.optimize import linprog

from hrdea.errors import LpInfeasible, LpUnbounded
from hrdea.lp import LpProblem, lp_solve


def test_single_upper_bound():
    sol = lp_solve(LpProblem(c=[1.0], a_ub=[[1.0]], b_ub=[5.0]))
    assert sol.objective == pytest.approx(5.0, abs=1e-9)
    assert sol.x[0] == pytest.approx(5.0, abs=1e-9)


def test_binding_minimum_of_two_bounds():
    sol = lp_solve(LpProblem(c=[1.0], a_ub=[[1.0], [1.0]], b_ub=[5.0, 3.0]))
    assert sol.objective == pytest.approx(3.0, abs=1e-9)


def test_unbounded_detected():
    with pytest.raises(LpUnbounded):
        lp_solve(LpProblem(c=[1.0], a_ub=[[-1.0]], b_ub=[0.0]))


def test_infeasible_detected():
    # x >= 0 and x <= -1 cannot hold together.
    with pytest.raises(LpInfeasible):
        lp_solve(LpProblem(c=[1.0], a_ub=[[1.0]], b_ub=[-1.0]))


def test_equalities_and_inequalities_together():
    # max x + y  s.t.  x + y = 1, x <= 0.25
    sol = lp_solve(
        LpProblem(c=[2.0, 1.0], a_eq=[[1.0, 1.0]], b_eq=[1.0], a_ub=[[1.0, 0.0]], b_ub=[0.25])
    )
    assert sol.objective == pytest.approx(2 * 0.25 + 0.75, abs=1e-9)


def test_degenerate_rhs():
    # Degenerate vertex: several constraints active at the optimum.
    sol = lp_solve(
        LpProblem(
            c=[1.0, 1.0],
            a_ub=[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
            b_ub=[1.0, 1.0, 2.0],
        )
    )
    assert sol.objective == pytest.approx(2.0, abs=1e-9)


def test_random_instances_match_scipy():
    rng = np.random.default_rng(20240811)
    for trial in range(200):
        nvar = int(rng.integers(2, 7))
        nub = int(rng.integers(1, 5))
        c = rng.normal(size=nvar)
        a_ub = rng.normal(size=(nub, nvar))
        b_ub = rng.uniform(0.5, 3.0, size=nub)
        # Box rows keep every instance bounded.
        a_box = np.eye(nvar)
        b_box = rng.uniform(1.0, 5.0, size=nvar)
        A = np.vstack([a_ub, a_box])
        b = np.concatenate([b_ub, b_box])
        ref = linprog(-c, A_ub=A, b_ub=b, bounds=(0, None), method="highs")
        assert ref.status == 0
        sol = lp_solve(LpProblem(c=c, a_ub=A, b_ub=b))
        assert sol.objective == pytest.approx(-ref.fun, abs=1e-7), f"trial {trial}"


def test_random_equality_instances_match_scipy():
    rng = np.random.default_rng(7)
    checked = 0
    for trial in range(200):
        nvar = int(rng.integers(3, 8))
        neq = int(rng.integers(1, 3))
        c = rng.normal(size=nvar)
        a_eq = rng.normal(size=(neq, nvar))
        x0 = rng.uniform(0.1, 2.0, size=nvar)  # a feasible interior point
        b_eq = a_eq @ x0
        a_box = np.eye(nvar)
        b_box = np.full(nvar, 6.0)
        ref = linprog(-c, A_eq=a_eq, b_eq=b_eq, A_ub=a_box, b_ub=b_box,
                      bounds=(0, None), method="highs")
        if ref.status != 0:
            continue
        sol = lp_solve(LpProblem(c=c, a_eq=a_eq, b_eq=b_eq, a_ub=a_box, b_ub=b_box))
        assert sol.objective == pytest.approx(-ref.fun, abs=1e-7), f"trial {trial}"
        checked += 1
    assert checked > 150


def test_two_phase_solution_is_feasible():
    rng = np.random.default_rng(99)
    for _ in range(50):
        nvar = int(rng.integers(3, 6))
        A = rng.normal(size=(2, nvar))
        x0 = rng.uniform(0.1, 1.0, size=nvar)
        b = A @ x0
        c = rng.normal(size=nvar)
        prob = LpProblem(c=c, a_eq=A, b_eq=b, a_ub=np.eye(nvar), b_ub=np.full(nvar, 5.0))
        sol = lp_solve(prob)
        assert np.all(sol.x >= -1e-9)
        np.testing.assert_allclose(A @ sol.x, b, atol=1e-7)
