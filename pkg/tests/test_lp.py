"""LP kernel: status classification, duality, determinism, anti-cycling."""

import numpy as np
import pytest

from linchoice import lp
from linchoice.lp import LinearProgram, StandardFormSolver, find_feasible, in_convex_hull, solve
from linchoice.lp._kernel_select import get_kernels


def test_maximize_single_variable():
    sol = solve(LinearProgram([1.0], [([1.0], "<=", 3.0)], sense="max"))
    assert sol.ok and sol.value == pytest.approx(3.0) and sol.point[0] == pytest.approx(3.0)


def test_infeasible_interval():
    sol = solve(LinearProgram([1.0], [([1.0], ">=", 1.0), ([1.0], "<=", 0.0)]))
    assert sol.status == "infeasible"


def test_degenerate_optimum_face():
    sol = solve(LinearProgram([1.0, 1.0], [([1.0, 1.0], "<=", 1.0)], sense="max"))
    assert sol.ok and sol.value == pytest.approx(1.0)


def test_unbounded():
    sol = solve(LinearProgram([1.0], [], sense="max"))
    assert sol.status == "unbounded"


def test_equality_and_negative_lower_bound():
    # min x + y s.t. x + y = -1, x free, y >= 0  ->  x = -1, y = 0
    sol = solve(
        LinearProgram(
            [1.0, 1.0],
            [([1.0, 1.0], "=", -1.0)],
            bounds=[(-np.inf, np.inf), (0.0, np.inf)],
        )
    )
    assert sol.ok and sol.value == pytest.approx(-1.0)


def test_finite_upper_bounds():
    sol = solve(LinearProgram([1.0, 2.0], [], sense="max", bounds=[(0, 2), (1, 3)]))
    assert sol.ok and sol.value == pytest.approx(8.0)
    np.testing.assert_allclose(sol.point, [2.0, 3.0])


def test_beale_cycling_example_terminates():
    # classic cycling instance; value -0.05 at x = (0.04, 0, 1, 0)
    prog = LinearProgram(
        [-0.75, 150.0, -0.02, 6.0],
        [
            ([0.25, -60.0, -0.04, 9.0], "<=", 0.0),
            ([0.5, -90.0, -0.02, 3.0], "<=", 0.0),
            ([0.0, 0.0, 1.0, 0.0], "<=", 1.0),
        ],
    )
    sol = solve(prog)
    assert sol.ok and sol.value == pytest.approx(-0.05)


def _random_primal(rng, nvars, nrows):
    # min c x, A x >= b, x >= 0 with positive A and c: feasible and bounded
    A = rng.random((nrows, nvars)) + 0.1
    b = rng.random(nrows)
    c = rng.random(nvars) + 0.1
    return A, b, c


def test_duality_gap_on_random_programs():
    rng = np.random.default_rng(2024)
    for _ in range(30):
        nvars = int(rng.integers(2, 21))
        nrows = int(rng.integers(1, 16))
        A, b, c = _random_primal(rng, nvars, nrows)
        primal = LinearProgram(c, [(A[i], ">=", b[i]) for i in range(nrows)])
        dual = LinearProgram(b, [(A[:, j], "<=", c[j]) for j in range(nvars)], sense="max")
        ps, ds = solve(primal), solve(dual)
        assert ps.ok and ds.ok
        assert ps.value == pytest.approx(ds.value, abs=1e-6)


def test_constraint_permutation_invariance():
    rng = np.random.default_rng(11)
    A, b, c = _random_primal(rng, 8, 10)
    rows = [(A[i], ">=", b[i]) for i in range(10)]
    base = solve(LinearProgram(c, rows)).value
    for seed in range(5):
        perm = np.random.default_rng(seed).permutation(10)
        shuffled = solve(LinearProgram(c, [rows[i] for i in perm])).value
        assert shuffled == pytest.approx(base, abs=1e-9)


def test_optimal_solutions_verify_constraints():
    rng = np.random.default_rng(5)
    for _ in range(20):
        A, b, c = _random_primal(rng, 6, 6)
        sol = solve(LinearProgram(c, [(A[i], ">=", b[i]) for i in range(6)]))
        assert sol.ok
        assert np.all(A @ sol.point >= b - 1e-7)
        assert abs(c @ sol.point - sol.value) <= 1e-7 * (1 + abs(sol.value))


def test_find_feasible_simplex():
    sol = find_feasible([(np.ones(3), "=", 1.0)], 3)
    assert sol.ok
    assert sol.point.sum() == pytest.approx(1.0) and np.all(sol.point >= 0)


def test_find_feasible_infeasible():
    sol = find_feasible([(np.array([1.0]), ">=", 1.0), (np.array([1.0]), "<=", 0.0)], 1)
    assert sol.status == "infeasible"


def test_find_feasible_ranking_region_strict_slack():
    rows = [(np.ones(2), "=", 1.0), (np.array([1.0, -1.0]), ">=", 0.0)]
    sol = find_feasible(rows, 2)
    assert sol.ok
    v = sol.point
    assert v.sum() == pytest.approx(1.0)
    assert v[0] - v[1] >= 1e-9  # strictly feasible w.r.t. the inequality
    assert sol.value >= 1e-9


def test_in_convex_hull():
    square = np.array([[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]])
    assert in_convex_hull([0.5, 0.5], square)
    assert in_convex_hull([0.75, 0.25], square)
    assert not in_convex_hull([0.9, 0.2], square)


def test_standard_form_solver_warm_reuse():
    rows = [(np.ones(3), "=", 1.0), (np.array([1.0, -1.0, 0.0]), ">=", 0.0)]
    solver = StandardFormSolver(rows, 3)
    val, x = solver.minimize(np.array([1.0, 0.0, 0.0]))
    assert val == pytest.approx(0.0)  # put everything on v2
    val, x = solver.minimize(np.array([0.0, 0.0, 1.0]))
    assert val == pytest.approx(0.0)
    val, x = solver.minimize(np.array([-1.0, -1.0, -1.0]))
    assert val == pytest.approx(-1.0)
    # many re-solves with rotating objectives stay consistent
    rng = np.random.default_rng(0)
    for _ in range(200):
        c = rng.normal(size=3)
        val, x = solver.minimize(c)
        assert x.sum() == pytest.approx(1.0, abs=1e-7)
        assert x[0] >= x[1] - 1e-7
        assert val == pytest.approx(c @ x, abs=1e-7)


def test_standard_form_solver_infeasible_raises():
    rows = [(np.array([1.0]), ">=", 2.0), (np.array([1.0]), "<=", 1.0)]
    with pytest.raises(lp.InfeasibleProgram):
        StandardFormSolver(rows, 1)


def test_kernels_agree():
    """The compiled and pure pivot loops must walk identical paths."""
    kernels = get_kernels()
    if len(kernels) < 2:
        pytest.skip("compiled kernel not built")
    rng = np.random.default_rng(77)
    for _ in range(25):
        nrows, ncols = int(rng.integers(2, 10)), int(rng.integers(4, 16))
        A = rng.random((nrows, ncols))
        b = rng.random(nrows) + 0.5
        c = rng.normal(size=ncols)
        A_std = np.hstack([A, np.eye(nrows)])
        results = {}
        for name, loop in kernels.items():
            T = np.zeros((nrows + 1, ncols + nrows + 1))
            T[:nrows, : ncols + nrows] = A_std
            T[:nrows, -1] = b
            T[nrows, : ncols + nrows] = np.concatenate([c, np.zeros(nrows)])
            basis = np.arange(ncols, ncols + nrows, dtype=np.int64)
            status, piv = loop(T, basis, nrows, ncols + nrows, 1e-9, 10000)
            results[name] = (status, piv, basis.copy(), T[nrows, -1])
        s1, s2 = results["python"], results["compiled"]
        assert s1[0] == s2[0]
        assert s1[1] == s2[1]
        assert np.array_equal(s1[2], s2[2])
        assert s1[3] == pytest.approx(s2[3], abs=1e-12)
