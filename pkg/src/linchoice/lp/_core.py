"""Dense two-phase simplex over explicit tableaus.

Every program in this package is small (at most a few thousand columns after
slack insertion), so a dense tableau with Bland-safeguarded pivoting is both
robust and fast enough; see _kernel_select for the compiled/pure pivot twins.

The module exposes three levels:

- solve(LinearProgram): general programs with {<=, >=, =} rows and per-variable
  bounds; result statuses are verified against the constraints before being
  reported optimal.
- find_feasible: phase-1 style search that maximizes the minimum inequality
  slack, so regions with interior yield interior points.
- StandardFormSolver: a persistent feasible tableau for one fixed region,
  re-optimized for many objectives; the basis is carried between calls, which
  is what makes the distortion module's separation oracles cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import LpFailure
from ._kernel_select import OPTIMAL, PIVOT_LIMIT, UNBOUNDED, pivot_loop

DEFAULT_TOL = 1e-9
FEAS_TOL = 1e-7

LESS = "<="
GREATER = ">="
EQUAL = "="

Constraint = tuple[np.ndarray, str, float]


class InfeasibleProgram(LpFailure):
    """Raised by StandardFormSolver when the region is certifiably empty."""


@dataclass
class LinearProgram:
    """min/max objective @ x subject to rows (coefs, relation, rhs) and bounds.

    Bounds default to [0, +inf) per variable; a -inf lower bound makes the
    variable free.
    """

    objective: np.ndarray
    constraints: list[Constraint] = field(default_factory=list)
    sense: str = "min"
    bounds: list[tuple[float, float]] | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=np.float64).ravel()
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")
        n = self.objective.shape[0]
        checked = []
        for coefs, rel, rhs in self.constraints:
            coefs = np.asarray(coefs, dtype=np.float64).ravel()
            if coefs.shape[0] != n:
                raise ValueError("constraint coefficient length differs from variable count")
            if rel not in (LESS, GREATER, EQUAL):
                raise ValueError(f"unknown relation {rel!r}")
            rhs = float(rhs)
            if not np.isfinite(rhs):
                raise ValueError("right-hand sides must be finite")
            checked.append((coefs, rel, rhs))
        self.constraints = checked
        if self.bounds is not None and len(self.bounds) != n:
            raise ValueError("bounds length differs from variable count")

    @property
    def nvars(self) -> int:
        return self.objective.shape[0]


@dataclass(frozen=True)
class LpSolution:
    status: str  # optimal | infeasible | unbounded | failed
    point: np.ndarray | None = None
    value: float | None = None

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


def _max_pivots(nrows: int, ncols: int) -> int:
    return 200 * (nrows + ncols) + 2000


class _Tableau:
    """A feasible simplex tableau for A x = b, x >= 0 (b >= 0 on input)."""

    def __init__(self, A: np.ndarray, b: np.ndarray, tol: float = DEFAULT_TOL):
        self.tol = tol
        self.A = np.ascontiguousarray(A, dtype=np.float64)
        self.b = np.ascontiguousarray(b, dtype=np.float64)
        if np.any(self.b < 0):
            raise ValueError("standard form requires b >= 0")
        self.nrows, self.ncols = self.A.shape
        self.T: np.ndarray | None = None
        self.basis: np.ndarray | None = None
        self.feasible = False
        self._pivots_since_refactor = 0

    # -- phase 1 ------------------------------------------------------------

    def run_phase1(self) -> bool:
        """Find a basic feasible solution; returns False if infeasible."""
        m, n = self.nrows, self.ncols
        art = np.arange(n, n + m)
        T = np.zeros((m + 1, n + m + 1))
        T[:m, :n] = self.A
        T[:m, n:n + m] = np.eye(m)
        T[:m, -1] = self.b
        # phase-1 reduced costs: sum of artificial rows, negated
        T[m, :] = -T[:m, :].sum(axis=0)
        T[m, n:n + m] = 0.0
        basis = art.copy()
        status, piv = pivot_loop(T, basis, m, n, self.tol, _max_pivots(m, n + m))
        if status == PIVOT_LIMIT:
            raise LpFailure("phase 1 exceeded the pivot limit")
        scale = 1.0 + float(np.abs(self.b).max(initial=0.0))
        if -T[m, -1] > FEAS_TOL * scale:
            return False
        self._drive_out_artificials(T, basis, n)
        self._pivots_since_refactor = piv
        self.feasible = True
        return True

    def _drive_out_artificials(self, T: np.ndarray, basis: np.ndarray, n: int) -> None:
        keep = []
        for i in range(self.nrows):
            if basis[i] < n:
                keep.append(i)
                continue
            row = T[i, :n]
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) > self.tol:
                _apply_pivot(T, basis, i, j)
                keep.append(i)
            # else: redundant row (zero over real columns), drop it
        body = T[keep, :]
        self.T = np.ascontiguousarray(np.hstack([body[:, :n], body[:, -1:]]))
        self.basis = basis[keep].copy()
        self.A = self.A[keep] if len(keep) < self.nrows else self.A
        self.b = self.b[keep] if len(keep) < self.nrows else self.b
        self.nrows = len(keep)

    # -- warm phase 2 ---------------------------------------------------------

    def refactor(self) -> None:
        """Rebuild the tableau from the original data and the current basis."""
        B = self.A[:, self.basis]
        try:
            binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:
            raise LpFailure("basis matrix became singular") from exc
        body = binv @ np.hstack([self.A, self.b[:, None]])
        self.T = np.ascontiguousarray(body)
        self._pivots_since_refactor = 0
        if self.T[:, -1].min(initial=0.0) < -FEAS_TOL:
            # drifted basis is no longer primal feasible; restart from scratch
            if not self.run_phase1():
                raise LpFailure("region lost feasibility after refactorization")

    def minimize(self, cost: np.ndarray) -> tuple[float, np.ndarray]:
        """Optimize a fresh objective from the current feasible basis."""
        if not self.feasible:
            raise LpFailure("tableau has no feasible basis")
        if self._pivots_since_refactor > 2000:
            self.refactor()
        m, n = self.nrows, self.ncols
        work = np.empty((m + 1, n + 1))
        work[:m] = self.T
        work[m, :] = np.concatenate([cost, [0.0]])
        cb = cost[self.basis]
        if np.any(cb):
            work[m, :] -= cb @ work[:m, :]
        basis = self.basis
        status, piv = pivot_loop(work, basis, m, n, self.tol, _max_pivots(m, n))
        self._pivots_since_refactor += piv
        if status == UNBOUNDED:
            self.T = np.ascontiguousarray(work[:m])
            raise _Unbounded()
        if status == PIVOT_LIMIT:
            raise LpFailure("phase 2 exceeded the pivot limit")
        self.T = np.ascontiguousarray(work[:m])
        x = np.zeros(n)
        x[basis] = work[:m, -1]
        return float(cost @ x), x


class _Unbounded(Exception):
    pass


def _apply_pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])
    T[:, col] = 0.0
    T[row, col] = 1.0
    basis[row] = col


# ---------------------------------------------------------------------------
# General LinearProgram front end
# ---------------------------------------------------------------------------


class _StandardizedProgram:
    """Rewrites a LinearProgram as min c y, A y = b, y >= 0 plus a back-map."""

    def __init__(self, lp: LinearProgram):
        n = lp.nvars
        bounds = lp.bounds if lp.bounds is not None else [(0.0, np.inf)] * n
        self.shift = np.zeros(n)
        self.pos_col = np.full(n, -1, dtype=int)
        self.neg_col = np.full(n, -1, dtype=int)
        extra_rows: list[Constraint] = []
        col = 0
        for i, (lo, hi) in enumerate(bounds):
            if np.isneginf(lo):
                self.pos_col[i], self.neg_col[i] = col, col + 1
                col += 2
            else:
                self.shift[i] = lo
                self.pos_col[i] = col
                col += 1
            if np.isfinite(hi):
                e = np.zeros(n)
                e[i] = 1.0
                extra_rows.append((e, LESS, float(hi)))
        self.n_struct = col
        self.nvars = n

        rows = list(lp.constraints) + extra_rows
        n_slack = sum(1 for _, rel, _ in rows if rel != EQUAL)
        ncols = self.n_struct + n_slack
        A = np.zeros((len(rows), ncols))
        b = np.zeros(len(rows))
        slack = self.n_struct
        for r, (coefs, rel, rhs) in enumerate(rows):
            rhs = rhs - float(coefs @ self.shift)
            for i in range(n):
                if coefs[i] == 0.0:
                    continue
                A[r, self.pos_col[i]] += coefs[i]
                if self.neg_col[i] >= 0:
                    A[r, self.neg_col[i]] -= coefs[i]
            if rel == LESS:
                A[r, slack] = 1.0
                slack += 1
            elif rel == GREATER:
                A[r, slack] = -1.0
                slack += 1
            b[r] = rhs
            if b[r] < 0:
                A[r] *= -1.0
                b[r] *= -1.0
        self.A, self.b = A, b

        c = lp.objective if lp.sense == "min" else -lp.objective
        self.cost = np.zeros(ncols)
        for i in range(n):
            self.cost[self.pos_col[i]] += c[i]
            if self.neg_col[i] >= 0:
                self.cost[self.neg_col[i]] -= c[i]
        self.offset = float(c @ self.shift)

    def recover(self, y: np.ndarray) -> np.ndarray:
        x = self.shift + y[self.pos_col]
        mask = self.neg_col >= 0
        if mask.any():
            x[mask] -= y[self.neg_col[mask]]
        return x


def _verify(lp: LinearProgram, x: np.ndarray, value: float) -> bool:
    for coefs, rel, rhs in lp.constraints:
        lhs = float(coefs @ x)
        atol = FEAS_TOL * (1.0 + abs(rhs))
        if rel == LESS and lhs > rhs + atol:
            return False
        if rel == GREATER and lhs < rhs - atol:
            return False
        if rel == EQUAL and abs(lhs - rhs) > atol:
            return False
    bounds = lp.bounds if lp.bounds is not None else [(0.0, np.inf)] * lp.nvars
    for i, (lo, hi) in enumerate(bounds):
        if x[i] < lo - FEAS_TOL or x[i] > hi + FEAS_TOL:
            return False
    direct = float(lp.objective @ x)
    return abs(direct - value) <= FEAS_TOL * (1.0 + abs(value))


def solve(lp: LinearProgram, tol: float = DEFAULT_TOL) -> LpSolution:
    """Classify and solve a general program.

    Numerical breakdown is reported as status "failed", never as a wrong
    optimal answer: optimal solutions are re-verified against the original
    constraints before being returned.
    """
    std = _StandardizedProgram(lp)
    tab = _Tableau(std.A, std.b, tol=tol)
    try:
        if not tab.run_phase1():
            return LpSolution("infeasible")
        value, y = tab.minimize(std.cost)
    except _Unbounded:
        return LpSolution("unbounded")
    except LpFailure:
        return LpSolution("failed")
    # re-extract the basic solution from the original data: the optimal basis
    # is exact even when the pivoted tableau carries drift
    try:
        y_clean = np.zeros(tab.ncols)
        y_clean[tab.basis] = np.linalg.solve(tab.A[:, tab.basis], tab.b)
        if y_clean.min(initial=0.0) >= -FEAS_TOL:
            y = np.clip(y_clean, 0.0, None)
            value = float(std.cost @ y)
    except np.linalg.LinAlgError:
        pass
    x = std.recover(y)
    obj = value + std.offset
    if lp.sense == "max":
        obj = -obj
    if not _verify(lp, x, obj):
        return LpSolution("failed")
    return LpSolution("optimal", point=x, value=obj)


def find_feasible(
    constraints: list[Constraint],
    nvars: int,
    bounds: list[tuple[float, float]] | None = None,
    tol: float = DEFAULT_TOL,
) -> LpSolution:
    """Search for a feasible point, preferring interior ones.

    Maximizes the minimum slack t across all inequality rows (capped at 1 so
    the program stays bounded); equalities are enforced as given. The value
    of the returned solution is the achieved slack, so t >= 1e-9 certifies a
    strictly feasible point.
    """
    aug_rows: list[Constraint] = []
    for coefs, rel, rhs in constraints:
        coefs = np.asarray(coefs, dtype=np.float64).ravel()
        a = np.concatenate([coefs, [1.0 if rel == LESS else -1.0 if rel == GREATER else 0.0]])
        aug_rows.append((a, rel, float(rhs)))
    objective = np.zeros(nvars + 1)
    objective[-1] = 1.0
    var_bounds = list(bounds) if bounds is not None else [(0.0, np.inf)] * nvars
    var_bounds.append((-np.inf, 1.0))
    aug = LinearProgram(objective, aug_rows, sense="max", bounds=var_bounds)
    sol = solve(aug, tol=tol)
    if sol.status != "optimal":
        return LpSolution(sol.status)
    slack = float(sol.value)
    if slack < -tol:
        return LpSolution("infeasible")
    return LpSolution("optimal", point=sol.point[:nvars], value=slack)


def in_convex_hull(point: np.ndarray, vectors: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """LP membership test: is ``point`` a convex combination of the rows?"""
    point = np.asarray(point, dtype=np.float64).ravel()
    vectors = np.asarray(vectors, dtype=np.float64)
    m, d = vectors.shape
    if point.shape[0] != d:
        raise ValueError("dimension mismatch")
    rows: list[Constraint] = [(vectors[:, j], EQUAL, float(point[j])) for j in range(d)]
    rows.append((np.ones(m), EQUAL, 1.0))
    sol = solve(LinearProgram(np.zeros(m), rows), tol=tol)
    return sol.status == "optimal"


class StandardFormSolver:
    """A reusable minimizer over one fixed region {x >= 0 : rows hold}.

    Builds the region once (phase 1 included) and answers many minimize()
    calls, each warm-started from the previous optimal basis. Raises
    InfeasibleProgram at construction when the region is empty.
    """

    def __init__(self, constraints: list[Constraint], nvars: int, tol: float = DEFAULT_TOL):
        self.nvars = nvars
        n_slack = sum(1 for _, rel, _ in constraints if rel != EQUAL)
        A = np.zeros((len(constraints), nvars + n_slack))
        b = np.zeros(len(constraints))
        slack = nvars
        for r, (coefs, rel, rhs) in enumerate(constraints):
            A[r, :nvars] = coefs
            if rel == LESS:
                A[r, slack] = 1.0
                slack += 1
            elif rel == GREATER:
                A[r, slack] = -1.0
                slack += 1
            b[r] = float(rhs)
            if b[r] < 0:
                A[r] *= -1.0
                b[r] *= -1.0
        self._tab = _Tableau(A, b, tol=tol)
        if not self._tab.run_phase1():
            raise InfeasibleProgram("constraint system is infeasible")
        self._cost = np.zeros(A.shape[1])

    def minimize(self, objective: np.ndarray) -> tuple[float, np.ndarray]:
        """Returns (optimal value, optimal x over the structural variables)."""
        self._cost[: self.nvars] = objective
        try:
            value, y = self._tab.minimize(self._cost)
        except _Unbounded as exc:
            raise LpFailure("objective is unbounded over the region") from exc
        return value, y[: self.nvars]
