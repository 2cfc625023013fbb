"""Pure-NumPy simplex pivot loop; semantics identical to the compiled twin.

The tableau T has the constraint rows first, then one or two objective rows
(reduced-cost rows); the last column is the right-hand side. Every row,
objective rows included, is updated on each pivot, so a caller can carry the
phase-2 cost row through phase 1.

Entering column: Dantzig (most negative reduced cost), switching to Bland's
least-index rule after a streak of degenerate pivots; ratio-test ties always
go to the row with the smallest basic index. Bland's rule guarantees the
loop cannot cycle.
"""

import numpy as np

NAME = "python"

OPTIMAL = 0
UNBOUNDED = 1
PIVOT_LIMIT = 2

_DEGENERATE_STREAK = 32


def pivot_loop(T, basis, obj_row, ncols_eligible, tol, max_pivots):
    """Pivot until row ``obj_row`` has no reduced cost below -tol.

    Returns (status, pivot_count). T and basis are updated in place.
    """
    nrows = basis.shape[0]
    rhs = T.shape[1] - 1
    bland = False
    streak = 0
    pivots = 0
    obj = T[obj_row]
    while pivots < max_pivots:
        if bland:
            entering = -1
            for j in range(ncols_eligible):
                if obj[j] < -tol:
                    entering = j
                    break
        else:
            entering = int(np.argmin(obj[:ncols_eligible]))
            if obj[entering] >= -tol:
                entering = -1
        if entering < 0:
            return OPTIMAL, pivots

        col = T[:nrows, entering]
        pos = col > tol
        if not pos.any():
            return UNBOUNDED, pivots
        ratios = np.full(nrows, np.inf)
        ratios[pos] = T[:nrows, rhs][pos] / col[pos]
        best = ratios.min()
        # near-exact tie band: a loose one lets the wrong row leave and
        # drives the true minimum's RHS negative
        ties = np.flatnonzero(ratios <= best + 1e-12 * (1.0 + abs(best)))
        leave = int(ties[np.argmin(basis[ties])])

        if best <= tol:
            streak += 1
            if streak >= _DEGENERATE_STREAK:
                bland = True
        else:
            streak = 0
            bland = False

        pivot = T[leave, entering]
        T[leave] /= pivot
        factors = T[:, entering].copy()
        factors[leave] = 0.0
        T -= np.outer(factors, T[leave])
        T[:, entering] = 0.0
        T[leave, entering] = 1.0
        rhs_col = T[:nrows, rhs]
        rhs_col[(rhs_col < 0.0) & (rhs_col > -1e-10)] = 0.0
        basis[leave] = entering
        pivots += 1
    return PIVOT_LIMIT, pivots
