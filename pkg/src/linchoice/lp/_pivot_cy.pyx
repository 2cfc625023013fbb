# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simplex pivot loop; semantics identical to the pure twin.

See _pivot_py for the contract. This version exists because the distortion
solvers run hundreds of thousands of small LPs, where per-pivot array
overhead dominates in pure Python.
"""

NAME = "compiled"

OPTIMAL = 0
UNBOUNDED = 1
PIVOT_LIMIT = 2

cdef int _DEGENERATE_STREAK = 32
cdef double _INF = float("inf")


def pivot_loop(double[:, ::1] T, long long[::1] basis, Py_ssize_t obj_row,
               Py_ssize_t ncols_eligible, double tol, long long max_pivots):
    """Pivot until row ``obj_row`` has no reduced cost below -tol.

    Returns (status, pivot_count). T and basis are updated in place.
    """
    cdef Py_ssize_t nrows = basis.shape[0]
    cdef Py_ssize_t nrows_total = T.shape[0]
    cdef Py_ssize_t ncols = T.shape[1]
    cdef Py_ssize_t rhs = ncols - 1
    cdef bint bland = False
    cdef int streak = 0
    cdef long long pivots = 0
    cdef Py_ssize_t entering, leave, i, j
    cdef double best_rc, rc, ratio, best_ratio, tie_cut, pivot, factor

    while pivots < max_pivots:
        entering = -1
        if bland:
            for j in range(ncols_eligible):
                if T[obj_row, j] < -tol:
                    entering = j
                    break
        else:
            best_rc = -tol
            for j in range(ncols_eligible):
                rc = T[obj_row, j]
                if rc < best_rc:
                    best_rc = rc
                    entering = j
        if entering < 0:
            return OPTIMAL, pivots

        best_ratio = _INF
        for i in range(nrows):
            if T[i, entering] > tol:
                ratio = T[i, rhs] / T[i, entering]
                if ratio < best_ratio:
                    best_ratio = ratio
        if best_ratio == _INF:
            return UNBOUNDED, pivots
        leave = -1
        # near-exact tie band: a loose one lets the wrong row leave and
        # drives the true minimum's RHS negative
        tie_cut = best_ratio + 1e-12 * (1.0 + (best_ratio if best_ratio >= 0 else -best_ratio))
        for i in range(nrows):
            if T[i, entering] > tol:
                ratio = T[i, rhs] / T[i, entering]
                if ratio <= tie_cut and (leave < 0 or basis[i] < basis[leave]):
                    leave = i

        if best_ratio <= tol:
            streak += 1
            if streak >= _DEGENERATE_STREAK:
                bland = True
        else:
            streak = 0
            bland = False

        pivot = T[leave, entering]
        for j in range(ncols):
            T[leave, j] /= pivot
        for i in range(nrows_total):
            if i == leave:
                continue
            factor = T[i, entering]
            if factor != 0.0:
                for j in range(ncols):
                    T[i, j] -= factor * T[leave, j]
                T[i, entering] = 0.0
        T[leave, entering] = 1.0
        for i in range(nrows):
            if T[i, rhs] < 0.0 and T[i, rhs] > -1e-10:
                T[i, rhs] = 0.0
        basis[leave] = entering
        pivots += 1
    return PIVOT_LIMIT, pivots
