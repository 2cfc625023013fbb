"""Small dense-simplex LP kernel shared by the projection, stable-lottery,
and distortion modules.

The pivot loop has a compiled (Cython) and a pure-NumPy implementation with
identical semantics; the compiled one is preferred at import when available.
Run benchmarks/bench_kernels.py to compare them.
"""

from ._core import (
    EQUAL,
    GREATER,
    LESS,
    InfeasibleProgram,
    LinearProgram,
    LpSolution,
    StandardFormSolver,
    find_feasible,
    in_convex_hull,
    solve,
)
from ._kernel_select import get_kernels, kernel_name

__all__ = [
    "EQUAL",
    "GREATER",
    "LESS",
    "InfeasibleProgram",
    "LinearProgram",
    "LpSolution",
    "StandardFormSolver",
    "find_feasible",
    "get_kernels",
    "in_convex_hull",
    "kernel_name",
    "solve",
]
