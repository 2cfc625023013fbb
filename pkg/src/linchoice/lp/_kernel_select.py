"""Select the pivot kernel at import: compiled extension if present, else pure NumPy.

Set LINCHOICE_PURE_PYTHON=1 to force the fallback (used by the kernel benchmark
and by tests that exercise both paths).
"""

import os

from . import _pivot_py

if os.environ.get("LINCHOICE_PURE_PYTHON"):
    _impl = _pivot_py
else:
    try:
        from . import _pivot_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pivot_py

pivot_loop = _impl.pivot_loop

OPTIMAL = _pivot_py.OPTIMAL
UNBOUNDED = _pivot_py.UNBOUNDED
PIVOT_LIMIT = _pivot_py.PIVOT_LIMIT


def kernel_name() -> str:
    return _impl.NAME


def get_kernels():
    """Both pivot implementations, keyed by name (for benchmarks and tests)."""
    kernels = {"python": _pivot_py.pivot_loop}
    try:
        from . import _pivot_cy

        kernels["compiled"] = _pivot_cy.pivot_loop
    except ImportError:
        pass
    return kernels
