"""Numeric hot kernels with selectable backend.

Two interchangeable implementations live side by side:

* ``_numba_impl`` -- ``@njit``-compiled loops (default when numba imports),
* ``_numpy_impl`` -- pure-numpy reference used as fallback and for checking.

Selection is controlled by the ``MAGCOUNT_BACKEND`` environment variable:
``numba`` (require numba, fail hard if unavailable), ``numpy`` (force the
fallback), or unset (numba when importable, else numpy).

Exported kernels:

``tridiag_inertia(kd, ke, md, me, sigmas)``
    Sturm-sequence counts ``#{eigenvalues of (K, M) < sigma}`` for a real
    symmetric tridiagonal pencil, one count per entry of ``sigmas``.

``banded_inertia(ab, pivmin)``
    Negative-pivot count of an LDL^H factorization of a complex Hermitian
    matrix in lower banded storage; returns ``(neg, n_clamped)`` where
    ``n_clamped`` counts pivots that had to be clamped away from zero.

``p1_magnetic_elements(x, y, tris, aq, bq)``
    Per-triangle 3x3 element matrices of the magnetic quadratic form
    (stiffness + first-order coupling + zeroth-order term, three-midpoint
    quadrature) and of the mass form.
"""

from __future__ import annotations

import os

_requested = os.environ.get("MAGCOUNT_BACKEND", "").strip().lower()
if _requested not in {"", "numba", "numpy"}:
    raise RuntimeError(
        f"MAGCOUNT_BACKEND={_requested!r} not understood (use 'numba' or 'numpy')"
    )

if _requested == "numpy":
    from . import _numpy_impl as _impl

    BACKEND = "numpy"
else:
    try:
        from . import _numba_impl as _impl

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        from . import _numpy_impl as _impl

        BACKEND = "numpy"

tridiag_inertia = _impl.tridiag_inertia
banded_inertia = _impl.banded_inertia
p1_magnetic_elements = _impl.p1_magnetic_elements


def get_implementations():
    """Return both backends (for cross-checks and benchmarks).

    Keys are backend names; the numba entry is absent when numba is not
    importable.
    """
    impls = {}
    try:
        from . import _numba_impl

        impls["numba"] = _numba_impl
    except ImportError:
        pass
    from . import _numpy_impl

    impls["numpy"] = _numpy_impl
    return impls
