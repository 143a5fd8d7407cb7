"""Backend selection for the hot kernels.

Prefers the compiled extension (``tauberlab._kernels``) and falls back to the
numpy implementations in ``tauberlab._kernels_py``.  Set the environment
variable ``TAUBERLAB_PURE_PYTHON=1`` before import to force the fallback;
``backend()`` reports which one is active.

Both backends are deterministic, but they may differ in the last bits of a
result (different summation strategies), so tests compare them with
tolerances, not bit equality.
"""

from __future__ import annotations

import os

if os.environ.get("TAUBERLAB_PURE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

dirichlet_convolve = _impl.dirichlet_convolve
cauchy_convolve = _impl.cauchy_convolve
smallest_prime_factor = _impl.smallest_prime_factor
polyval_many = _impl.polyval_many
dirichlet_grid = _impl.dirichlet_grid
lattice_conv = _impl.lattice_conv
mercer_forward = _impl.mercer_forward
mercer_invert = _impl.mercer_invert


def backend() -> str:
    """Name of the active backend: ``"compiled"`` or ``"python"``."""
    return _impl.BACKEND_NAME
