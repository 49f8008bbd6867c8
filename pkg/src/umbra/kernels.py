"""Backend selection for the integer matrix kernels.

The compiled Cython kernels are preferred when present; setting the
environment variable ``UMBRA_PURE_KERNELS=1`` forces the pure-Python
fallback (useful for benchmarking and debugging).  ``BACKEND`` records
which implementation is active.
"""

from __future__ import annotations

import os

if os.environ.get("UMBRA_PURE_KERNELS", "") not in ("", "0"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_py as _impl  # type: ignore[no-redef]

BACKEND: str = _impl.BACKEND
imat_mul = _impl.imat_mul
imat_vec = _impl.imat_vec
ivec_mat = _impl.ivec_mat
imat_comb = _impl.imat_comb
imat_div = _impl.imat_div
iseq_gcd = _impl.iseq_gcd
