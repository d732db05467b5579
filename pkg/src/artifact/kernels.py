"""F_p kernels: the compiled module when built, else the numpy fallback.

Set BDCOVER_PURE=1 to force the fallback.
"""
from __future__ import annotations

import os

if os.environ.get("BDCOVER_PURE") == "1":
    from . import _kernels_py as _impl
    COMPILED = False
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        COMPILED = True
    except ImportError:
        from . import _kernels_py as _impl
        COMPILED = False

matmul = _impl.matmul
rref = _impl.rref
rank = _impl.rank
nullspace = _impl.nullspace
inverse = _impl.inverse
subspace_key = _impl.subspace_key
act_rref = _impl.act_rref
