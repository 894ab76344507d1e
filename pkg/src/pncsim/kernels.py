"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it was built; otherwise the
numpy implementation in ``_kernels_py`` is used. Set ``PNCSIM_PURE_PYTHON=1``
to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("PNCSIM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass

map_pncf = _impl.map_pncf
mmse_pncf = _impl.mmse_pncf
mmse_pnci = _impl.mmse_pnci
