"""Kernel backend selection.

Prefers the compiled extension; falls back to the numpy implementation when
the extension is not built. Set OPTBENCH_KERNEL_BACKEND=python to force the
fallback (used by the backend benchmark).
"""

import os

if os.environ.get("OPTBENCH_KERNEL_BACKEND", "").lower() in ("python", "numpy"):
    from . import numpy_impl as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import numpy_impl as _impl

NAME = _impl.NAME
csr_from_dense = _impl.csr_from_dense
csr_matmul = _impl.csr_matmul
dense_matmul = _impl.dense_matmul
tree_predict = _impl.tree_predict
conv2d = _impl.conv2d
