"""Pure-numpy kernel implementations.

Fallback backend used when the compiled extension is unavailable (and the
reference side of the backend benchmark). Signatures mirror `_core`.
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def csr_from_dense(x: np.ndarray):
    """Compressed-row layout of a dense (n, d) matrix."""
    mask = x != 0.0
    indptr = np.zeros(x.shape[0] + 1, dtype=np.int64)
    np.cumsum(mask.sum(axis=1), out=indptr[1:])
    rows, cols = np.nonzero(mask)
    return x[mask].astype(np.float64, copy=False), cols.astype(np.int64), indptr, rows.astype(np.int64)


def csr_matmul(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Sparse (n, d) @ dense (d, m) via on-demand CSR; skips zero entries."""
    data, cols, indptr, rows = csr_from_dense(x)
    out = np.zeros((x.shape[0], w.shape[1]), dtype=np.float64)
    np.add.at(out, rows, data[:, None] * w[cols])
    return out


def dense_matmul(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    return x @ w


def tree_predict(
    x: np.ndarray,
    feature: np.ndarray,
    threshold: np.ndarray,
    left: np.ndarray,
    right: np.ndarray,
    value: np.ndarray,
) -> np.ndarray:
    """Level-synchronous traversal of one tree over an (n, d) feature batch."""
    n = x.shape[0]
    node = np.zeros(n, dtype=np.int64)
    rows = np.arange(n)
    active = feature[node] >= 0
    while active.any():
        idx = rows[active]
        cur = node[idx]
        go_left = x[idx, feature[cur]] <= threshold[cur]
        node[idx] = np.where(go_left, left[cur], right[cur])
        active = feature[node] >= 0
    return value[node]


def conv2d(images: np.ndarray, filters: np.ndarray) -> np.ndarray:
    """Direct valid-padding stride-1 convolution.

    images: (n, h, w); filters: (f, fh, fw). Returns (n, f*oh*ow) with
    filter-major flattening.
    """
    windows = np.lib.stride_tricks.sliding_window_view(images, filters.shape[1:], axis=(1, 2))
    out = np.einsum("nxyhw,fhw->nfxy", windows, filters)
    return out.reshape(images.shape[0], -1)
