"""Dense bit-matrix arithmetic over GF(2) on uint8 numpy arrays."""

from __future__ import annotations

import numpy as np


def as_gf2(a) -> np.ndarray:
    return np.asarray(a, dtype=np.uint8) & 1


def matmul(a, b) -> np.ndarray:
    # int64 accumulation, reduce once at the end
    return (as_gf2(a).astype(np.int64) @ as_gf2(b).astype(np.int64) % 2).astype(np.uint8)


def rank(a) -> int:
    work = as_gf2(a).copy()
    rows, cols = work.shape
    r = 0
    for c in range(cols):
        pivots = np.nonzero(work[r:, c])[0]
        if pivots.size == 0:
            continue
        p = r + pivots[0]
        work[[r, p]] = work[[p, r]]
        hits = np.nonzero(work[:, c])[0]
        hits = hits[hits != r]
        work[hits] ^= work[r]
        r += 1
        if r == rows:
            break
    return r


def is_invertible(a) -> bool:
    a = as_gf2(a)
    return a.shape[0] == a.shape[1] and rank(a) == a.shape[0]


def inverse(a) -> np.ndarray:
    a = as_gf2(a)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"not square: {a.shape}")
    work = np.concatenate([a, np.eye(n, dtype=np.uint8)], axis=1)
    for c in range(n):
        pivots = np.nonzero(work[c:, c])[0]
        if pivots.size == 0:
            raise np.linalg.LinAlgError("matrix is singular over GF(2)")
        p = c + pivots[0]
        work[[c, p]] = work[[p, c]]
        hits = np.nonzero(work[:, c])[0]
        hits = hits[hits != c]
        work[hits] ^= work[c]
    return work[:, n:].copy()
