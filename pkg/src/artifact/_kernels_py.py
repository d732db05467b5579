"""Pure-Python/numpy F_p linear algebra kernels (fallback for ``_kernels``).

All matrices are 2-d int64 arrays with entries in [0, p).
"""
from __future__ import annotations

import numpy as np


def _mod(M, p):
    return np.asarray(M, dtype=np.int64) % p


def matmul(A, B, p: int):
    return (np.asarray(A, dtype=np.int64) @ np.asarray(B, dtype=np.int64)) % p


def rref(M, p: int):
    """Reduced row echelon form; returns (R, pivots) with zero rows dropped."""
    R = _mod(M, p).copy()
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            R[[r, i]] = R[[i, r]]
        inv = pow(int(R[r, c]), -1, p)
        R[r] = (R[r] * inv) % p
        col = R[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            R[nzr] = (R[nzr] - np.outer(col[nzr], R[r])) % p
        pivots.append(c)
        r += 1
    return R[:r], pivots


def rank(M, p: int) -> int:
    return len(rref(M, p)[1])


def nullspace(M, p: int):
    """Basis (as rows) of {x : M x = 0}."""
    M = _mod(M, p)
    n = M.shape[1]
    R, piv = rref(M, p)
    free = [c for c in range(n) if c not in set(piv)]
    out = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        out[k, f] = 1
        for i, c in enumerate(piv):
            out[k, c] = (-R[i, f]) % p
    return out


def inverse(M, p: int):
    M = _mod(M, p)
    n = M.shape[0]
    R, piv = rref(np.hstack([M, np.eye(n, dtype=np.int64)]), p)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ZeroDivisionError("singular matrix")
    return R[:, n:].copy()


def subspace_key(M, p: int) -> bytes:
    """Canonical key of the row space of M."""
    R, _ = rref(M, p)
    return R.tobytes()


def act_rref(B, g, p: int):
    """RREF basis of the row space of B g."""
    return rref(matmul(B, g, p), p)[0]
