# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled F_p linear algebra kernels; same API as ``_kernels_py``."""
import numpy as np

ctypedef long long i64


cdef inline i64 _inv(i64 a, i64 p):
    # a^(p-2) mod p, p prime
    cdef i64 r = 1, b = a % p, e = p - 2
    while e > 0:
        if e & 1:
            r = (r * b) % p
        b = (b * b) % p
        e >>= 1
    return r


def matmul(A, B, long p):
    cdef i64[:, :] a = np.ascontiguousarray(A, dtype=np.int64)
    cdef i64[:, :] b = np.ascontiguousarray(B, dtype=np.int64)
    cdef Py_ssize_t n = a.shape[0], m = a.shape[1], l = b.shape[1], i, j, k
    out = np.zeros((n, l), dtype=np.int64)
    cdef i64[:, :] o = out
    cdef i64 s, aik
    for i in range(n):
        for k in range(m):
            aik = a[i, k]
            if aik == 0:
                continue
            for j in range(l):
                o[i, j] += aik * b[k, j]
        for j in range(l):
            o[i, j] %= p
    return out


cdef Py_ssize_t _rref_inplace(i64[:, :] R, long p, list pivots):
    cdef Py_ssize_t rows = R.shape[0], cols = R.shape[1], r = 0, c, i, j
    cdef i64 inv, f, tmp
    for c in range(cols):
        if r == rows:
            break
        i = r
        while i < rows and R[i, c] == 0:
            i += 1
        if i == rows:
            continue
        if i != r:
            for j in range(cols):
                tmp = R[r, j]
                R[r, j] = R[i, j]
                R[i, j] = tmp
        inv = _inv(R[r, c], p)
        for j in range(cols):
            R[r, j] = (R[r, j] * inv) % p
        for i in range(rows):
            if i != r and R[i, c] != 0:
                f = R[i, c]
                for j in range(cols):
                    R[i, j] = (R[i, j] - f * R[r, j]) % p
                    if R[i, j] < 0:
                        R[i, j] += p
        pivots.append(c)
        r += 1
    return r


def rref(M, long p):
    R = np.ascontiguousarray(M, dtype=np.int64) % p
    pivots = []
    cdef Py_ssize_t r = _rref_inplace(R, p, pivots)
    return R[:r].copy(), pivots


def rank(M, long p):
    R = np.ascontiguousarray(M, dtype=np.int64) % p
    pivots = []
    return _rref_inplace(R, p, pivots)


def nullspace(M, long p):
    R0 = np.ascontiguousarray(M, dtype=np.int64) % p
    cdef Py_ssize_t n = R0.shape[1], k, i
    pivots = []
    _rref_inplace(R0, p, pivots)
    pset = set(pivots)
    free = [c for c in range(n) if c not in pset]
    out = np.zeros((len(free), n), dtype=np.int64)
    cdef i64[:, :] o = out
    cdef i64[:, :] R = R0
    for k in range(len(free)):
        f = free[k]
        o[k, f] = 1
        for i in range(len(pivots)):
            o[k, pivots[i]] = (p - R[i, f]) % p
    return out


def inverse(M, long p):
    M = np.ascontiguousarray(M, dtype=np.int64) % p
    n = M.shape[0]
    R, piv = rref(np.hstack([M, np.eye(n, dtype=np.int64)]), p)
    if len(piv) < n or piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return R[:, n:].copy()


def subspace_key(M, long p):
    R, _ = rref(M, p)
    return R.tobytes()


def act_rref(B, g, long p):
    return rref(matmul(B, g, p), p)[0]
