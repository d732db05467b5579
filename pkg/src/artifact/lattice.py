"""Integer lattice algebra and coefficient groups.

Matrices are tuples of integer tuples (row-major).  Coefficient groups are
modelled as subgroups of Q/Z written additively inside, so every element is a
``Fraction`` in [0, 1); the public API still talks about multiplication.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

from .errors import DimensionMismatch, IndexInfinite, NonInjective

IntMatrix = Tuple[Tuple[int, ...], ...]
Vector = Tuple[int, ...]

INFINITE_INDEX = math.inf


# ----------------------------------------------------------------------------
# matrix helpers
# ----------------------------------------------------------------------------

def as_matrix(rows: Iterable[Iterable[int]]) -> IntMatrix:
    out = tuple(tuple(int(x) for x in r) for r in rows)
    if out and len({len(r) for r in out}) > 1:
        raise DimensionMismatch("ragged matrix")
    return out


def shape(M: IntMatrix) -> Tuple[int, int]:
    return len(M), (len(M[0]) if M else 0)


def identity(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(m: int, n: int) -> IntMatrix:
    return tuple((0,) * n for _ in range(m))


def transpose(M: IntMatrix) -> IntMatrix:
    return tuple(zip(*M)) if M else ()


def matmul(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    if A and B and len(A[0]) != len(B):
        raise DimensionMismatch(f"{shape(A)} x {shape(B)}")
    Bt = transpose(B)
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A)


def matvec(A: IntMatrix, v: Sequence[int]) -> Vector:
    if A and len(A[0]) != len(v):
        raise DimensionMismatch(f"{shape(A)} x {len(v)}")
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def det(M: IntMatrix) -> int:
    """Bareiss fraction-free determinant."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(r) for r in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def rational_solve(A: IntMatrix, b: Sequence[int]) -> Optional[Tuple[Fraction, ...]]:
    """One solution x of A x = b over Q, or None."""
    m, n = shape(A)
    R = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        pv = R[r][c]
        R[r] = [x / pv for x in R[r]]
        for i in range(m):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    if any(R[i][n] != 0 for i in range(r, m)):
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = R[i][n]
    return tuple(x)


def rational_nullspace(A: Sequence[Sequence[Fraction]], n: int) -> list:
    """Basis of {x in Q^n : A x = 0} (list of Fraction tuples)."""
    R = [[Fraction(x) for x in row] for row in A]
    m = len(R)
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        pv = R[r][c]
        R[r] = [x / pv for x in R[r]]
        for i in range(m):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][fc]
        basis.append(tuple(v))
    return basis


# ----------------------------------------------------------------------------
# Smith normal form
# ----------------------------------------------------------------------------

def smith_normal_form(M: IntMatrix) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (U, D, V) with U*M*V = D, U and V unimodular, d_i | d_{i+1}."""
    m, n = shape(M)
    A = [list(r) for r in M]
    U = [list(r) for r in identity(m)]
    V = [list(r) for r in identity(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):  # row_dst += f * row_src
        A[dst] = [a + f * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, f):  # col_dst += f * col_src
        for row in A:
            row[dst] += f * row[src]
        for row in V:
            row[dst] += f * row[src]

    for t in range(min(m, n)):
        while True:
            entries = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
            if not entries:
                break
            _, pi, pj = min(entries)
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    if A[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    if A[t][j]:
                        clean = False
            if not clean:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    return as_matrix(U), as_matrix(A), as_matrix(V)


def invariant_factors(M: IntMatrix) -> Tuple[int, ...]:
    _, D, _ = smith_normal_form(M)
    m, n = shape(M)
    return tuple(D[i][i] for i in range(min(m, n)))


def unimodular_inverse(U: IntMatrix) -> IntMatrix:
    """Exact inverse of a unimodular matrix."""
    n = len(U)
    cols = []
    for j in range(n):
        e = [1 if i == j else 0 for i in range(n)]
        x = rational_solve(U, e)
        if x is None or any(v.denominator != 1 for v in x):
            raise ValueError("matrix is not unimodular")
        cols.append([int(v) for v in x])
    return transpose(as_matrix(cols))


# ----------------------------------------------------------------------------
# lattices
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Lattice:
    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be non-negative")

    def basis(self) -> Tuple[Vector, ...]:
        return identity(self.rank)

    def zero(self) -> Vector:
        return (0,) * self.rank


@dataclass(frozen=True)
class LatticeHom:
    source: Lattice
    target: Lattice
    matrix: IntMatrix  # target.rank x source.rank; column j is the image of e_j

    def __post_init__(self):
        m, n = shape(self.matrix)
        if self.source.rank and (m, n) != (self.target.rank, self.source.rank):
            raise DimensionMismatch(
                f"matrix {m}x{n} vs {self.target.rank}x{self.source.rank}")

    @classmethod
    def from_images(cls, images: Sequence[Sequence[int]], target_rank: int) -> "LatticeHom":
        cols = [tuple(v) for v in images]
        for c in cols:
            if len(c) != target_rank:
                raise DimensionMismatch("image has wrong length")
        mat = transpose(as_matrix(cols)) if cols else zeros(target_rank, 0)
        return cls(Lattice(len(cols)), Lattice(target_rank), mat)

    def __call__(self, y: Sequence[int]) -> Vector:
        if len(y) != self.source.rank:
            raise DimensionMismatch("vector not in source lattice")
        if self.source.rank == 0:
            return (0,) * self.target.rank
        return matvec(self.matrix, y)

    def images(self) -> Tuple[Vector, ...]:
        return tuple(self(e) for e in self.source.basis())

    def compose(self, other: "LatticeHom") -> "LatticeHom":
        """self o other."""
        return LatticeHom(other.source, self.target, matmul(self.matrix, other.matrix))


def matrix_rank(M: IntMatrix) -> int:
    return sum(1 for d in invariant_factors(M) if d) if M and M[0] else 0


def sublattice_index(incl: LatticeHom):
    """[target : image] as an int, or INFINITE_INDEX when the image has lower rank."""
    if incl.source.rank == 0:
        return 1 if incl.target.rank == 0 else INFINITE_INDEX
    d = invariant_factors(incl.matrix)
    r = sum(1 for x in d if x)
    if r < incl.source.rank:
        raise NonInjective("inclusion has nonzero kernel")
    if r < incl.target.rank:
        return INFINITE_INDEX
    return math.prod(d)


# ----------------------------------------------------------------------------
# coefficient groups
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class CoeffGroup:
    """MuN(N), QmodZ or UnitsFq(q).  ``order`` is None for the divisible group."""

    kind: str
    param: int = 0

    @property
    def order(self) -> Optional[int]:
        if self.kind == "mu":
            return self.param
        if self.kind == "fq":
            return self.param - 1
        return None

    def __str__(self) -> str:
        return {"mu": f"mu{self.param}", "fq": f"Fq{self.param}^x", "qz": "Q/Z"}[self.kind]

    def elem(self, value) -> "CoeffElem":
        v = Fraction(value) % 1
        n = self.order
        if n is not None and (v * n).denominator != 1:
            raise ValueError(f"{value} is not in {self}")
        return CoeffElem(self, v)

    def from_index(self, k: int) -> "CoeffElem":
        if self.order is None:
            raise ValueError("Q/Z has no generator")
        return self.elem(Fraction(k, self.order))

    def one(self) -> "CoeffElem":
        return CoeffElem(self, Fraction(0))

    def has_minus_one(self) -> bool:
        n = self.order
        return n is None or n % 2 == 0

    def minus_one(self) -> "CoeffElem":
        if not self.has_minus_one():
            raise ValueError(f"-1 is not in {self}")
        return CoeffElem(self, Fraction(1, 2))

    def sign(self, exponent: int) -> "CoeffElem":
        """(-1)**exponent as a group element."""
        if exponent % 2 == 0:
            return self.one()
        return self.minus_one()

    def divide(self, w: "CoeffElem", d: int) -> Optional["CoeffElem"]:
        """Some x with x**d == w, or None."""
        if d == 0:
            return self.one() if w.is_one() else None
        n = self.order
        if n is None:
            return self.elem(w.value / d)
        k = int(w.value * n)
        g = math.gcd(d, n)
        if k % g:
            return None
        nn = n // g
        x = ((k // g) * pow((d // g) % nn, -1, nn)) % nn if nn > 1 else 0
        return self.from_index(x)


def MuN(N: int) -> CoeffGroup:
    if N < 1:
        raise ValueError("N must be positive")
    return CoeffGroup("mu", N)


def QmodZ() -> CoeffGroup:
    return CoeffGroup("qz", 0)


def UnitsFq(q: int) -> CoeffGroup:
    if q < 2:
        raise ValueError("q must be at least 2")
    return CoeffGroup("fq", q)


@dataclass(frozen=True)
class CoeffElem:
    group: CoeffGroup
    value: Fraction

    def _check(self, other: "CoeffElem") -> None:
        if other.group != self.group:
            from .errors import CoeffMismatch
            raise CoeffMismatch(f"{self.group} vs {other.group}")

    def __mul__(self, other: "CoeffElem") -> "CoeffElem":
        self._check(other)
        return CoeffElem(self.group, (self.value + other.value) % 1)

    def __truediv__(self, other: "CoeffElem") -> "CoeffElem":
        self._check(other)
        return CoeffElem(self.group, (self.value - other.value) % 1)

    def __pow__(self, k: int) -> "CoeffElem":
        return CoeffElem(self.group, (self.value * k) % 1)

    def inv(self) -> "CoeffElem":
        return CoeffElem(self.group, (-self.value) % 1)

    def is_one(self) -> bool:
        return self.value == 0

    @property
    def index(self) -> int:
        """Exponent of the canonical generator (finite groups only)."""
        return int(self.value * self.group.order)

    def __repr__(self) -> str:
        if self.group.order is not None:
            return f"<{self.group}:{self.index}>"
        return f"<Q/Z:{self.value}>"

    def to_json(self):
        return str(self.value)


@dataclass(frozen=True)
class Character:
    """Homomorphism Z^rank -> group given by its values on the basis."""

    domain: Lattice
    group: CoeffGroup
    values: Tuple[CoeffElem, ...]

    def __post_init__(self):
        if len(self.values) != self.domain.rank:
            raise DimensionMismatch("one value per basis vector required")

    def __call__(self, y: Sequence[int]) -> CoeffElem:
        out = self.group.one()
        for v, k in zip(self.values, y):
            out = out * v ** k
        return out

    def compose(self, h: LatticeHom) -> "Character":
        return Character(h.source, self.group, tuple(self(img) for img in h.images()))


def extend_character(sub: LatticeHom, values: Character, ambient: Lattice) -> Optional[Character]:
    """Extend a character from the image of ``sub`` to ``ambient``.

    Solves M^T c = v through the Smith form of M: with U M V = D the system
    becomes D (U^-T c) = V^T v, one division per invariant factor.
    """
    if sub.target != ambient:
        raise DimensionMismatch("sub must land in the ambient lattice")
    if values.domain != sub.source:
        raise DimensionMismatch("values must live on the source of sub")
    idx = sublattice_index(sub)
    if idx == INFINITE_INDEX:
        raise IndexInfinite("sublattice is not of finite index")
    G = values.group
    n = ambient.rank
    if n == 0:
        return Character(ambient, G, ())
    U, D, V = smith_normal_form(sub.matrix)
    v = values.values
    rhs = []
    for j in range(n):
        acc = G.one()
        for i in range(n):
            acc = acc * v[i] ** V[i][j]
        rhs.append(acc)
    cprime = []
    for j in range(n):
        x = G.divide(rhs[j], D[j][j])
        if x is None:
            return None
        cprime.append(x)
    c = []
    for i in range(n):
        acc = G.one()
        for j in range(n):
            acc = acc * cprime[j] ** U[j][i]
        c.append(acc)
    chi = Character(ambient, G, tuple(c))
    assert chi.compose(sub).values == values.values
    return chi
