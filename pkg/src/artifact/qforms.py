"""Weyl-invariant integral quadratic forms on cocharacter lattices."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import DimensionMismatch, NonDecomposable, ParityViolation
from .lattice import IntMatrix, Lattice, LatticeHom, Vector, matmul, rational_nullspace, transpose
from .roots import RootDatum, long_short, weyl_group

# above this rank the closed form is used and only checked, not re-solved
SOLVER_MAX_DIM = 8


@dataclass(frozen=True)
class QuadraticForm:
    """Q(y) = sum diag_i y_i^2 + sum_{i<j} offdiag[i][j] y_i y_j."""

    lattice: Lattice
    diag: Tuple[int, ...]
    offdiag: Tuple[Tuple[int, ...], ...]  # strictly upper triangular part used

    def __post_init__(self):
        n = self.lattice.rank
        if len(self.diag) != n or len(self.offdiag) != n or any(len(r) != n for r in self.offdiag):
            raise DimensionMismatch("form data does not match lattice rank")

    @classmethod
    def diagonal(cls, diag: Sequence[int]) -> "QuadraticForm":
        n = len(diag)
        return cls(Lattice(n), tuple(int(x) for x in diag), tuple((0,) * n for _ in range(n)))

    @classmethod
    def from_gram(cls, diag: Sequence[int], gram: Sequence[Sequence[int]]) -> "QuadraticForm":
        n = len(diag)
        off = tuple(tuple(int(gram[i][j]) if j > i else 0 for j in range(n)) for i in range(n))
        return cls(Lattice(n), tuple(int(x) for x in diag), off)

    @property
    def rank(self) -> int:
        return self.lattice.rank

    def b(self, i: int, j: int) -> int:
        """B_Q(e_i, e_j)."""
        if i == j:
            return 2 * self.diag[i]
        return self.offdiag[min(i, j)][max(i, j)]

    def gram(self) -> IntMatrix:
        n = self.rank
        return tuple(tuple(self.b(i, j) for j in range(n)) for i in range(n))

    def is_diagonal(self) -> bool:
        return not any(any(r) for r in self.offdiag)

    def scale(self, m: int) -> "QuadraticForm":
        return QuadraticForm(self.lattice, tuple(m * d for d in self.diag),
                             tuple(tuple(m * x for x in r) for r in self.offdiag))

    def to_json(self) -> dict:
        n = self.rank
        return {"diag": list(self.diag),
                "offdiag": [[i, j, self.offdiag[i][j]] for i in range(n) for j in range(i + 1, n)
                            if self.offdiag[i][j]]}


def eval_Q(Q: QuadraticForm, y: Sequence[int]) -> int:
    if len(y) != Q.rank:
        raise DimensionMismatch("vector not in the form's lattice")
    s = sum(d * x * x for d, x in zip(Q.diag, y))
    for i, row in enumerate(Q.offdiag):
        yi = y[i]
        if yi:
            for j in range(i + 1, Q.rank):
                if row[j] and y[j]:
                    s += row[j] * yi * y[j]
    return s


def eval_B(Q: QuadraticForm, y1: Sequence[int], y2: Sequence[int]) -> int:
    if len(y1) != Q.rank or len(y2) != Q.rank:
        raise DimensionMismatch("vector not in the form's lattice")
    s = sum(2 * d * a * b for d, a, b in zip(Q.diag, y1, y2))
    for i, row in enumerate(Q.offdiag):
        for j in range(i + 1, Q.rank):
            if row[j]:
                s += row[j] * (y1[i] * y2[j] + y1[j] * y2[i])
    return s


def direct_sum(*forms: QuadraticForm) -> QuadraticForm:
    n = sum(f.rank for f in forms)
    diag: List[int] = []
    off = [[0] * n for _ in range(n)]
    base = 0
    for f in forms:
        diag += f.diag
        for i in range(f.rank):
            for j in range(i + 1, f.rank):
                off[base + i][base + j] = f.offdiag[i][j]
        base += f.rank
    return QuadraticForm(Lattice(n), tuple(diag), tuple(tuple(r) for r in off))


def pullback_form(Q: QuadraticForm, h: LatticeHom) -> QuadraticForm:
    """Q composed with h."""
    if h.target.rank != Q.rank:
        raise DimensionMismatch("map does not land in the form's lattice")
    imgs = h.images()
    n = h.source.rank
    diag = [eval_Q(Q, v) for v in imgs]
    gram = [[eval_B(Q, imgs[i], imgs[j]) if j > i else 0 for j in range(n)] for i in range(n)]
    return QuadraticForm.from_gram(diag, gram)


# ----------------------------------------------------------------------------
# invariance solver
# ----------------------------------------------------------------------------

def _unknowns(n: int) -> List[Tuple[int, int]]:
    return [(i, i) for i in range(n)] + [(i, j) for i in range(n) for j in range(i + 1, n)]


def _gram_of_unknown(n: int, k: Tuple[int, int]) -> IntMatrix:
    i, j = k
    G = [[0] * n for _ in range(n)]
    if i == j:
        G[i][i] = 2
    else:
        G[i][j] = G[j][i] = 1
    return tuple(tuple(r) for r in G)


def invariant_form_space(datum: RootDatum, decomposable: bool = True) -> List[Tuple[Fraction, ...]]:
    """Basis (over Q) of W-invariant forms with equal values on short coroots.

    Coordinates follow ``_unknowns``: diagonal entries, then offdiag for i<j.
    For family A with ``decomposable`` the cross terms are forced to vanish.
    """
    n = datum.dim
    unk = _unknowns(n)
    rows: List[List[Fraction]] = []
    grams = [_gram_of_unknown(n, k) for k in unk]
    for s in range(len(datum.simple)):
        S = datum.reflection_matrix(s)
        St = transpose(S)
        moved = [matmul(matmul(St, G), S) for G in grams]
        for a in range(n):
            for b in range(a, n):
                rows.append([Fraction(m[a][b] - G[a][b]) for m, G in zip(moved, grams)])
    _, short = long_short(datum)
    if short:
        ref = short[0]
        for c in short[1:]:
            rows.append([Fraction(_q_monomial(k, c) - _q_monomial(k, ref)) for k in unk])
    if datum.family == "A" and decomposable:
        for idx, (i, j) in enumerate(unk):
            if i != j:
                r = [Fraction(0)] * len(unk)
                r[idx] = Fraction(1)
                rows.append(r)
    return rational_nullspace(rows, len(unk))


def _q_monomial(k: Tuple[int, int], y: Sequence[int]) -> int:
    i, j = k
    return y[i] * y[j]


def _form_from_coords(n: int, coords: Sequence[Fraction]) -> Tuple[List[Fraction], List[List[Fraction]]]:
    unk = _unknowns(n)
    diag = [Fraction(0)] * n
    off = [[Fraction(0)] * n for _ in range(n)]
    for (i, j), v in zip(unk, coords):
        if i == j:
            diag[i] = v
        else:
            off[i][j] = v
    return diag, off


def _closed_form_diag(datum: RootDatum, a: int) -> List[Fraction]:
    if datum.family in ("B", "D"):
        if datum.family == "B" and datum.n == 1:
            return [Fraction(a, 4)]
        return [Fraction(a, 2)] * datum.dim
    return [Fraction(a)] * datum.dim


def weyl_invariant_form(datum: RootDatum, a: int, q_offdiag: int = 0,
                        decomposable: bool = True) -> QuadraticForm:
    """The W-invariant form with value ``a`` on short coroots.

    For family A the parameter is p = Q(e_i), so Q(coroot) = 2p; ``q_offdiag``
    is the common cross term B(e_i, e_j), allowed only when not decomposable.
    """
    n = datum.dim
    if datum.family == "A":
        if q_offdiag and decomposable:
            raise NonDecomposable("cross term requested for a decomposable form")
        off = tuple(tuple(q_offdiag if j > i else 0 for j in range(n)) for i in range(n))
        Q = QuadraticForm(Lattice(n), (int(a),) * n, off)
        assert is_weyl_invariant(Q, datum)
        return Q
    if n <= SOLVER_MAX_DIM:
        space = invariant_form_space(datum)
        if len(space) != 1:
            raise AssertionError(f"invariant space of {datum.name} has dimension {len(space)}")
        diag, off = _form_from_coords(n, space[0])
        _, short = long_short(datum)
        c = short[0]
        val = sum(diag[i] * c[i] * c[i] for i in range(n)) + sum(
            off[i][j] * c[i] * c[j] for i in range(n) for j in range(i + 1, n))
        scale = Fraction(a) / val
        diag = [d * scale for d in diag]
        off = [[x * scale for x in r] for r in off]
        assert diag == _closed_form_diag(datum, a) and not any(any(r) for r in off)
    else:
        diag = _closed_form_diag(datum, a)
        off = [[Fraction(0)] * n for _ in range(n)]
    if any(d.denominator != 1 for d in diag) or any(x.denominator != 1 for r in off for x in r):
        raise ParityViolation(f"{datum.name} with a={a} has no integral invariant form")
    Q = QuadraticForm(Lattice(n), tuple(int(d) for d in diag),
                      tuple(tuple(int(x) for x in r) for r in off))
    assert is_weyl_invariant(Q, datum)
    return Q


def is_weyl_invariant(Q: QuadraticForm, datum: RootDatum, full: bool = False) -> bool:
    """Check S^T G S = G for simple reflections, or for all of W when ``full``."""
    G = Q.gram()
    if full:
        mats = [w.action for w in weyl_group(datum)]
    else:
        mats = [datum.reflection_matrix(i) for i in range(len(datum.simple))]
    for S in mats:
        if matmul(matmul(transpose(S), G), S) != G:
            return False
        # the diagonal of Q is determined by G, so G-invariance is enough
    return True


def is_decomposable(Q: QuadraticForm, split: Sequence[Sequence[int]]) -> bool:
    part = {}
    for k, block in enumerate(split):
        for i in block:
            part[i] = k
    if sorted(part) != list(range(Q.rank)):
        raise ValueError("split must partition the basis")
    for i in range(Q.rank):
        for j in range(i + 1, Q.rank):
            if part[i] != part[j] and Q.offdiag[i][j]:
                return False
    return True


def siegel_coroot(datum: RootDatum) -> Vector:
    """A coroot in the Levi of the Siegel parabolic, or the first simple coroot in rank one."""
    if datum.dim >= 2:
        v = [0] * datum.dim
        v[0], v[1] = 1, -1
        return tuple(v)
    return datum.simple_coroots[0]


def compute_nQ(n: int, Q: QuadraticForm, datum: Optional[RootDatum] = None) -> int:
    """n / gcd(n, Q(alpha^vee)); with no datum (GL_1 or U_1) uses n / gcd(n, 2a)."""
    if n < 1:
        raise ValueError("n must be positive")
    if datum is None or datum.family == "A":
        return n // math.gcd(n, 2 * Q.diag[0])
    c = siegel_coroot(datum)
    v = eval_Q(Q, c)
    if datum.dim >= 2 and v % 2:
        raise ParityViolation(f"Q on the Siegel coroot {c} is odd")
    return n // math.gcd(n, v)
