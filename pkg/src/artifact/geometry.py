"""Finite-field models of the doubling construction.

Vectors are rows and groups act on the right, so g preserves a form J iff
g J g^T = J.  Only prime fields are supported.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels as K
from .errors import (FieldMismatch, NotInGroup, NotUnipotentInFlag, ShapeMismatch, TooLarge,
                     UnsupportedFamily)
from .ffield import factor_prime_power

Mat = np.ndarray
MAX_STATES = 10 ** 6


def _arr(M) -> Mat:
    return np.array(M, dtype=np.int64)


def _eye(n: int) -> Mat:
    return np.eye(n, dtype=np.int64)


def _key(M: Mat) -> bytes:
    return np.ascontiguousarray(M, dtype=np.int64).tobytes()


def _check_prime(q: int) -> int:
    p, r = factor_prime_power(q)
    if r != 1:
        raise FieldMismatch(f"only prime fields are supported, got q={q}")
    return p


# ----------------------------------------------------------------------------
# formed spaces and groups
# ----------------------------------------------------------------------------

@dataclass(eq=False)
class FormedSpace:
    """F_p^dim with form matrix J, J^T = -epsilon J (epsilon 1: alternating)."""

    p: int
    form: Mat
    epsilon: int

    def __post_init__(self):
        self.form = _arr(self.form) % self.p
        J = self.form
        if J.shape[0] != J.shape[1]:
            raise ShapeMismatch("form must be square")
        if K.rank(J, self.p) != J.shape[0]:
            raise ValueError("form is degenerate")
        if not np.array_equal(J.T % self.p, (-self.epsilon * J) % self.p):
            raise ValueError("form does not have the declared symmetry")
        if self.epsilon == 1 and any(J[i, i] % self.p for i in range(J.shape[0])):
            raise ValueError("alternating form has nonzero diagonal")

    @property
    def dim(self) -> int:
        return self.form.shape[0]

    def pair(self, x, y) -> int:
        return int(_arr(x) @ self.form @ _arr(y) % self.p)

    def gram(self, A, B) -> Mat:
        return K.matmul(K.matmul(A, self.form, self.p), _arr(B).T, self.p)

    def perp(self, B) -> Mat:
        """Basis of the orthogonal complement of the row space of B."""
        B = _arr(B)
        if B.size == 0:
            return _eye(self.dim)
        return K.nullspace(K.matmul(B, self.form, self.p), self.p)

    def is_isotropic(self, B) -> bool:
        B = _arr(B)
        return B.size == 0 or not self.gram(B, B).any()

    def preserves(self, g) -> bool:
        g = _arr(g)
        return np.array_equal(K.matmul(K.matmul(g, self.form, self.p), g.T, self.p), self.form)

    def to_json(self) -> dict:
        return {"p": self.p, "epsilon": self.epsilon, "form": self.form.tolist()}


def standard_space(family: str, m: int, p: int) -> Optional[FormedSpace]:
    """Sp_{2m} (C), SO_{2m+1} (B), SO_{2m} (D); None for GL_m (A)."""
    if family == "A":
        return None
    if family == "C":
        n = 2 * m
        J = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            J[i, n - 1 - i] = 1 if i < m else -1
        return FormedSpace(p, J, 1)
    if family in ("B", "D"):
        if p == 2:
            raise FieldMismatch("orthogonal groups need odd q")
        n = 2 * m + 1 if family == "B" else 2 * m
        J = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            J[i, n - 1 - i] = 1
        return FormedSpace(p, J, -1)
    raise UnsupportedFamily(f"unknown family {family!r}")


def group_order(family: str, m: int, q: int) -> int:
    if family == "A":
        return math.prod(q ** m - q ** i for i in range(m))
    if family in ("B", "C"):
        return q ** (m * m) * math.prod(q ** (2 * i) - 1 for i in range(1, m + 1))
    if family == "D":
        return q ** (m * (m - 1)) * (q ** m - 1) * math.prod(q ** (2 * i) - 1 for i in range(1, m))
    raise UnsupportedFamily(family)


def max_isotropic_count(space: FormedSpace) -> int:
    """Number of maximal isotropic subspaces in one SO-orbit (all of them for Sp)."""
    q, n = space.p, space.dim
    h = n // 2
    if space.epsilon == 1:
        return math.prod(q ** i + 1 for i in range(1, h + 1))
    if n % 2:
        return math.prod(q ** i + 1 for i in range(1, h + 1))
    return math.prod(q ** i + 1 for i in range(1, h))


def _candidate_vectors(n: int, p: int, level: int) -> Iterable[Mat]:
    """Level 0: e_i and e_i + e_{i+1}; 1: e_i + c e_j; 2: every projective point when few."""
    if level >= 2 and p ** n <= 4096:
        for v in itertools.product(range(p), repeat=n):
            nz = [x for x in v if x]
            if nz and nz[0] == 1:
                yield np.array(v, dtype=np.int64)
        return
    for i in range(n):
        v = np.zeros(n, dtype=np.int64)
        v[i] = 1
        yield v
    for i in range(n):
        js = [i + 1, n - 1 - i] if level == 0 else range(i + 1, n)
        for j in sorted(set(j for j in js if i < j < n)):
            for c in ((1,) if level == 0 else range(1, p)):
                v = np.zeros(n, dtype=np.int64)
                v[i], v[j] = 1, c
                yield v


def transvection(space: FormedSpace, v) -> Mat:
    """x -> x + <x,v> v."""
    v = _arr(v).reshape(1, -1)
    return (_eye(space.dim) + space.form @ v.T @ v) % space.p


def reflection(space: FormedSpace, u) -> Mat:
    """x -> x - 2<x,u>/<u,u> u."""
    p = space.p
    u = _arr(u).reshape(1, -1)
    quu = space.pair(u[0], u[0])
    c = (2 * pow(quu, -1, p)) % p
    return (_eye(space.dim) - c * (space.form @ u.T @ u)) % p


def eichler(space: FormedSpace, u, v) -> Mat:
    """x -> x + <x,u>v - <x,v>u - <v,v>/2 <x,u>u for isotropic u orthogonal to v."""
    p = space.p
    u, v = _arr(u).reshape(1, -1), _arr(v).reshape(1, -1)
    J = space.form
    half = pow(2, -1, p) * space.pair(v[0], v[0]) % p
    return (_eye(space.dim) + J @ u.T @ v - J @ v.T @ u - half * (J @ u.T @ u)) % p


def _eichler_generators(space: FormedSpace) -> List[Mat]:
    T, h = witt_basis(space)
    out = []
    for a in range(h):
        for u in (T[a], T[-1 - a]):
            for w in T:
                if space.pair(u, w) == 0 and K.rank(np.vstack([u, w]), space.p) == 2:
                    out.append(eichler(space, u, w))
    return out


def isometry_generators(space: FormedSpace, level: int = 2, spinor: bool = True) -> List[Mat]:
    """Transvections (alternating) or products of two reflections (symmetric).

    With ``spinor`` False only reflection pairs of square spinor norm are used,
    which generate the commutator subgroup Omega instead of SO.
    """
    p = space.p
    if space.epsilon == 1:
        return [transvection(space, v) for v in _candidate_vectors(space.dim, p, level)]
    aniso = [u for u in _candidate_vectors(space.dim, p, level) if space.pair(u, u)]
    u0 = aniso[0]
    r0 = reflection(space, u0)
    squares = {(x * x) % p for x in range(1, p)}
    out = []
    for u in aniso[1:]:
        if not spinor and (space.pair(u, u) * space.pair(u0, u0)) % p not in squares:
            continue
        out.append(K.matmul(reflection(space, u), r0, p))
    if not spinor:
        # pairs within the non-square class
        ns = [u for u in aniso if (space.pair(u, u) * space.pair(u0, u0)) % p not in squares]
        if ns:
            r1 = reflection(space, ns[0])
            out += [K.matmul(reflection(space, u), r1, p) for u in ns[1:]]
    if level >= 2 and p ** space.dim > 4096:
        out += _eichler_generators(space)
    return out


@dataclass(eq=False)
class ClassicalGroup:
    """G(F_p) for a family and rank, with a generating set and membership test."""

    family: str
    m: int
    p: int
    space: Optional[FormedSpace]
    generators: List[Mat]
    derived: bool = False

    @property
    def dim(self) -> int:
        return self.space.dim if self.space is not None else self.m

    @property
    def name(self) -> str:
        if self.family == "A":
            return f"GL_{self.m}(F_{self.p})"
        if self.family == "C":
            return f"Sp_{2 * self.m}(F_{self.p})"
        n = 2 * self.m + 1 if self.family == "B" else 2 * self.m
        return f"{'Omega' if self.derived else 'SO'}_{n}(F_{self.p})"

    def identity(self) -> Mat:
        return _eye(self.dim)

    def contains(self, g) -> bool:
        g = _arr(g) % self.p
        if g.shape != (self.dim, self.dim):
            return False
        if self.family == "A":
            return K.rank(g, self.p) == self.dim
        if not self.space.preserves(g):
            return False
        if self.family in ("B", "D"):
            return _det_mod(g, self.p) == 1
        return True

    def order(self) -> int:
        n = group_order(self.family, self.m, self.p)
        return n // 2 if self.derived else n

    @cached_property
    def _elements(self) -> List[Mat]:
        return closure(self.generators, self.identity(), self.p, MAX_STATES)

    def elements(self) -> List[Mat]:
        if self.order() > MAX_STATES:
            raise TooLarge(f"{self.name} has {self.order()} elements")
        els = self._elements
        if len(els) != self.order():
            raise AssertionError(f"generators of {self.name} give {len(els)} elements")
        return els

    def random_element(self, rng) -> Mat:
        els = self.elements()
        return els[rng.randrange(len(els))]


def _det_mod(M: Mat, p: int) -> int:
    R = _arr(M) % p
    n = R.shape[0]
    det = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if R[i, c]), None)
        if piv is None:
            return 0
        if piv != c:
            R[[c, piv]] = R[[piv, c]]
            det = -det
        det = det * int(R[c, c]) % p
        inv = pow(int(R[c, c]), -1, p)
        for i in range(c + 1, n):
            if R[i, c]:
                R[i] = (R[i] - R[i, c] * inv * R[c]) % p
    return det % p


def closure(gens: Sequence[Mat], start: Mat, p: int, limit: int) -> List[Mat]:
    """All products start * word(gens), by breadth-first search."""
    seen = {_key(start): start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = K.matmul(x, g, p)
            k = _key(y)
            if k not in seen:
                if len(seen) >= limit:
                    raise TooLarge(f"closure exceeds {limit} elements")
                seen[k] = y
                queue.append(y)
    return list(seen.values())


def build_group(family: str, m: int, q: int, derived: bool = False) -> ClassicalGroup:
    """GL_m (A), Sp_{2m} (C), split SO_{2m+1} (B), split SO_{2m} (D) over F_q.

    ``derived`` gives the spinor kernel Omega for the orthogonal families.
    """
    p = _check_prime(q)
    if family not in ("A", "B", "C", "D"):
        raise UnsupportedFamily(f"unknown family {family!r}")
    if m < 1:
        raise UnsupportedFamily("rank must be positive")
    space = standard_space(family, m, p)
    if family == "A":
        gens = []
        for i in range(m):
            for j in range(m):
                if i != j:
                    g = _eye(m)
                    g[i, j] = 1
                    gens.append(g)
        if p > 2:
            g = _eye(m)
            g[0, 0] = _primitive_root(p)
            gens.append(g)
        if not gens:
            gens = [_eye(m)]
    else:
        gens = isometry_generators(space, 2, spinor=not derived)
    return ClassicalGroup(family, m, p, space, gens, derived and family in ("B", "D"))


def _primitive_root(p: int) -> int:
    from .ffield import GF
    return GF(p).generator


# ----------------------------------------------------------------------------
# Witt bases
# ----------------------------------------------------------------------------

def _find_isotropic(space: FormedSpace, basis: Mat) -> Optional[Mat]:
    """A nonzero isotropic vector in the span of ``basis`` (rows)."""
    p = space.p
    if space.epsilon == 1:
        return basis[0]
    for v in basis:
        if space.pair(v, v) == 0:
            return v
    # orthogonalize, then search among at most three diagonal vectors
    orth: List[Mat] = []
    for v in basis:
        w = v.copy()
        for o in orth:
            c = space.pair(w, o) * pow(space.pair(o, o), -1, p) % p
            w = (w - c * o) % p
        if w.any():
            if space.pair(w, w) == 0:
                return w
            orth.append(w)
        if len(orth) == 3:
            break
    for cs in itertools.product(range(p), repeat=len(orth)):
        if any(cs):
            w = sum(c * o for c, o in zip(cs, orth)) % p
            if space.pair(w, w) == 0:
                return w
    return None


def _hyperbolic_partners(space: FormedSpace, E: Mat) -> Mat:
    """Isotropic F with E J F^T = I and F J F^T = 0."""
    p, n = space.p, space.dim
    r = E.shape[0]
    EJ = K.matmul(E, space.form, p)
    # solve EJ F0^T = I column by column
    F0 = np.zeros((r, n), dtype=np.int64)
    R, piv = K.rref(np.hstack([EJ, _eye(r)]), p)
    if len(piv) < r or piv[-1] >= n:
        raise ValueError("rows are not independent")
    for i in range(r):
        for row, c in enumerate(piv):
            F0[i, c] = R[row, n + i]
    M0 = space.gram(F0, F0)
    if space.epsilon == 1:
        C = -np.triu(M0, 1)
    else:
        C = -(M0 * pow(2, -1, p))
    F = (F0 + K.matmul(C % p, E, p)) % p
    assert not space.gram(F, F).any() and np.array_equal(K.matmul(EJ, F.T, p), _eye(r))
    return F


def witt_basis(space: FormedSpace, first: Optional[Mat] = None) -> Tuple[Mat, int]:
    """Rows e_1..e_h, [anisotropic middle], f_h..f_1 with <e_i,f_i> = 1.

    ``first`` (isotropic rows) become e_1..e_r.  Returns (T, h).
    """
    p, n = space.p, space.dim
    E = [] if first is None or _arr(first).size == 0 else list(_arr(first) % p)
    if E and not space.is_isotropic(_arr(E)):
        raise ValueError("initial rows are not isotropic")
    while True:
        used = np.vstack([_arr(E), _hyperbolic_partners(space, _arr(E))]) if E else np.zeros((0, n), dtype=np.int64)
        rest = space.perp(used) if used.size else _eye(n)
        if rest.shape[0] < 2:
            break
        v = _find_isotropic(space, rest)
        if v is None:
            break
        E.append(v % p)
    F = list(_hyperbolic_partners(space, _arr(E))) if E else []
    used = _arr(E + F) if E else np.zeros((0, space.dim), dtype=np.int64)
    mid = space.perp(used) if used.size else _eye(space.dim)
    h = len(E)
    T = np.vstack([_arr(E).reshape(h, space.dim), mid.reshape(-1, space.dim),
                   _arr(F[::-1]).reshape(h, space.dim)]) % p
    return T, h


# ----------------------------------------------------------------------------
# doubled space
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class IsotropicFlag:
    subspaces: Tuple[Mat, ...]

    def dims(self) -> List[int]:
        return [s.shape[0] for s in self.subspaces]


@dataclass(eq=False)
class DoubledSpace:
    """W^{2k} ordered x_1..x_k, y_k..y_1 with form sum <x_i,x_i'> - <y_i,y_i'>."""

    base: FormedSpace
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        d, p = self.base.dim, self.base.p
        J = np.zeros((self.dim, self.dim), dtype=np.int64)
        for b in range(2 * self.k):
            s = 1 if b < self.k else -1
            J[b * d:(b + 1) * d, b * d:(b + 1) * d] = s * self.base.form
        self.space = FormedSpace(p, J % p, self.base.epsilon)

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def d(self) -> int:
        return self.base.dim

    @property
    def dim(self) -> int:
        return 2 * self.k * self.base.dim

    def block(self, sign: str, i: int) -> int:
        """Block index of W_{i,+} or W_{i,-}."""
        return i - 1 if sign == "+" else 2 * self.k - i

    def _embed(self, parts: Dict[int, Mat]) -> Mat:
        d = self.d
        v = np.zeros(self.dim, dtype=np.int64)
        for b, x in parts.items():
            v[b * d:(b + 1) * d] = x
        return v % self.p

    def delta(self, i: int) -> Mat:
        return _arr([self._embed({self.block("+", i): e, self.block("-", i): e}) for e in _eye(self.d)])

    def nabla(self, i: int) -> Mat:
        return _arr([self._embed({self.block("+", i): e, self.block("-", i): -e}) for e in _eye(self.d)])

    def delta_k(self) -> Mat:
        return K.rref(np.vstack([self.delta(i) for i in range(1, self.k + 1)]), self.p)[0]

    def flag(self) -> IsotropicFlag:
        """Y_j = W_k^nabla + ... + W_{k-j+1}^nabla for j = 1..k-1."""
        subs = []
        for j in range(1, self.k):
            subs.append(np.vstack([self.nabla(i) for i in range(self.k, self.k - j, -1)]))
        return IsotropicFlag(tuple(subs))

    @cached_property
    def extended_flag(self) -> List[Mat]:
        """Z_1..Z_{2k-2}: Y_1..Y_{k-1}, Y_{k-1}^perp..Y_1^perp."""
        ys = list(self.flag().subspaces)
        return ys + [self.space.perp(Y) for Y in reversed(ys)]

    def iota(self, g1, g2) -> Mat:
        d, k = self.d, self.k
        g1, g2 = _arr(g1) % self.p, _arr(g2) % self.p
        out = np.zeros((self.dim, self.dim), dtype=np.int64)
        for b in range(2 * k):
            g = g2 if b == 2 * k - 1 else g1
            out[b * d:(b + 1) * d, b * d:(b + 1) * d] = g
        return out

    def in_group(self, g, det_one: bool) -> bool:
        g = _arr(g) % self.p
        if not self.space.preserves(g):
            return False
        return not det_one or _det_mod(g, self.p) == 1

    # -- N^bullet ------------------------------------------------------------

    @cached_property
    def _annihilators(self) -> List[Mat]:
        """For each Z_j a matrix C with v in Z_j iff v C = 0."""
        return [K.nullspace(Z, self.p).T for Z in self.extended_flag]

    def lowers_flag(self, X) -> bool:
        """X maps Z_j into Z_{j-1} (Z_0 = 0, Z_{2k-1} = V)."""
        X = _arr(X) % self.p
        Zs = self.extended_flag + [_eye(self.dim)]
        prev = None
        for j, Z in enumerate(Zs):
            img = K.matmul(Z, X, self.p)
            if j == 0:
                if img.any():
                    return False
            elif K.matmul(img, self._annihilators[j - 1], self.p).any():
                return False
        return True

    @cached_property
    def n_bullet_basis(self) -> List[Mat]:
        """Basis of the Lie algebra of N^bullet: X J + J X^T = 0 and X lowers the flag."""
        n, p = self.dim, self.p
        if self.k == 1:
            return []
        J = self.space.form
        rows = []
        # X J + J X^T = 0
        for a in range(n):
            for b in range(a, n):
                r = np.zeros(n * n, dtype=np.int64)
                for c in range(n):
                    r[a * n + c] += J[c, b]
                    r[b * n + c] += J[a, c]
                rows.append(r)
        Zs = self.extended_flag + [_eye(n)]
        for j, Z in enumerate(Zs):
            C = self._annihilators[j - 1] if j else _eye(n)
            # (z X C)_{col} = 0 for each basis z of Z_j
            for z in Z:
                for col in range(C.shape[1]):
                    r = np.zeros(n * n, dtype=np.int64)
                    for a in range(n):
                        if z[a]:
                            r[a * n:(a + 1) * n] += z[a] * C[:, col]
                    rows.append(r)
        basis = K.nullspace(_arr(rows) % p, p)
        return [b.reshape(n, n) for b in basis]

    @cached_property
    def n_bullet_generators(self) -> List[Mat]:
        """Root elements of N^bullet, built in a Witt basis adapted to the flag."""
        if self.k == 1:
            return []
        p, n = self.p, self.dim
        Y = self.flag().subspaces[-1]
        T, _ = witt_basis(self.space, Y)
        Tinv = K.inverse(T, p)
        Jw = K.matmul(K.matmul(T, self.space.form, p), T.T, p)
        wspace = FormedSpace(p, Jw, self.base.epsilon)
        gens = []
        for X in self.n_bullet_basis:
            Xw = K.matmul(K.matmul(T, X, p), Tinv, p)  # X in Witt coordinates
            # the nullspace basis mixes root vectors, so split by support orbits
            for R in _split_root_vectors(Xw, Jw, p):
                g = _unipotent_element(R, wspace)
                gens.append(K.matmul(K.matmul(Tinv, g, p), T, p))
        uniq = {_key(g): g for g in gens}
        out = [g for g in uniq.values() if not np.array_equal(g, _eye(n))]
        for g in out:
            assert self.space.preserves(g) and self.lowers_flag(g - _eye(n))
        return out

    def in_n_bullet(self, u) -> bool:
        u = _arr(u) % self.p
        return self.space.preserves(u) and self.lowers_flag((u - _eye(self.dim)) % self.p)

    # -- the character --------------------------------------------------------

    def psi_argument(self, u) -> int:
        """sum_i tr(u_i o A_i) for u in N^bullet."""
        u = _arr(u) % self.p
        if not self.in_n_bullet(u):
            raise NotUnipotentInFlag("element is not in the unipotent radical of the flag")
        return self.psi_linear((u - _eye(self.dim)) % self.p)

    def psi_linear(self, X) -> int:
        """The same functional on X = u - 1 (also valid on the Lie algebra)."""
        p, d, k = self.p, self.d, self.k
        X = _arr(X) % p
        total = 0
        for i in range(1, k):
            j = k - i + 1  # Y_i / Y_{i-1} is W_j^nabla
            src = self.nabla(j)
            if i <= k - 2:
                img = self.nabla(j - 1)
            else:
                img = _arr([self._embed({self.block("+", 1): 2 * e}) for e in _eye(d)])
            moved = K.matmul(img, X, p)
            cols = slice(self.block("+", j) * d, (self.block("+", j) + 1) * d)
            total += int(np.trace(moved[:, cols]))
        return total % p

    @cached_property
    def psi_vector(self) -> Mat:
        return _arr([self.psi_linear(b) for b in self.n_bullet_basis])


def _split_root_vectors(Xw: Mat, Jw: Mat, p: int) -> List[Mat]:
    """Split X into pieces supported on single orbits {(a,b), (b*,a*)} of entries."""
    n = Xw.shape[0]
    partner = {}
    for a in range(n):
        nz = np.nonzero(Jw[a])[0]
        partner[a] = [int(c) for c in nz]
    done = set()
    out = []
    for a, b in zip(*np.nonzero(Xw)):
        a, b = int(a), int(b)
        if (a, b) in done:
            continue
        # entries linked to (a,b) by X J + J X^T = 0
        group = {(a, b)}
        stack = [(a, b)]
        while stack:
            i, j = stack.pop()
            for i2 in partner[j]:
                for j2 in partner[i]:
                    if Xw[i2, j2] and (i2, j2) not in group:
                        group.add((i2, j2))
                        stack.append((i2, j2))
        done |= group
        R = np.zeros_like(Xw)
        for i, j in group:
            R[i, j] = Xw[i, j]
        out.append(R)
    return out


def _unipotent_element(X: Mat, space: FormedSpace) -> Mat:
    """A group element with Lie algebra direction X: 1+X, 1+X+X^2/2, or the Cayley transform."""
    p, n = space.p, space.dim
    I = _eye(n)
    g = (I + X) % p
    if space.preserves(g):
        return g
    if p > 2:
        g = (I + X + K.matmul(X, X, p) * pow(2, -1, p)) % p
        if space.preserves(g):
            return g
        g = K.matmul((I + X) % p, K.inverse((I - X) % p, p), p)
        if space.preserves(g):
            return g
    raise NotUnipotentInFlag("could not exponentiate a root vector")


# ----------------------------------------------------------------------------
# subspaces
# ----------------------------------------------------------------------------

def intersect(A: Mat, B: Mat, p: int) -> Mat:
    """Row space of A intersected with that of B."""
    if A.size == 0 or B.size == 0:
        return np.zeros((0, A.shape[1] if A.size else B.shape[1]), dtype=np.int64)
    N = K.nullspace(np.vstack([A, -B % p]).T % p, p)
    if N.size == 0:
        return np.zeros((0, A.shape[1]), dtype=np.int64)
    return K.rref(K.matmul(N[:, :A.shape[0]], A, p), p)[0]


def lagrangian_of(gamma, dbl: DoubledSpace) -> Mat:
    return K.act_rref(dbl.delta_k(), _arr(gamma) % dbl.p, dbl.p)


def enumerate_max_isotropic(dbl: DoubledSpace, max_states: int = MAX_STATES) -> List[Mat]:
    """The orbit of W^{Delta,k} under G^box, i.e. P \\ G^box."""
    space, p = dbl.space, dbl.p
    expected = max_isotropic_count(space)
    if expected > max_states:
        raise TooLarge(f"{expected} maximal isotropic subspaces exceed the limit {max_states}")
    start = dbl.delta_k()
    for level in (0, 1, 2):
        gens = isometry_generators(space, level)
        if not gens:
            continue
        seen = {start.tobytes(): start}
        queue = deque([start])
        while queue:
            L = queue.popleft()
            for g in gens:
                M = K.act_rref(L, g, p)
                kk = M.tobytes()
                if kk not in seen:
                    seen[kk] = M
                    queue.append(M)
        if len(seen) == expected:
            return sorted(seen.values(), key=lambda M: M.tobytes())
    raise AssertionError(f"found {len(seen)} maximal isotropics, expected {expected}")


# ----------------------------------------------------------------------------
# Whittaker pairs
# ----------------------------------------------------------------------------

@dataclass
class WhittakerPair:
    """A flag in F_p^n given by quotient dimensions, with A_i: Y_i/Y_{i-1} -> Y_{i+1}/Y_i.

    ``quotient_dims`` lists dim Y_i/Y_{i-1} for i = 1..r+1 (the last is W/Y_r).
    A_i has shape (d_i, d_{i+1}) in the row convention.
    """

    quotient_dims: Tuple[int, ...]
    A_maps: Tuple[Mat, ...]
    p: int

    def __post_init__(self):
        if len(self.A_maps) != len(self.quotient_dims) - 1:
            raise ShapeMismatch("need one map per proper flag step")
        for i, A in enumerate(self.A_maps):
            if _arr(A).shape != (self.quotient_dims[i], self.quotient_dims[i + 1]):
                raise ShapeMismatch(f"A_{i + 1} has shape {_arr(A).shape}")

    @property
    def n_subspaces(self) -> int:
        return len(self.quotient_dims) - 1


@dataclass
class PairClass:
    label: str  # in_orbit_km, higher, other
    stabilizer: dict = field(default_factory=dict)


def whittaker_pair_classify(pair: WhittakerPair, k: int, m: int) -> PairClass:
    p = pair.p
    A = [(_arr(a) % p) for a in pair.A_maps]
    r = pair.n_subspaces
    if sum(pair.quotient_dims) != k * m:
        raise ShapeMismatch("flag does not live on a km-dimensional space")
    for i in range(r - k + 1):
        comp = A[i]
        for j in range(i + 1, i + k):
            comp = K.matmul(comp, A[j], p)
        if comp.any():
            return PairClass("higher")
    if (r == k - 1 and all(d == m for d in pair.quotient_dims)
            and all(K.rank(a, p) == m for a in A)):
        return PairClass("in_orbit_km", {"type": f"GL_{m}", "order": group_order("A", m, p)})
    stab: dict = {}
    if A and pair.quotient_dims[0] == m:
        a = K.rank(A[0], p)
        ker = K.nullspace(A[0].T, p)  # x with x A_1 = 0
        stab = {"type": "S_A", "rank": a, "kernel": ker.tolist(),
                "dim": a * (m - a), "order": p ** (a * (m - a))}
    return PairClass("other", stab)


# ----------------------------------------------------------------------------
# Omega classification
# ----------------------------------------------------------------------------

@dataclass
class OmegaResult:
    label: str  # omega1, omega2, tilde
    omega1: bool
    geometric_tilde: bool  # L cap Y_{k-1} = 0
    pair: Optional[WhittakerPair] = None
    pair_label: Optional[str] = None
    normalized: bool = False
    pair_consistent: bool = True
    pair_unique: bool = True


def _lin_solve_coeffs(basis: Sequence[Mat], constraint) -> Mat:
    """Coefficient vectors c with constraint(sum c_t basis_t) = 0, for linear constraint."""
    if not basis:
        return np.zeros((0, 0), dtype=np.int64)
    cols = [constraint(b).ravel() for b in basis]
    return _arr(cols).T


def n_L_cap_n_bullet(L: Mat, dbl: DoubledSpace) -> List[Mat]:
    """Basis of {X in Lie(N^bullet): V X in L, L X = 0}; 1+X runs over N_L cap N^bullet."""
    p = dbl.p
    basis = dbl.n_bullet_basis
    if not basis:
        return []
    JLt = K.matmul(dbl.space.form, L.T, p)
    M = _lin_solve_coeffs(basis, lambda X: np.concatenate([K.matmul(L, X, p).ravel(),
                                                           K.matmul(X, JLt, p).ravel()]))
    coeffs = K.nullspace(M % p, p)
    return [sum(int(c) * b for c, b in zip(row, basis)) % p for row in coeffs]


def _p_L_cap_n_bullet(L: Mat, dbl: DoubledSpace) -> List[Mat]:
    p = dbl.p
    basis = dbl.n_bullet_basis
    JLt = K.matmul(dbl.space.form, L.T, p)
    M = _lin_solve_coeffs(basis, lambda X: K.matmul(K.matmul(L, X, p), JLt, p))
    coeffs = K.nullspace(M % p, p)
    return [sum(int(c) * b for c, b in zip(row, basis)) % p for row in coeffs]


def omega1_linear(L: Mat, dbl: DoubledSpace) -> bool:
    return any(dbl.psi_linear(X) for X in n_L_cap_n_bullet(L, dbl))


def induced_pair(L: Mat, dbl: DoubledSpace) -> Tuple[WhittakerPair, bool, bool, bool]:
    """The pair induced on GL(L); returns (pair, normalized, consistent, unique)."""
    p, n = dbl.p, L.shape[0]
    _, piv = K.rref(L, p)
    # flag L cap Z_j in L-coordinates
    chain = []
    for C in dbl._annihilators:
        U = K.nullspace(K.matmul(L, C, p).T, p)
        chain.append(K.rref(U, p)[0] if U.size else np.zeros((0, n), dtype=np.int64))
    distinct = []
    for U in chain:
        if 0 < U.shape[0] < n and (not distinct or U.shape[0] > distinct[-1].shape[0]):
            distinct.append(U)
    normalized = len(distinct) < len(chain)
    # adapted basis of L-coordinates
    rows: List[Mat] = []
    dims = []
    for U in distinct + [_eye(n)]:
        before = len(rows)
        for v in U:
            if K.rank(_arr(rows + [v]), p) > len(rows):
                rows.append(v)
        dims.append(len(rows) - before)
    Tl = _arr(rows)
    Tl_inv = K.inverse(Tl, p)
    offs = np.cumsum([0] + dims)
    r = len(distinct)
    shapes = [(dims[i], dims[i + 1]) for i in range(r)]
    nunk = sum(a * b for a, b in shapes)
    eqs, rhs = [], []
    for X in _p_L_cap_n_bullet(L, dbl):
        R = K.matmul(L, X, p)[:, piv]  # L X = R L
        Ra = K.matmul(K.matmul(Tl, R, p), Tl_inv, p)
        row = []
        for i, (a, b) in enumerate(shapes):
            Ri = Ra[offs[i + 1]:offs[i + 2], offs[i]:offs[i + 1]]  # (d_{i+1}, d_i)
            # tr(R_i A_i) = sum_{s,t} R_i[t,s] A_i[s,t]
            row += [int(Ri[t, s]) for s in range(a) for t in range(b)]
        eqs.append(row)
        rhs.append(dbl.psi_linear(X))
    A_maps: List[Mat] = [np.zeros(s, dtype=np.int64) for s in shapes]
    consistent, unique = True, True
    if nunk and eqs:
        aug = np.hstack([_arr(eqs), _arr(rhs).reshape(-1, 1)]) % p
        R_, piv_ = K.rref(aug, p)
        if nunk in piv_:
            consistent = False
        else:
            sol = np.zeros(nunk, dtype=np.int64)
            for i, c in enumerate(piv_):
                sol[c] = R_[i, nunk]
            unique = len(piv_) == nunk
            pos = 0
            for i, (a, b) in enumerate(shapes):
                A_maps[i] = sol[pos:pos + a * b].reshape(a, b)
                pos += a * b
    elif nunk:
        unique = False
    pair = WhittakerPair(tuple(dims), tuple(A_maps), p)
    return pair, normalized, consistent, unique


def geometric_tilde(L: Mat, dbl: DoubledSpace) -> bool:
    """L cap Y_{k-1} = 0 (always true for k = 1)."""
    if dbl.k == 1:
        return True
    return intersect(L, dbl.flag().subspaces[-1], dbl.p).shape[0] == 0


def classify_subspace(L: Mat, dbl: DoubledSpace) -> OmegaResult:
    geo = geometric_tilde(L, dbl)
    if dbl.k == 1:
        return OmegaResult("tilde", False, geo)
    if omega1_linear(L, dbl):
        return OmegaResult("omega1", True, geo)
    pair, normalized, consistent, unique = induced_pair(L, dbl)
    m = dbl.d
    label = whittaker_pair_classify(pair, dbl.k, m).label if consistent else "other"
    cls = "omega2" if label == "higher" else "tilde"
    return OmegaResult(cls, False, geo, pair, label, normalized, consistent, unique)


def omega_classify(gamma, dbl: DoubledSpace) -> str:
    return classify_subspace(lagrangian_of(gamma, dbl), dbl).label


# ----------------------------------------------------------------------------
# exhaustive unipotent route for Omega_1
# ----------------------------------------------------------------------------

def n_bullet_elements(dbl: DoubledSpace, limit: int = 1 << 20) -> List[Mat]:
    """All of N^bullet as a group, generated from root elements."""
    return closure(dbl.n_bullet_generators, _eye(dbl.dim), dbl.p, limit)


def omega1_exhaustive(L: Mat, dbl: DoubledSpace, elements: Optional[np.ndarray] = None) -> bool:
    """Evaluate psi on every u in N^bullet with u in N_L, i.e. (u-1)V in L and L(u-1) = 0."""
    p, n = dbl.p, dbl.dim
    if dbl.k == 1:
        return False
    if elements is None:
        elements = np.stack(n_bullet_elements(dbl))
    X = (elements - _eye(n)) % p
    JLt = dbl.space.form @ L.T % p
    inL = ~((X @ JLt) % p).any(axis=(1, 2))
    kill = ~((L @ X) % p).any(axis=(1, 2))
    for Xi in X[inL & kill]:
        if dbl.psi_linear(Xi):
            return True
    return False


# ----------------------------------------------------------------------------
# double cosets
# ----------------------------------------------------------------------------

@dataclass
class OrbitInfo:
    representative: Mat
    size: int
    cls: str  # main, negligible, omega1, omega2
    stabilizer_order: int
    n_minus: bool
    n_minus_dim: Optional[int] = None
    contains_identity: bool = False
    stabilizer_is_diagonal: Optional[bool] = None

    def to_json(self) -> dict:
        return {"representative": self.representative.tolist(), "size": self.size,
                "class": self.cls, "stabilizer_order": self.stabilizer_order,
                "N_minus": self.n_minus, "N_minus_isotropic_dim": self.n_minus_dim,
                "contains_identity": self.contains_identity,
                "stabilizer_is_diagonal": self.stabilizer_is_diagonal}


@dataclass
class DoubleCosetReport:
    q: int
    family: str
    rank: int
    k: int
    total: int
    expected_total: int
    orbits: List[OrbitInfo]
    normalizations: int = 0

    def main_orbits(self) -> List[OrbitInfo]:
        return [o for o in self.orbits if o.cls == "main"]

    def to_json(self) -> dict:
        return {"q": self.q, "family": self.family, "rank": self.rank, "k": self.k,
                "total": self.total, "expected_total": self.expected_total,
                "normalizations": self.normalizations,
                "orbits": [o.to_json() for o in self.orbits]}


def isotropic_subspaces(space: FormedSpace) -> List[Mat]:
    """All nonzero totally isotropic subspaces, as RREF bases."""
    p, n = space.p, space.dim
    vecs = [np.array(v, dtype=np.int64) for v in itertools.product(range(p), repeat=n)
            if any(v) and space.pair(np.array(v), np.array(v)) == 0]
    found: Dict[bytes, Mat] = {}
    layer = {}
    for v in vecs:
        R = K.rref(v.reshape(1, -1), p)[0]
        layer[R.tobytes()] = R
    while layer:
        found.update(layer)
        nxt = {}
        for U in layer.values():
            UJ = K.matmul(U, space.form, p)
            for v in vecs:
                if (UJ @ v % p).any() or K.rank(np.vstack([U, v]), p) == U.shape[0]:
                    continue
                R = K.rref(np.vstack([U, v]), p)[0]
                nxt[R.tobytes()] = R
        layer = {kk: v for kk, v in nxt.items() if kk not in found}
    return list(found.values())


def unipotent_radical(G: ClassicalGroup, U: Mat) -> List[Mat]:
    """Elements of G acting trivially on U, U^perp/U and W/U^perp."""
    space, p = G.space, G.p
    Up = space.perp(U)
    CU = K.nullspace(U, p).T
    CUp = K.nullspace(Up, p).T
    out = []
    I = G.identity()
    for g in G.elements():
        X = (g - I) % p
        if K.matmul(U, X, p).any():
            continue
        if K.matmul(K.matmul(Up, X, p), CU, p).any():
            continue
        if K.matmul(X, CUp, p).any():
            continue
        out.append(g)
    return out


def detect_n_minus(R: List[Mat], G: ClassicalGroup, isotropics: List[Mat]) -> Optional[int]:
    """Smallest dim U such that N_U (nontrivial) lies in R as a normal subgroup."""
    p = G.p
    Rkeys = {_key(r) for r in R}
    best = None
    for U in sorted(isotropics, key=lambda M: M.shape[0]):
        NU = unipotent_radical(G, U)
        if len(NU) <= 1:
            continue
        keys = {_key(u) for u in NU}
        if not keys <= Rkeys:
            continue
        normal = True
        for r in R:
            rinv = K.inverse(r, p)
            for u in NU:
                if _key(K.matmul(K.matmul(rinv, u, p), r, p)) not in keys:
                    normal = False
                    break
            if not normal:
                break
        if normal:
            best = U.shape[0]
            break
    return best


def _orbit(start: Mat, gens: Sequence[Mat], p: int) -> Dict[bytes, Mat]:
    seen = {start.tobytes(): start}
    queue = deque([start])
    while queue:
        L = queue.popleft()
        for g in gens:
            M = K.act_rref(L, g, p)
            kk = M.tobytes()
            if kk not in seen:
                seen[kk] = M
                queue.append(M)
    return seen


def enumerate_double_cosets(family: str, m: int, q: int, k: int,
                            max_states: int = MAX_STATES, jobs: int = 1) -> DoubleCosetReport:
    """Orbits of iota(G x G) N^bullet on the maximal isotropics of W^{box,k}."""
    if family == "A":
        raise UnsupportedFamily("the doubling of GL is not modelled over finite fields")
    G = build_group(family, m, q)
    dbl = DoubledSpace(G.space, k)
    p = dbl.p
    Ls = enumerate_max_isotropic(dbl, max_states)
    gens = [dbl.iota(g, G.identity()) for g in G.generators] + \
           [dbl.iota(G.identity(), g) for g in G.generators] + dbl.n_bullet_generators
    index = {L.tobytes(): i for i, L in enumerate(Ls)}
    orbit_of = [-1] * len(Ls)
    orbits: List[List[int]] = []
    ident = dbl.delta_k().tobytes()
    for i, L in enumerate(Ls):
        if orbit_of[i] >= 0:
            continue
        members = _orbit(L, gens, p)
        oid = len(orbits)
        orbits.append([])
        for kk in members:
            j = index[kk]
            orbit_of[j] = oid
            orbits[oid].append(j)
    # identity orbit first, then by size
    order = sorted(range(len(orbits)),
                   key=lambda o: (ident not in {Ls[j].tobytes() for j in orbits[o]}, len(orbits[o]), o))
    els = G.elements()
    isos = isotropic_subspaces(G.space)
    nb_gens = dbl.n_bullet_generators

    def describe(o: int) -> OrbitInfo:
        members = orbits[o]
        keys = {Ls[j].tobytes() for j in members}
        has_id = ident in keys
        rep = dbl.delta_k() if has_id else Ls[min(members)]
        res = classify_subspace(rep, dbl)
        nb_orbit = _orbit(rep, nb_gens, p) if nb_gens else {rep.tobytes(): rep}
        R_minus = [g for g in els if K.act_rref(rep, dbl.iota(G.identity(), g), p).tobytes() in nb_orbit]
        stab = 0
        diagonal = True
        for g1 in els:
            for g2 in els:
                if K.act_rref(rep, dbl.iota(g1, g2), p).tobytes() == rep.tobytes():
                    stab += 1
                    diagonal = diagonal and np.array_equal(g1, g2)
        nm = detect_n_minus(R_minus, G, isos)
        if res.label in ("omega1", "omega2"):
            cls = res.label
        else:
            cls = "negligible" if nm is not None else "main"
        info = OrbitInfo(rep, len(members), cls, stab, nm is not None, nm, has_id, diagonal)
        return info, res.normalized

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            described = list(ex.map(describe, order))
    else:
        described = [describe(o) for o in order]
    infos = [i for i, _ in described]
    norm = sum(1 for _, n in described if n)
    return DoubleCosetReport(q, family, m, k, len(Ls), max_isotropic_count(dbl.space), infos, norm)


# ----------------------------------------------------------------------------
# lemmas over F_q
# ----------------------------------------------------------------------------

def in_siegel_parabolic(h: Mat, dbl: DoubledSpace) -> bool:
    D = dbl.delta_k()
    return np.array_equal(K.act_rref(D, h, dbl.p), D)


def diagonal_lemma_check(G: ClassicalGroup, k: int) -> Tuple[bool, int]:
    """iota(G x G) cap P = iota(G^diamond), exhaustively; returns (ok, #pairs in P)."""
    dbl = DoubledSpace(G.space, k)
    ok, count = True, 0
    for g1 in G.elements():
        for g2 in G.elements():
            inP = in_siegel_parabolic(dbl.iota(g1, g2), dbl)
            count += inP
            if inP != np.array_equal(g1, g2):
                ok = False
    return ok, count


def modular_character_check(g1, g2, dbl: DoubledSpace, G: Optional[ClassicalGroup] = None) -> int:
    """det of X -> h^{-1} X h on Lie(N^bullet), h = iota(g1, g2)."""
    p = dbl.p
    if G is not None and not (G.contains(g1) and G.contains(g2)):
        raise NotInGroup("g1, g2 must lie in G")
    if G is None and not (dbl.base.preserves(g1) and dbl.base.preserves(g2)):
        raise NotInGroup("g1, g2 must preserve the form")
    basis = dbl.n_bullet_basis
    if not basis:
        return 1
    h = dbl.iota(g1, g2)
    hinv = K.inverse(h, p)
    B = _arr([b.ravel() for b in basis])  # rows
    imgs = _arr([K.matmul(K.matmul(hinv, b, p), h, p).ravel() for b in basis])
    # solve C B = imgs
    nb = len(basis)
    R, piv = K.rref(np.hstack([B.T, imgs.T]), p)
    if piv[:nb] != list(range(nb)) or any(c >= nb for c in piv):
        raise AssertionError("conjugation does not preserve Lie(N^bullet)")
    C = R[:nb, nb:].T
    return _det_mod(C, p)
