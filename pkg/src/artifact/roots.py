"""Classical root data, Weyl groups, Chevalley signs and (*)-decompositions.

X and Y are both Z^dim in the standard e_i coordinates and the pairing is the
dot product.  Roots and coroots are matched by index.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .errors import NoDecomposition, RealizationMismatch, UnsupportedFamily, UnsupportedRank
from .lattice import IntMatrix, Lattice, LatticeHom, Vector, matmul, rational_nullspace, rational_solve

FAMILIES = ("A", "B", "C", "D")


def _e(dim: int, i: int, c: int = 1) -> List[int]:
    v = [0] * dim
    v[i] = c
    return v


def _vec(v) -> Vector:
    return tuple(int(x) for x in v)


def dot(x: Sequence[int], y: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(x, y))


@dataclass(frozen=True)
class RootDatum:
    family: str
    n: int
    dim: int
    roots: Tuple[Vector, ...]
    coroots: Tuple[Vector, ...]
    simple: Tuple[int, ...]
    _root_index: Dict[Vector, int] = field(default_factory=dict, compare=False, repr=False)
    _coroot_index: Dict[Vector, int] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        self._root_index.update({r: i for i, r in enumerate(self.roots)})
        self._coroot_index.update({c: i for i, c in enumerate(self.coroots)})

    @property
    def name(self) -> str:
        return f"{self.family}{self.n}"

    @property
    def pairing(self) -> IntMatrix:
        return tuple(tuple(1 if i == j else 0 for j in range(self.dim)) for i in range(self.dim))

    @property
    def lattice(self) -> Lattice:
        return Lattice(self.dim)

    def root_index(self, r: Sequence[int]) -> int:
        return self._root_index[_vec(r)]

    def coroot_index(self, c: Sequence[int]) -> int:
        return self._coroot_index[_vec(c)]

    def is_coroot(self, c: Sequence[int]) -> bool:
        return _vec(c) in self._coroot_index

    def is_root(self, r: Sequence[int]) -> bool:
        return _vec(r) in self._root_index

    def coroot_of(self, r: Sequence[int]) -> Vector:
        return self.coroots[self.root_index(r)]

    def root_of(self, c: Sequence[int]) -> Vector:
        return self.roots[self.coroot_index(c)]

    @property
    def simple_roots(self) -> Tuple[Vector, ...]:
        return tuple(self.roots[i] for i in self.simple)

    @property
    def simple_coroots(self) -> Tuple[Vector, ...]:
        return tuple(self.coroots[i] for i in self.simple)

    def simple_coords(self, c: Sequence[int]) -> Tuple[int, ...]:
        """Coordinates of a vector of the coroot span in the simple-coroot basis."""
        M = tuple(zip(*self.simple_coroots))
        x = rational_solve(M, c)
        if x is None or any(v.denominator != 1 for v in x):
            raise ValueError(f"{tuple(c)} is not in the coroot lattice")
        return tuple(int(v) for v in x)

    def is_positive_coroot(self, c: Sequence[int]) -> bool:
        # with the chosen simple system, positivity is read off the first nonzero entry
        return next(x for x in c if x) > 0

    @property
    def positive_coroots(self) -> Tuple[Vector, ...]:
        return tuple(c for c in self.coroots if self.is_positive_coroot(c))

    def sc_inclusion(self) -> LatticeHom:
        """Y^sc (basis: simple coroots) into Y."""
        return LatticeHom.from_images(self.simple_coroots, self.dim)

    def reflect_coweight(self, alpha: Sequence[int], y: Sequence[int]) -> Vector:
        av = self.coroot_of(alpha)
        p = dot(alpha, y)
        return tuple(yi - p * ai for yi, ai in zip(y, av))

    def reflect_weight(self, alpha: Sequence[int], x: Sequence[int]) -> Vector:
        av = self.coroot_of(alpha)
        p = dot(x, av)
        return tuple(xi - p * ai for xi, ai in zip(x, alpha))

    def reflection_matrix(self, i: int) -> IntMatrix:
        """Matrix of the i-th simple reflection on Y (columns are images of e_j)."""
        alpha = self.simple_roots[i]
        cols = [self.reflect_coweight(alpha, _e(self.dim, j)) for j in range(self.dim)]
        return tuple(zip(*cols))

    def to_json(self, with_signs: bool = False) -> dict:
        out = {
            "family": self.family,
            "rank": self.n,
            "dim": self.dim,
            "roots": [list(r) for r in self.roots],
            "coroots": [list(c) for c in self.coroots],
            "simple": list(self.simple),
            "pairing": [list(r) for r in self.pairing],
        }
        if with_signs:
            tab = chevalley_signs(self)
            out["signs"] = [[list(a), list(b), tab[a, b]] for a in self.roots for b in self.roots]
        return out


def build_root_datum(family: str, n: int) -> RootDatum:
    return _build(family.upper(), int(n))


@lru_cache(maxsize=None)
def _build(family: str, n: int) -> RootDatum:
    if family not in FAMILIES:
        raise UnsupportedFamily(family)
    if n < 1 or (family == "D" and n < 2):
        raise UnsupportedRank(f"{family}{n}")
    roots: List[Vector] = []
    coroots: List[Vector] = []
    dim = n + 1 if family == "A" else n

    def add(r, c):
        roots.append(_vec(r))
        coroots.append(_vec(c))

    for i, j in itertools.permutations(range(dim), 2):
        v = [0] * dim
        v[i], v[j] = 1, -1
        add(v, v)
    if family != "A":
        for i, j in itertools.combinations(range(dim), 2):
            for s in (1, -1):
                v = [0] * dim
                v[i], v[j] = s, s
                add(v, v)
    if family == "B":
        for i in range(dim):
            for s in (1, -1):
                add(_e(dim, i, s), _e(dim, i, 2 * s))
    if family == "C":
        for i in range(dim):
            for s in (1, -1):
                add(_e(dim, i, 2 * s), _e(dim, i, s))

    idx = {r: k for k, r in enumerate(roots)}
    simple = []
    for i in range(n - 1 if family != "A" else n):
        v = [0] * dim
        v[i], v[i + 1] = 1, -1
        simple.append(idx[_vec(v)])
    if family == "B":
        simple.append(idx[_vec(_e(dim, n - 1))])
    elif family == "C":
        simple.append(idx[_vec(_e(dim, n - 1, 2))])
    elif family == "D":
        v = [0] * dim
        v[n - 2], v[n - 1] = 1, 1
        simple.append(idx[_vec(v)])
    return RootDatum(family, n, dim, tuple(roots), tuple(coroots), tuple(simple))


def long_short(datum: RootDatum) -> Tuple[List[Vector], List[Vector]]:
    """(long coroots, short coroots); simply laced families report all as short."""
    lengths = {dot(c, c) for c in datum.coroots}
    if len(lengths) == 1:
        return [], list(datum.coroots)
    hi = max(lengths)
    return ([c for c in datum.coroots if dot(c, c) == hi],
            [c for c in datum.coroots if dot(c, c) != hi])


# ----------------------------------------------------------------------------
# Weyl group
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class WeylElement:
    word: Tuple[int, ...]
    action: IntMatrix


def weyl_element(datum: RootDatum, word: Sequence[int]) -> WeylElement:
    M = tuple(tuple(1 if i == j else 0 for j in range(datum.dim)) for i in range(datum.dim))
    for i in word:
        M = matmul(M, datum.reflection_matrix(i))
    return WeylElement(tuple(word), M)


def weyl_act(w: WeylElement, y: Sequence[int]) -> Vector:
    return tuple(sum(a * b for a, b in zip(row, y)) for row in w.action)


def weyl_group(datum: RootDatum, limit: int = 500000) -> List[WeylElement]:
    """All elements by breadth-first closure (shortest words)."""
    start = weyl_element(datum, ())
    gens = [datum.reflection_matrix(i) for i in range(len(datum.simple))]
    seen = {start.action: start}
    frontier = [start]
    while frontier:
        nxt = []
        for w in frontier:
            for i, s in enumerate(gens):
                m = matmul(w.action, s)
                if m not in seen:
                    seen[m] = WeylElement(w.word + (i,), m)
                    nxt.append(seen[m])
                    if len(seen) > limit:
                        raise ValueError("Weyl group too large")
        frontier = nxt
    return list(seen.values())


# ----------------------------------------------------------------------------
# matrix realization and Chevalley signs
# ----------------------------------------------------------------------------

Sparse = Dict[Tuple[int, int], Fraction]


def _sp_mul(A: Sparse, B: Sparse) -> Sparse:
    rows: Dict[int, List[Tuple[int, Fraction]]] = {}
    for (k, j), v in B.items():
        rows.setdefault(k, []).append((j, v))
    out: Sparse = {}
    for (i, k), a in A.items():
        for j, b in rows.get(k, ()):
            out[i, j] = out.get((i, j), 0) + a * b
    return {key: v for key, v in out.items() if v}


def _sp_add(A: Sparse, B: Sparse, c=1) -> Sparse:
    out = dict(A)
    for key, v in B.items():
        out[key] = out.get(key, 0) + c * v
    return {key: v for key, v in out.items() if v}


def _sp_scale(A: Sparse, c) -> Sparse:
    return {key: v * c for key, v in A.items() if v * c}


def _sp_identity(N: int) -> Sparse:
    return {(i, i): Fraction(1) for i in range(N)}


def _sp_exp(X: Sparse, t, N: int) -> Sparse:
    out = _sp_identity(N)
    term = _sp_identity(N)
    k = 0
    while True:
        k += 1
        term = _sp_scale(_sp_mul(term, X), Fraction(t) / k)
        if not term:
            return out
        out = _sp_add(out, term)


@dataclass
class Realization:
    """Fixed matrix model: GL standard, Sp/SO with antidiagonal forms."""

    datum: RootDatum
    N: int
    form: Optional[Sparse]
    weights: List[Vector]
    _x: Dict[Vector, Sparse] = field(default_factory=dict)
    _w: Dict[Vector, Sparse] = field(default_factory=dict)
    _wi: Dict[Vector, Sparse] = field(default_factory=dict)

    def torus(self, y: Sequence[int], t) -> Sparse:
        return {(i, i): Fraction(t) ** dot(w, y) for i, w in enumerate(self.weights)}

    def H(self, y: Sequence[int]) -> Sparse:
        return {(i, i): Fraction(dot(w, y)) for i, w in enumerate(self.weights) if dot(w, y)}

    def in_lie(self, X: Sparse) -> bool:
        if self.form is None:
            return True
        XtJ = _sp_mul({(j, i): v for (i, j), v in X.items()}, self.form)
        return not _sp_add(XtJ, _sp_mul(self.form, X))

    def in_group(self, g: Sparse) -> bool:
        if self.form is None:
            return True
        gt = {(j, i): v for (i, j), v in g.items()}
        return _sp_mul(_sp_mul(gt, self.form), g) == self.form

    def _root_space(self, alpha: Vector) -> Sparse:
        by_weight: Dict[Vector, List[int]] = {}
        for j, w in enumerate(self.weights):
            by_weight.setdefault(w, []).append(j)
        cells = [(i, j) for i, w in enumerate(self.weights)
                 for j in by_weight.get(tuple(a - b for a, b in zip(w, alpha)), ())]
        if self.form is None:
            basis = [tuple(Fraction(1 if k == m else 0) for k in range(len(cells))) for m in range(len(cells))]
        else:
            rows = []
            probe = []
            for c in cells:
                X = {c: Fraction(1)}
                XtJ = _sp_mul({(j, i): v for (i, j), v in X.items()}, self.form)
                probe.append(_sp_add(XtJ, _sp_mul(self.form, X)))
            keys = sorted({k for p in probe for k in p})
            for key in keys:
                rows.append([p.get(key, Fraction(0)) for p in probe])
            basis = rational_nullspace(rows, len(cells))
        if len(basis) != 1:
            raise RealizationMismatch(f"root space of {alpha} has dimension {len(basis)}")
        v = basis[0]
        den = 1
        for x in v:
            den = den * x.denominator // _gcd(den, x.denominator)
        ints = [int(x * den) for x in v]
        g = 0
        for x in ints:
            g = _gcd(g, abs(x))
        ints = [x // g for x in ints]
        if next(x for x in ints if x) < 0:
            ints = [-x for x in ints]
        return {c: Fraction(x) for c, x in zip(cells, ints) if x}

    def X(self, alpha: Sequence[int]) -> Sparse:
        """Root vector; positive roots primitive, negatives normalized by [X_a, X_-a] = H_a."""
        alpha = _vec(alpha)
        if alpha in self._x:
            return self._x[alpha]
        d = self.datum
        pos = d.is_positive_coroot(d.coroot_of(alpha))
        base = alpha if pos else tuple(-a for a in alpha)
        Xp = self._x.get(base) or self._root_space(base)
        self._x[base] = Xp
        if pos:
            return Xp
        Xm = self._root_space(alpha)
        br = _sp_add(_sp_mul(Xp, Xm), _sp_mul(Xm, Xp), -1)
        Ha = self.H(d.coroot_of(base))
        key = next(iter(Ha))
        c = Ha[key] / br[key]
        Xm = _sp_scale(Xm, c)
        if _sp_add(_sp_add(_sp_mul(Xp, Xm), _sp_mul(Xm, Xp), -1), Ha, -1):
            raise RealizationMismatch(f"bracket normalization failed for {alpha}")
        self._x[alpha] = Xm
        return Xm

    def x(self, alpha: Sequence[int], t) -> Sparse:
        return _sp_exp(self.X(alpha), t, self.N)

    def n(self, alpha: Sequence[int], t) -> Sparse:
        t = Fraction(t)
        neg = tuple(-a for a in alpha)
        return _sp_mul(_sp_mul(self.x(alpha, t), self.x(neg, -1 / t)), self.x(alpha, t))

    def w(self, alpha: Sequence[int]) -> Sparse:
        alpha = _vec(alpha)
        if alpha not in self._w:
            self._w[alpha] = self.n(alpha, 1)
        return self._w[alpha]

    def w_inv(self, alpha: Sequence[int]) -> Sparse:
        alpha = _vec(alpha)
        if alpha not in self._wi:
            self._wi[alpha] = self.n(alpha, -1)
        return self._wi[alpha]


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


@lru_cache(maxsize=None)
def realization(family: str, n: int) -> Realization:
    d = build_root_datum(family, n)
    dim = d.dim
    if family == "A":
        weights = [_vec(_e(dim, i)) for i in range(dim)]
        return Realization(d, dim, None, weights)
    zero = (0,) * dim
    weights = [_vec(_e(dim, i)) for i in range(n)]
    if family == "B":
        weights.append(zero)
    weights += [_vec(_e(dim, i, -1)) for i in reversed(range(n))]
    N = len(weights)
    form: Sparse = {}
    for i in range(N):
        j = N - 1 - i
        if family == "C":
            form[i, j] = Fraction(1 if i < n else -1)
        elif family == "B" and i == j:
            form[i, j] = Fraction(2)
        else:
            form[i, j] = Fraction(1)
    return Realization(d, N, form, weights)


def chevalley_sign(datum: RootDatum, alpha: Sequence[int], beta: Sequence[int]) -> int:
    return _sign(datum.family, datum.n, _vec(alpha), _vec(beta))


@lru_cache(maxsize=None)
def _sign(family: str, n: int, alpha: Vector, beta: Vector) -> int:
    R = realization(family, n)
    d = R.datum
    gamma = d.reflect_weight(alpha, beta)
    C = _sp_mul(_sp_mul(R.w(alpha), R.X(beta)), R.w_inv(alpha))
    Xg = R.X(gamma)
    key = next(iter(Xg))
    if key not in C:
        raise RealizationMismatch(f"conjugate of X_{beta} is not in the {gamma} root space")
    eps = C[key] / Xg[key]
    if eps not in (1, -1) or _sp_add(C, Xg, -eps):
        raise RealizationMismatch(f"sign for ({alpha}, {beta}) is {eps}")
    return int(eps)


class ChevalleySignTable(dict):
    """Map (alpha, beta) -> epsilon, filled on demand."""

    def __init__(self, datum: RootDatum):
        super().__init__()
        self.datum = datum

    def __missing__(self, key):
        a, b = key
        v = chevalley_sign(self.datum, a, b)
        self[key] = v
        return v

    def fill(self) -> "ChevalleySignTable":
        for a in self.datum.roots:
            for b in self.datum.roots:
                self[a, b]
        return self


def chevalley_signs(datum: RootDatum) -> ChevalleySignTable:
    return ChevalleySignTable(datum)


def check_sign_group_level(datum: RootDatum, alpha: Sequence[int], beta: Sequence[int]) -> bool:
    """w_a x_b(t) w_a^-1 == x_{w_a b}(eps t) for t = 1 and t = -1."""
    R = realization(datum.family, datum.n)
    eps = chevalley_sign(datum, alpha, beta)
    gamma = datum.reflect_weight(alpha, beta)
    for t in (1, -1):
        lhs = _sp_mul(_sp_mul(R.w(alpha), R.x(beta, t)), R.w_inv(alpha))
        if lhs != R.x(gamma, eps * t):
            return False
    return True


# ----------------------------------------------------------------------------
# (*)-decompositions
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class StarDecomposition:
    coroot: Vector
    summands: Tuple[int, ...]  # positions in datum.simple
    negative: bool = False


def _star_paths(datum: RootDatum, coroot: Vector) -> Iterator[Tuple[int, ...]]:
    target = datum.simple_coords(coroot)
    if any(x < 0 for x in target):
        raise NoDecomposition(f"{coroot} is not a positive coroot")
    sc = datum.simple_coroots
    r = len(sc)

    def rec(cur: List[int], counts: List[int], path: List[int]):
        if counts == list(target):
            yield tuple(path)
            return
        for i in range(r):
            if counts[i] < target[i]:
                nxt = [a + b for a, b in zip(cur, sc[i])]
                if datum.is_coroot(nxt):
                    counts[i] += 1
                    path.append(i)
                    yield from rec(nxt, counts, path)
                    path.pop()
                    counts[i] -= 1

    yield from rec([0] * datum.dim, [0] * r, [])


def all_star_decompositions(datum: RootDatum, coroot: Sequence[int]) -> List[StarDecomposition]:
    c = _vec(coroot)
    neg = not datum.is_positive_coroot(c)
    base = tuple(-x for x in c) if neg else c
    return [StarDecomposition(c, p, neg) for p in _star_paths(datum, base)]


def star_decompose(datum: RootDatum, coroot: Sequence[int]) -> StarDecomposition:
    c = _vec(coroot)
    if not datum.is_coroot(c):
        raise NoDecomposition(f"{c} is not a coroot")
    neg = not datum.is_positive_coroot(c)
    base = tuple(-x for x in c) if neg else c
    for p in _star_paths(datum, base):
        return StarDecomposition(c, p, neg)
    raise NoDecomposition(f"no (*)-path for {c}")


def check_star(datum: RootDatum, dec: StarDecomposition) -> bool:
    cur = [0] * datum.dim
    sgn = -1 if dec.negative else 1
    for i in dec.summands:
        cur = [a + sgn * b for a, b in zip(cur, datum.simple_coroots[i])]
        if not datum.is_coroot(cur):
            return False
    return tuple(cur) == dec.coroot
