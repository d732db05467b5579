"""Central extensions of lattices by coefficient groups.

An extension of Z^r by A is stored through a normalized 2-cocycle; elements
are pairs (c, y) with (c1, y1)(c2, y2) = (c1 c2 sigma(y1, y2), y1 + y2).
Internally coefficients are Fractions modulo 1, as in ``lattice``.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import CoeffMismatch, DimensionMismatch, ExtensionMismatch, ParentsDiffer
from .lattice import (Character, CoeffElem, CoeffGroup, Lattice, LatticeHom, Vector,
                      extend_character, matrix_rank)
from .qforms import QuadraticForm, eval_B

HALF = Fraction(1, 2)
DEFAULT_WINDOW = 2


def _add(a: Sequence[int], b: Sequence[int]) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def _neg(a: Sequence[int]) -> Vector:
    return tuple(-x for x in a)


# ----------------------------------------------------------------------------
# cocycles: callables (y1, y2) -> Fraction mod 1
# ----------------------------------------------------------------------------

class Cocycle:
    kind = "abstract"

    def __call__(self, y1: Vector, y2: Vector) -> Fraction:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class TrivialCocycle(Cocycle):
    kind = "trivial"

    def __call__(self, y1, y2):
        return Fraction(0)


@dataclass(frozen=True, eq=False)
class StandardFromQ(Cocycle):
    """(-1) ** sum_{i>j} B_ij y1_i y2_j, raised to ``power``."""

    Q: QuadraticForm
    power: int = 1
    kind = "standard"

    def __post_init__(self):
        object.__setattr__(self, "_pairs", [(i, j, self.Q.offdiag[j][i])
                                            for j in range(self.Q.rank)
                                            for i in range(j + 1, self.Q.rank)
                                            if self.Q.offdiag[j][i] % 2])

    def __call__(self, y1, y2):
        s = 0
        for i, j, b in self._pairs:
            s += y1[i] * y2[j]
        return (HALF * s * self.power) % 1


@dataclass(frozen=True, eq=False)
class ExplicitTable(Cocycle):
    """Bilinear cocycle plus the coboundary of a finitely supported phi."""

    bilinear: Tuple[Tuple[Fraction, ...], ...]
    phi: Tuple[Tuple[Vector, Fraction], ...] = ()
    kind = "table"

    def __post_init__(self):
        object.__setattr__(self, "_phi", dict(self.phi))

    def _f(self, y):
        return self._phi.get(tuple(y), Fraction(0))

    def __call__(self, y1, y2):
        s = Fraction(0)
        for i, a in enumerate(y1):
            if a:
                row = self.bilinear[i]
                for j, b in enumerate(y2):
                    if b:
                        s += row[j] * a * b
        s += self._f(y1) + self._f(y2) - self._f(_add(y1, y2))
        return s % 1


@dataclass(frozen=True, eq=False)
class BlockSum(Cocycle):
    """sigma1 on the first r1 coordinates plus sigma2 on the rest."""

    first: Cocycle
    second: Cocycle
    r1: int
    kind = "block"

    def __call__(self, y1, y2):
        r = self.r1
        return (self.first(y1[:r], y2[:r]) + self.second(y1[r:], y2[r:])) % 1


@dataclass(frozen=True, eq=False)
class Blocks(Cocycle):
    """Sum of cocycles on consecutive coordinate blocks."""

    parts: Tuple[Tuple[Cocycle, int], ...]
    kind = "blocks"

    def __call__(self, y1, y2):
        s = Fraction(0)
        i = 0
        for coc, w in self.parts:
            a, b = y1[i:i + w], y2[i:i + w]
            if any(a) and any(b):
                s += coc(a, b)
            i += w
        return s % 1


@dataclass(frozen=True, eq=False)
class DerivedCocycle(Cocycle):
    """Cocycle read off from a group law on sections; ``fn`` does the work."""

    fn: Callable[[Vector, Vector], Fraction]
    label: str
    kind = "derived"

    def __call__(self, y1, y2):
        return self.fn(tuple(y1), tuple(y2)) % 1


@dataclass(frozen=True, eq=False)
class TwistedProduct(Cocycle):
    """sigma1 + sigma2 + B_{Q^sq}((y1, y2, 0), a' e_extra) / 2 on Y1 + Y2 + Z."""

    first: Cocycle
    second: Cocycle
    r1: int
    r2: int
    Q_square: QuadraticForm
    kind = "twisted"

    def __call__(self, y1, y2):
        r1, r2 = self.r1, self.r2
        s = self.first(y1[:r1], y2[:r1]) + self.second(y1[r1:r1 + r2], y2[r1:r1 + r2])
        a2 = y2[r1 + r2]
        if a2:
            e = [0] * (r1 + r2 + 1)
            e[-1] = a2
            base = tuple(y1[:r1 + r2]) + (0,)
            s += HALF * eval_B(self.Q_square, base, e)
        return s % 1


# ----------------------------------------------------------------------------
# extensions and elements
# ----------------------------------------------------------------------------

def basis_grid(rank: int, window: int) -> List[Vector]:
    pts = [(0,) * rank]
    for i in range(rank):
        for k in range(-window, window + 1):
            if k:
                v = [0] * rank
                v[i] = k
                pts.append(tuple(v))
    return pts


def full_grid(rank: int, window: int) -> List[Vector]:
    return [tuple(p) for p in itertools.product(range(-window, window + 1), repeat=rank)]


@dataclass(frozen=True, eq=False)
class Extension:
    lattice: Lattice
    coeff: CoeffGroup
    cocycle: Cocycle
    label: str = ""

    def __post_init__(self):
        check_cocycle(self, sample=200)

    @property
    def rank(self) -> int:
        return self.lattice.rank

    def sigma(self, y1: Sequence[int], y2: Sequence[int]) -> Fraction:
        return self.cocycle(tuple(y1), tuple(y2))

    def elem(self, c, y: Sequence[int]) -> "ExtElement":
        if isinstance(c, CoeffElem):
            if c.group != self.coeff:
                raise CoeffMismatch(f"{c.group} vs {self.coeff}")
            c = c.value
        y = tuple(int(v) for v in y)
        if len(y) != self.rank:
            raise DimensionMismatch("point not in the lattice")
        return ExtElement(self, self.coeff.elem(c), y)

    def lift(self, y: Sequence[int]) -> "ExtElement":
        return self.elem(0, y)

    def identity(self) -> "ExtElement":
        return self.elem(0, (0,) * self.rank)

    def commutator_value(self, y1, y2) -> Fraction:
        return (self.sigma(y1, y2) - self.sigma(y2, y1)) % 1

    def table(self, points: Iterable[Vector]) -> Dict[Tuple[Vector, Vector], Fraction]:
        pts = list(points)
        return {(a, b): self.sigma(a, b) for a in pts for b in pts}

    def to_tsv(self, window: int = DEFAULT_WINDOW) -> str:
        lines = ["y1\ty2\tvalue"]
        pts = full_grid(self.rank, window) if self.rank <= 2 else basis_grid(self.rank, window)
        for (a, b), v in self.table(pts).items():
            lines.append(f"{list(a)}\t{list(b)}\t{v}")
        return "\n".join(lines) + "\n"


def check_cocycle(E: Extension, window: int = DEFAULT_WINDOW, sample: Optional[int] = None,
                  seed: int = 0) -> None:
    """Normalization, coefficient membership and the cocycle identity on a grid."""
    pts = basis_grid(E.rank, window)
    zero = (0,) * E.rank
    n = E.coeff.order
    for p in pts:
        if E.sigma(zero, p) or E.sigma(p, zero):
            raise ExtensionMismatch("cocycle is not normalized")
    triples: Iterable = itertools.product(pts, repeat=3)
    if sample is not None and len(pts) ** 3 > sample:
        rng = random.Random(seed)
        triples = [(rng.choice(pts), rng.choice(pts), rng.choice(pts)) for _ in range(sample)]
    for a, b, c in triples:
        ab = E.sigma(a, b)
        if n is not None and (ab * n).denominator != 1:
            raise CoeffMismatch(f"cocycle value {ab} is not in {E.coeff}")
        lhs = ab + E.sigma(_add(a, b), c)
        rhs = E.sigma(b, c) + E.sigma(a, _add(b, c))
        if (lhs - rhs) % 1:
            raise ExtensionMismatch(f"cocycle identity fails at {a}, {b}, {c}")


@dataclass(frozen=True)
class ExtElement:
    ext: Extension
    coeff: CoeffElem
    point: Vector

    def __mul__(self, other: "ExtElement") -> "ExtElement":
        return ext_mul(self, other)

    def __eq__(self, other) -> bool:
        return (isinstance(other, ExtElement) and self.ext is other.ext
                and self.coeff == other.coeff and self.point == other.point)

    def __hash__(self):
        return hash((id(self.ext), self.coeff, self.point))

    def inv(self) -> "ExtElement":
        return ext_inv(self)

    def to_json(self) -> dict:
        return {"coeff": str(self.coeff.value), "point": list(self.point)}


def _same(x: ExtElement, y: ExtElement) -> None:
    if x.ext is not y.ext:
        raise ExtensionMismatch("elements live in different extensions")


def ext_mul(x: ExtElement, y: ExtElement) -> ExtElement:
    _same(x, y)
    E = x.ext
    c = x.coeff.value + y.coeff.value + E.sigma(x.point, y.point)
    return ExtElement(E, E.coeff.elem(c), _add(x.point, y.point))


def ext_inv(x: ExtElement) -> ExtElement:
    E = x.ext
    c = -x.coeff.value - E.sigma(x.point, _neg(x.point))
    return ExtElement(E, E.coeff.elem(c), _neg(x.point))


def ext_pow(x: ExtElement, k: int) -> ExtElement:
    out = x.ext.identity()
    base = x if k >= 0 else ext_inv(x)
    for _ in range(abs(k)):
        out = ext_mul(out, base)
    return out


def ext_commutator(x: ExtElement, y: ExtElement) -> CoeffElem:
    """x y x^-1 y^-1, which is central."""
    _same(x, y)
    c = ext_mul(ext_mul(ext_mul(x, y), ext_inv(x)), ext_inv(y))
    return c.coeff


def ext_prod(elems: Sequence[ExtElement], E: Extension) -> ExtElement:
    out = E.identity()
    for e in elems:
        out = ext_mul(out, e)
    return out


def commutator_matches(E: Extension, Q: QuadraticForm, points: Iterable[Vector]) -> bool:
    pts = list(points)
    for a in pts:
        for b in pts:
            if E.commutator_value(a, b) != (HALF * eval_B(Q, a, b)) % 1:
                return False
    return True


# ----------------------------------------------------------------------------
# constructors
# ----------------------------------------------------------------------------

def standard_extension(Q: QuadraticForm, coeff: CoeffGroup) -> Extension:
    needs_sign = any(Q.offdiag[i][j] % 2 for i in range(Q.rank) for j in range(i + 1, Q.rank))
    if needs_sign and not coeff.has_minus_one():
        raise CoeffMismatch(f"{coeff} has no -1")
    return Extension(Q.lattice, coeff, StandardFromQ(Q), "E_Q")


def trivial_extension(rank: int, coeff: CoeffGroup) -> Extension:
    return Extension(Lattice(rank), coeff, TrivialCocycle(), "split")


def random_table_extension(rank: int, coeff: CoeffGroup, rng: random.Random,
                           window: int = DEFAULT_WINDOW) -> Extension:
    """Random bilinear cocycle twisted by a random coboundary on the grid."""
    n = coeff.order or 24

    def r():
        return Fraction(rng.randrange(n), n)

    bil = tuple(tuple(r() for _ in range(rank)) for _ in range(rank))
    phi = tuple((p, r()) for p in full_grid(rank, window) if any(p))
    return Extension(Lattice(rank), coeff, ExplicitTable(bil, phi), "table")


# ----------------------------------------------------------------------------
# Baer sum, pushout, pullback
# ----------------------------------------------------------------------------

def _fiber_product_section_product(exts: Sequence[Extension], y1: Vector, y2: Vector) -> Fraction:
    """Multiply the sections (1,...,1; y) in the fiber product, then project by sum."""
    comps = [e.lift(y1) * e.lift(y2) for e in exts]
    return sum((c.coeff.value for c in comps), Fraction(0))


def baer_sum(E1: Extension, E2: Extension) -> Extension:
    if E1.lattice != E2.lattice:
        raise DimensionMismatch("Baer sum needs a common lattice")
    if E1.coeff != E2.coeff:
        raise CoeffMismatch(f"{E1.coeff} vs {E2.coeff}")
    fn = lambda a, b: _fiber_product_section_product((E1, E2), a, b)
    return Extension(E1.lattice, E1.coeff, DerivedCocycle(fn, "baer"), f"({E1.label}+{E2.label})")


def baer_sum_n(E: Extension, n: int) -> Extension:
    """n-fold Baer sum; the empty sum is the split extension."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return Extension(E.lattice, E.coeff, TrivialCocycle(), "split")
    if n == 1:
        return E
    exts = (E,) * n
    fn = lambda a, b: _fiber_product_section_product(exts, a, b)
    return Extension(E.lattice, E.coeff, DerivedCocycle(fn, f"baer^{n}"), f"{n}*{E.label}")


def pushout_m(E: Extension, m: int) -> Extension:
    """Push out along the m-th power map of the coefficients."""
    if m == 1:
        return E
    if m == 0:
        return Extension(E.lattice, E.coeff, TrivialCocycle(), "split")

    def fn(a, b):
        prod = E.lift(a) * E.lift(b)
        return (prod.coeff ** m).value

    return Extension(E.lattice, E.coeff, DerivedCocycle(fn, f"push^{m}"), f"[{m}]_*{E.label}")


def pushout_elem(x: ExtElement, F: Extension, m: int) -> ExtElement:
    """Image of x under E -> [m]_* E (sections go to sections)."""
    return F.elem((x.coeff ** m).value, x.point)


def pullback_ext(E: Extension, h: LatticeHom) -> Extension:
    if h.target.rank != E.rank:
        raise DimensionMismatch("map does not land in the extension's lattice")
    fn = lambda a, b: E.sigma(h(a), h(b))
    return Extension(h.source, E.coeff, DerivedCocycle(fn, "pullback"), f"h^*{E.label}")


def cocycle_tables_equal(E1: Extension, E2: Extension, points: Iterable[Vector]) -> bool:
    pts = list(points)
    return all(E1.sigma(a, b) == E2.sigma(a, b) for a in pts for b in pts)


# ----------------------------------------------------------------------------
# pr_* and the mul map
# ----------------------------------------------------------------------------

def pr_star(E1: Extension, E2: Extension) -> Extension:
    """Pushout of E1 x E2 along the product of coefficients, over Y1 + Y2."""
    if E1.coeff != E2.coeff:
        raise CoeffMismatch(f"{E1.coeff} vs {E2.coeff}")
    ext = Extension(Lattice(E1.rank + E2.rank), E1.coeff,
                    BlockSum(E1.cocycle, E2.cocycle, E1.rank), f"pr*({E1.label},{E2.label})")
    object.__setattr__(ext, "parents", (E1, E2))
    return ext


def pr_star_many(exts: Sequence[Extension]) -> Extension:
    """Iterated pr_* of several extensions, as one extension over the direct sum."""
    G = exts[0].coeff
    if any(e.coeff != G for e in exts):
        raise CoeffMismatch("coefficient groups differ")
    ext = Extension(Lattice(sum(e.rank for e in exts)), G,
                    Blocks(tuple((e.cocycle, e.rank) for e in exts)), f"pr*^{len(exts)}")
    object.__setattr__(ext, "parents", tuple(exts))
    return ext


@dataclass(frozen=True)
class PrStarElement:
    """Class of (x, e1, e2); ``coeff`` is the canonical x c1 c2.

    When both parents are the same extension the mul value is
    coeff * sigma(y1, y2), and (mul value, y1, y2) determines the class.
    """

    parents: Tuple[Extension, Extension]
    coeff: CoeffElem
    points: Tuple[Vector, Vector]

    def __eq__(self, other) -> bool:
        return (isinstance(other, PrStarElement)
                and self.parents[0] is other.parents[0] and self.parents[1] is other.parents[1]
                and self.coeff == other.coeff and self.points == other.points)

    def __hash__(self):
        return hash((self.coeff, self.points))

    def __mul__(self, other: "PrStarElement") -> "PrStarElement":
        E1, E2 = self.parents
        c = (self.coeff.value + other.coeff.value
             + E1.sigma(self.points[0], other.points[0])
             + E2.sigma(self.points[1], other.points[1]))
        return PrStarElement(self.parents, self.coeff.group.elem(c),
                             (_add(self.points[0], other.points[0]),
                              _add(self.points[1], other.points[1])))

    @property
    def mul_value(self) -> CoeffElem:
        E1, E2 = self.parents
        if E1 is not E2:
            raise ParentsDiffer("mul needs equal parents")
        return self.coeff * E1.coeff.elem(E1.sigma(*self.points))

    def as_ext_element(self, pr_ext: Extension) -> ExtElement:
        return pr_ext.elem(self.coeff.value, self.points[0] + self.points[1])


def pr_element(x: CoeffElem, e1: ExtElement, e2: ExtElement) -> PrStarElement:
    if not (x.group == e1.ext.coeff == e2.ext.coeff):
        raise CoeffMismatch("coefficient groups differ")
    return PrStarElement((e1.ext, e2.ext), x * e1.coeff * e2.coeff, (e1.point, e2.point))


def pr_from_ext(p: ExtElement, E1: Extension, E2: Extension) -> PrStarElement:
    r = E1.rank
    return PrStarElement((E1, E2), p.coeff, (p.point[:r], p.point[r:]))


def mul_map(p: PrStarElement) -> ExtElement:
    """(x, e1, e2) -> x e1 e2 in E."""
    E1, E2 = p.parents
    if E1 is not E2:
        raise ParentsDiffer("mul needs equal parents")
    return E1.elem(p.mul_value, _add(*p.points))


# ----------------------------------------------------------------------------
# SO-odd twisted product
# ----------------------------------------------------------------------------

def twisted_product_ext(E1: Extension, E2: Extension, Q_square: QuadraticForm) -> Extension:
    if E1.coeff != E2.coeff:
        raise CoeffMismatch(f"{E1.coeff} vs {E2.coeff}")
    r = E1.rank + E2.rank + 1
    if Q_square.rank != r:
        raise DimensionMismatch("Q_square must live on Y1 + Y2 + Z")
    coc = TwistedProduct(E1.cocycle, E2.cocycle, E1.rank, E2.rank, Q_square)
    ext = Extension(Lattice(r), E1.coeff, coc, "twisted")
    object.__setattr__(ext, "parents", (E1, E2))
    return ext


# ----------------------------------------------------------------------------
# isomorphism testing
# ----------------------------------------------------------------------------

def monomial_coefficient(E: Extension, y: Sequence[int]) -> Fraction:
    """b with e_1^{y_1} ... e_r^{y_r} = (b, y), e_i the trivial lifts of the basis."""
    acc = E.identity()
    r = E.rank
    for i, k in enumerate(y):
        if k:
            ei = [0] * r
            ei[i] = 1
            acc = acc * ext_pow(E.lift(ei), k)
    return acc.coeff.value


@dataclass(frozen=True)
class IsoWitness:
    """phi(c, y) = (c + beta(y) + chi(y), y) from E to E'."""

    source: Extension
    target: Extension
    chi: Character

    def beta(self, y: Sequence[int]) -> Fraction:
        return (monomial_coefficient(self.target, y) - monomial_coefficient(self.source, y)) % 1

    def apply(self, x: ExtElement) -> ExtElement:
        return self.target.elem(x.coeff.value + self.beta(x.point) + self.chi(x.point).value, x.point)

    def verify(self, f_values: Sequence[ExtElement], f2_values: Sequence[ExtElement],
               points: Iterable[Vector]) -> bool:
        for a, b in zip(f_values, f2_values):
            if self.apply(a) != b:
                return False
        pts = list(points)
        for a in pts:
            for b in pts:
                lhs = self.apply(self.source.lift(a)) * self.apply(self.source.lift(b))
                if lhs != self.apply(self.source.lift(a) * self.source.lift(b)):
                    return False
        return True


def complete_sublattice(sub: LatticeHom) -> Tuple[LatticeHom, int]:
    """Append standard basis vectors until the image has full rank."""
    cols = list(sub.images())
    base = len(cols)
    r = sub.target.rank

    def rk(cs):
        return matrix_rank(tuple(zip(*cs))) if cs else 0

    cur = rk(cols)
    for i in range(r):
        if cur >= r:
            break
        e = tuple(1 if j == i else 0 for j in range(r))
        if rk(cols + [e]) > cur:
            cols.append(e)
            cur += 1
    return LatticeHom.from_images(cols, r), len(cols) - base


def iso_extensions(E: Extension, E2: Extension, f_values: Sequence[ExtElement],
                   f2_values: Sequence[ExtElement], sc_incl: LatticeHom,
                   window: int = 1) -> Optional[IsoWitness]:
    """An isomorphism E -> E2 carrying each f value to the matching f2 value, or None."""
    if E.lattice != E2.lattice or E.coeff != E2.coeff:
        return None
    r = E.rank
    basis = [tuple(1 if i == j else 0 for j in range(r)) for i in range(r)]
    for i in range(r):
        for j in range(i + 1, r):
            if E.commutator_value(basis[i], basis[j]) != E2.commutator_value(basis[i], basis[j]):
                return None
    G = E.coeff
    probe = IsoWitness(E, E2, Character(E.lattice, G, tuple(G.one() for _ in range(r))))
    targets = []
    for a, b in zip(f_values, f2_values):
        if a.point != b.point:
            return None
        targets.append(G.elem(b.coeff.value - a.coeff.value - probe.beta(a.point)))
    full, extra = complete_sublattice(sc_incl)
    vals = tuple(targets) + tuple(G.one() for _ in range(extra))
    chi = extend_character(full, Character(full.source, G, vals), E.lattice)
    if chi is None:
        return None
    w = IsoWitness(E, E2, chi)
    pts = basis_grid(r, window)
    if not w.verify(f_values, f2_values, pts):
        raise AssertionError("iso witness failed its own verification")
    return w
