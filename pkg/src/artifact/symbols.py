"""Laurent series, residue symbols, tame Hilbert symbols and torus covers."""
from __future__ import annotations

import os
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Sequence, Tuple, Union

from .errors import (DimensionMismatch, FieldMismatch, InsufficientPrecision, InvalidField,
                     ZeroInput)
from .ffield import GF, factor_prime_power
from .qforms import QuadraticForm

DEFAULT_PRECISION = 12
PADIC_PRECISION = 8


def working_precision() -> int:
    env = os.environ.get("BDCOVER_PRECISION")
    if env:
        v = int(env)
        if v < 1:
            raise ValueError("BDCOVER_PRECISION must be positive")
        return v
    return DEFAULT_PRECISION


class RationalField:
    """Q with the same interface as ``GF``."""

    zero = Fraction(0)
    one = Fraction(1)

    def __repr__(self) -> str:
        return "QQ"

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("QQ")

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    def div(self, a, b):
        return Fraction(a) / b

    def pow(self, a, k: int):
        return Fraction(a) ** k


QQ = RationalField()
BaseField = Union[RationalField, GF]


# ----------------------------------------------------------------------------
# Laurent series
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class LaurentSeries:
    """sum_{i} coeffs[i] tau^(valuation+i) + O(tau^(valuation+len(coeffs))).

    A series with no coefficients is a zero: ``exact`` marks the true zero,
    otherwise it is zero only up to the tracked absolute precision.
    """

    base: Any
    valuation: int
    coeffs: Tuple[Any, ...]
    exact: bool = False

    @classmethod
    def make(cls, base: BaseField, valuation: int, coeffs: Sequence,
             precision: Optional[int] = None) -> "LaurentSeries":
        prec = working_precision() if precision is None else precision
        cs = [_coerce(base, c) for c in coeffs]
        cs += [base.zero] * (prec - len(cs))
        return _normalize(base, valuation, cs)

    @classmethod
    def zero(cls, base: BaseField) -> "LaurentSeries":
        return cls(base, 0, (), exact=True)

    @classmethod
    def constant(cls, base: BaseField, c, precision: Optional[int] = None) -> "LaurentSeries":
        return cls.make(base, 0, [c], precision)

    @classmethod
    def tau(cls, base: BaseField, precision: Optional[int] = None) -> "LaurentSeries":
        return cls.make(base, 1, [1], precision)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def abs_precision(self) -> float:
        return float("inf") if self.exact else self.valuation + len(self.coeffs)

    @property
    def leading(self):
        if self.is_zero:
            raise ZeroInput("zero series has no leading coefficient")
        return self.coeffs[0]

    def coefficient(self, i: int):
        if i < self.valuation:
            return self.base.zero
        if i >= self.abs_precision:
            raise InsufficientPrecision(f"coefficient of tau^{i} is beyond the working precision")
        return self.coeffs[i - self.valuation] if not self.is_zero else self.base.zero

    def constant_term(self):
        return self.coefficient(0)

    def _check(self, other: "LaurentSeries"):
        if self.base != other.base:
            raise FieldMismatch("series over different base fields")

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        self._check(other)
        if self.exact:
            return other
        if other.exact:
            return self
        F = self.base
        top = int(min(self.abs_precision, other.abs_precision))
        lo = min(self.valuation if self.coeffs else top, other.valuation if other.coeffs else top)
        cs = [F.add(self._c(i), other._c(i)) for i in range(lo, top)]
        return _normalize(F, lo, cs)

    def _c(self, i: int):
        j = i - self.valuation
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else self.base.zero

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries(self.base, self.valuation, tuple(self.base.neg(c) for c in self.coeffs),
                             self.exact)

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self + (-other)

    def __mul__(self, other: "LaurentSeries") -> "LaurentSeries":
        self._check(other)
        F = self.base
        if self.exact or other.exact:
            return LaurentSeries.zero(F)
        v = self.valuation + other.valuation
        if self.is_zero or other.is_zero:
            # only the absolute precision survives
            rel = len(other.coeffs) if self.is_zero else len(self.coeffs)
            return LaurentSeries(F, v + rel, ())
        m = min(len(self.coeffs), len(other.coeffs))
        cs = []
        for k in range(m):
            acc = F.zero
            for i in range(k + 1):
                acc = F.add(acc, F.mul(self.coeffs[i], other.coeffs[k - i]))
            cs.append(acc)
        return _normalize(F, v, cs)

    def inverse(self) -> "LaurentSeries":
        F = self.base
        if self.exact:
            raise ZeroInput("inverse of zero")
        if self.is_zero:
            raise InsufficientPrecision("series vanishes to working precision")
        a = self.coeffs
        m = len(a)
        a0inv = F.inv(a[0])
        b = [a0inv]
        for k in range(1, m):
            acc = F.zero
            for i in range(1, k + 1):
                acc = F.add(acc, F.mul(a[i], b[k - i]))
            b.append(F.neg(F.mul(acc, a0inv)))
        return _normalize(F, -self.valuation, b)

    def __truediv__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self * other.inverse()

    def __pow__(self, k: int) -> "LaurentSeries":
        if k < 0:
            return self.inverse() ** (-k)
        out = LaurentSeries.make(self.base, 0, [1], max(len(self.coeffs), 1))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def one_minus(self) -> "LaurentSeries":
        if self.exact:
            return LaurentSeries.make(self.base, 0, [1])
        one = LaurentSeries.make(self.base, 0, [1], max(int(self.abs_precision), 1))
        return one - self

    def to_json(self) -> dict:
        return {"valuation": self.valuation, "coeffs": [str(c) for c in self.coeffs]}


def _coerce(base: BaseField, c):
    if isinstance(base, RationalField):
        return Fraction(c)
    return int(c) % base.q if base.r == 1 else int(c)


def _normalize(base: BaseField, v: int, cs: Sequence) -> LaurentSeries:
    i = 0
    while i < len(cs) and cs[i] == base.zero:
        i += 1
    return LaurentSeries(base, v + i, tuple(cs[i:]))


def residue_symbol(f: LaurentSeries, g: LaurentSeries):
    """(-1)^{v(f)v(g)} (f^{v(g)} / g^{v(f)})(0), evaluated on the series."""
    for s in (f, g):
        if s.exact:
            raise ZeroInput("residue symbol of zero")
        if s.is_zero:
            raise InsufficientPrecision("series vanishes to working precision")
    F = f.base
    vf, vg = f.valuation, g.valuation
    h = (f ** vg) * (g ** (-vf))
    c = h.constant_term()
    return F.neg(c) if (vf * vg) % 2 else c


# ----------------------------------------------------------------------------
# p-adic numbers
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class PAdic:
    """p^v * u with u a unit known modulo p^prec."""

    p: int
    v: int
    u: int
    prec: int = PADIC_PRECISION

    def __post_init__(self):
        if self.prec < 1:
            raise InsufficientPrecision("p-adic unit lost all precision")
        if self.u % self.p == 0:
            raise ValueError("unit part divisible by p")

    @classmethod
    def from_rational(cls, x, p: int, prec: int = PADIC_PRECISION) -> "PAdic":
        x = Fraction(x)
        if x == 0:
            raise ZeroInput("zero has no unit part")
        num, den, v = x.numerator, x.denominator, 0
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        mod = p ** prec
        return cls(p, v, num * pow(den, -1, mod) % mod, prec)

    @property
    def modulus(self) -> int:
        return self.p ** self.prec

    def residue(self) -> int:
        return self.u % self.p

    def _check(self, other: "PAdic"):
        if self.p != other.p:
            raise FieldMismatch("p-adic numbers for different primes")

    def __mul__(self, other: "PAdic") -> "PAdic":
        self._check(other)
        prec = min(self.prec, other.prec)
        return PAdic(self.p, self.v + other.v, self.u * other.u % self.p ** prec, prec)

    def inverse(self) -> "PAdic":
        return PAdic(self.p, -self.v, pow(self.u, -1, self.modulus), self.prec)

    def __truediv__(self, other: "PAdic") -> "PAdic":
        return self * other.inverse()

    def __pow__(self, k: int) -> "PAdic":
        if k < 0:
            return self.inverse() ** (-k)
        return PAdic(self.p, self.v * k, pow(self.u, k, self.modulus), self.prec)

    def __add__(self, other: "PAdic") -> "PAdic":
        self._check(other)
        p = self.p
        v = min(self.v, other.v)
        # absolute precision of each term is v_i + prec_i
        top = min(self.v + self.prec, other.v + other.prec)
        s = self.u * p ** (self.v - v) + other.u * p ** (other.v - v)
        if s % p ** (top - v) == 0:
            raise InsufficientPrecision("sum vanishes to working precision")
        shift = 0
        while s % p == 0:
            s //= p
            shift += 1
        prec = top - v - shift
        return PAdic(p, v + shift, s % p ** prec, prec)

    def __neg__(self) -> "PAdic":
        return PAdic(self.p, self.v, (-self.u) % self.modulus, self.prec)

    def __sub__(self, other: "PAdic") -> "PAdic":
        return self + (-other)

    def one_minus(self) -> "PAdic":
        return PAdic(self.p, 0, 1, self.prec + max(self.v, 0)) - self

    def to_json(self) -> dict:
        return {"p": self.p, "v": self.v, "u": self.u, "prec": self.prec}


# ----------------------------------------------------------------------------
# tame local fields
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class RootOfUnityIndex:
    """zeta_n^idx for a fixed generator zeta_n of mu_n."""

    n: int
    idx: int

    def __post_init__(self):
        object.__setattr__(self, "idx", self.idx % self.n)

    def __mul__(self, other: "RootOfUnityIndex") -> "RootOfUnityIndex":
        if self.n != other.n:
            raise FieldMismatch("roots of unity of different orders")
        return RootOfUnityIndex(self.n, self.idx + other.idx)

    def __pow__(self, k: int) -> "RootOfUnityIndex":
        return RootOfUnityIndex(self.n, self.idx * k)

    def inv(self) -> "RootOfUnityIndex":
        return RootOfUnityIndex(self.n, -self.idx)

    def is_one(self) -> bool:
        return self.idx == 0


@dataclass(frozen=True)
class TameLocalField:
    kind: str  # "padic" or "laurent"
    q: int
    n: int

    def __post_init__(self):
        if self.kind not in ("padic", "laurent"):
            raise InvalidField(f"unknown field kind {self.kind!r}")
        try:
            p, r = factor_prime_power(self.q)
        except ValueError as e:
            raise InvalidField(str(e)) from None
        if self.kind == "padic" and (r != 1 or p == 2):
            raise InvalidField("p-adic fields need an odd prime p")
        if self.n < 1 or (self.q - 1) % self.n:
            raise InvalidField(f"n={self.n} does not divide q-1={self.q - 1}")

    @property
    def p(self) -> int:
        return factor_prime_power(self.q)[0]

    @property
    def residue_field(self) -> GF:
        return GF(self.q)

    @classmethod
    def parse(cls, text: str, n: Optional[int] = None) -> "TameLocalField":
        """Parse "Qp:5,n:4" or "Fq:9,n:8"; ``n`` overrides or supplies the degree."""
        parts = dict(_kv(s) for s in text.split(",") if s.strip())
        if "Qp" in parts:
            kind, q = "padic", parts.pop("Qp")
        elif "Fq" in parts:
            kind, q = "laurent", parts.pop("Fq")
        else:
            raise InvalidField(f"cannot parse field descriptor {text!r}")
        deg = n if n is not None else parts.pop("n", None)
        if deg is None:
            raise InvalidField("cover degree n missing")
        return cls(kind, int(q), int(deg))

    def element(self, x) -> Union[PAdic, LaurentSeries]:
        """Coerce an int, Fraction, or string into the field."""
        if isinstance(x, (PAdic, LaurentSeries)):
            return x
        if self.kind == "padic":
            if isinstance(x, str):
                return parse_padic(x, self.p)
            return PAdic.from_rational(x, self.p)
        if isinstance(x, str):
            return parse_laurent(x, self.residue_field)
        return LaurentSeries.constant(self.residue_field, x)

    def descriptor(self) -> str:
        return f"{'Qp' if self.kind == 'padic' else 'Fq'}:{self.q},n:{self.n}"


def _kv(s: str) -> Tuple[str, str]:
    if ":" not in s:
        raise InvalidField(f"bad descriptor component {s!r}")
    k, v = s.split(":", 1)
    return k.strip(), v.strip()


_PADIC_RE = re.compile(r"^\s*(-?\d+(?:/\d+)?)\s*(?:\*\s*(\d+)\s*\^\s*(-?\d+))?\s*$")


def parse_padic(text: str, p: int) -> PAdic:
    """"u*p^v" or a plain rational."""
    m = _PADIC_RE.match(text)
    if not m:
        raise InvalidField(f"cannot parse p-adic element {text!r}")
    x = Fraction(m.group(1))
    if m.group(2):
        if int(m.group(2)) != p:
            raise FieldMismatch(f"element uses prime {m.group(2)}, field has {p}")
        x *= Fraction(p) ** int(m.group(3))
    return PAdic.from_rational(x, p)


def parse_laurent(text: str, F: GF) -> LaurentSeries:
    """"v:c0,c1,..." (coefficients from tau^v) or a single residue-field int."""
    if ":" in text:
        v, cs = text.split(":", 1)
        return LaurentSeries.make(F, int(v), [int(c) for c in cs.split(",")])
    return LaurentSeries.constant(F, int(text))


def _valuation(x) -> int:
    return x.v if isinstance(x, PAdic) else x.valuation


def _leading_residue(x, F: GF) -> int:
    if isinstance(x, PAdic):
        return x.residue()
    return x.leading


def tame_symbol(a, b, K: TameLocalField) -> int:
    """(-1)^{v(a)v(b)} a^{v(b)} / b^{v(a)} reduced to the residue field."""
    F = K.residue_field
    for x in (a, b):
        if isinstance(x, LaurentSeries) and x.exact:
            raise ZeroInput("symbol of zero")
        if isinstance(x, LaurentSeries) and x.is_zero:
            raise InsufficientPrecision("series vanishes to working precision")
    va, vb = _valuation(a), _valuation(b)
    ua, ub = _leading_residue(a, F), _leading_residue(b, F)
    t = F.div(F.pow(ua, vb), F.pow(ub, va))
    return F.neg(t) if (va * vb) % 2 else t


def tame_hilbert(a, b, K: TameLocalField) -> RootOfUnityIndex:
    """The n-th tame Hilbert symbol as an index in mu_n.

    mu_n is generated by g^{(q-1)/n} for the fixed generator g of F_q^x, so the
    index of t^{(q-1)/n} is log_g(t) mod n.
    """
    a, b = K.element(a), K.element(b)
    t = tame_symbol(a, b, K)
    return RootOfUnityIndex(K.n, K.residue_field.log(t))


# ----------------------------------------------------------------------------
# covers of split tori
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusCoverElement:
    field: TameLocalField
    zeta: RootOfUnityIndex
    torus_point: Tuple[Any, ...]

    def __post_init__(self):
        for x in self.torus_point:
            if isinstance(x, LaurentSeries) and x.is_zero:
                raise ZeroInput("torus coordinates must be nonzero")

    @classmethod
    def lift(cls, K: TameLocalField, point: Sequence) -> "TorusCoverElement":
        return cls(K, RootOfUnityIndex(K.n, 0), tuple(K.element(x) for x in point))

    @classmethod
    def identity(cls, K: TameLocalField, rank: int) -> "TorusCoverElement":
        return cls.lift(K, [1] * rank)

    def key(self):
        return (self.zeta.idx, tuple(_elem_key(x) for x in self.torus_point))


def _elem_key(x):
    if isinstance(x, PAdic):
        return ("p", x.v, x.u % x.p ** min(x.prec, PADIC_PRECISION // 2))
    return ("l", x.valuation, x.coeffs[: DEFAULT_PRECISION // 2])


def torus_cocycle(s: Sequence, t: Sequence, Q: QuadraticForm, K: TameLocalField) -> RootOfUnityIndex:
    """prod_i (s_i,t_i)^{Q(e_i)} prod_{i<j} (s_i,t_j)^{B(e_i,e_j)}."""
    out = RootOfUnityIndex(K.n, 0)
    r = Q.rank
    for i in range(r):
        if Q.diag[i]:
            out = out * tame_hilbert(s[i], t[i], K) ** Q.diag[i]
        for j in range(i + 1, r):
            bij = Q.b(i, j)
            if bij:
                out = out * tame_hilbert(s[i], t[j], K) ** bij
    return out


def torus_cover_mul(x: TorusCoverElement, y: TorusCoverElement, Q: QuadraticForm) -> TorusCoverElement:
    if x.field != y.field:
        raise FieldMismatch("torus elements over different fields")
    if len(x.torus_point) != Q.rank or len(y.torus_point) != Q.rank:
        raise DimensionMismatch("torus rank does not match the form")
    K = x.field
    z = x.zeta * y.zeta * torus_cocycle(x.torus_point, y.torus_point, Q, K)
    return TorusCoverElement(K, z, tuple(a * b for a, b in zip(x.torus_point, y.torus_point)))


def torus_cover_inv(x: TorusCoverElement, Q: QuadraticForm) -> TorusCoverElement:
    K = x.field
    s = x.torus_point
    sinv = tuple(a.inverse() for a in s)
    z = x.zeta.inv() * torus_cocycle(s, sinv, Q, K).inv()
    return TorusCoverElement(K, z, sinv)


def torus_commutator(x: TorusCoverElement, y: TorusCoverElement, Q: QuadraticForm) -> RootOfUnityIndex:
    """The central value of x y x^-1 y^-1."""
    c = torus_cover_mul(torus_cover_mul(x, y, Q), torus_cover_mul(torus_cover_inv(x, Q),
                                                                  torus_cover_inv(y, Q), Q), Q)
    # torus parts commute, so only check that they cancel at residue level
    return c.zeta


def basis_lift(K: TameLocalField, rank: int, i: int, u) -> TorusCoverElement:
    """Lift of e_i(u)."""
    pt = [1] * rank
    pt[i] = u
    return TorusCoverElement.lift(K, pt)


def expected_commutator(Q: QuadraticForm, i: int, j: int, u, v, K: TameLocalField) -> RootOfUnityIndex:
    return tame_hilbert(u, v, K) ** Q.b(i, j)


# ----------------------------------------------------------------------------
# sampling
# ----------------------------------------------------------------------------

def random_series(base: BaseField, rng, vmax: int = 2, terms: int = 4) -> LaurentSeries:
    """A nonzero series with valuation in [-vmax, vmax] and a few random terms."""
    if isinstance(base, RationalField):
        def coeff():
            return Fraction(rng.randint(-9, 9), rng.randint(1, 5))
    else:
        def coeff():
            return rng.randrange(base.q)
    lead = coeff()
    while lead == base.zero:
        lead = coeff()
    return LaurentSeries.make(base, rng.randint(-vmax, vmax), [lead] + [coeff() for _ in range(terms - 1)])


def random_element(K: TameLocalField, rng, vmax: int = 2) -> Union[PAdic, LaurentSeries]:
    if K.kind == "laurent":
        return random_series(K.residue_field, rng, vmax)
    p = K.p
    u = rng.randrange(1, p ** PADIC_PRECISION)
    while u % p == 0:
        u = rng.randrange(1, p ** PADIC_PRECISION)
    return PAdic(p, rng.randint(-vmax, vmax), u)


def random_steinberg_input(K: TameLocalField, rng, vmax: int = 2):
    """(a, 1 - a) for a random a, retrying the rare a that is 1 to working precision."""
    while True:
        a = random_element(K, rng, vmax)
        try:
            b = a.one_minus()
        except InsufficientPrecision:
            continue
        if not (isinstance(b, LaurentSeries) and b.is_zero):
            return a, b
