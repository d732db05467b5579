"""Small finite fields GF(p^r) with log tables.

Elements are ints 0..q-1 encoding coefficient vectors base p (low degree first).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Sequence, Tuple

# Conway polynomials, low degree first, monic leading term omitted
CONWAY = {
    (2, 2): (1, 1),
    (2, 3): (1, 1, 0),
    (2, 4): (1, 1, 0, 0),
    (3, 2): (2, 2),
    (3, 3): (1, 2, 0),
    (5, 2): (2, 4),
    (7, 2): (3, 6),
}


def factor_prime_power(q: int) -> Tuple[int, int]:
    if q < 2:
        raise ValueError("q must be at least 2")
    p = next(d for d in itertools.count(2) if q % d == 0)
    r = 0
    while q % p == 0:
        q //= p
        r += 1
    if q != 1:
        raise ValueError("q is not a prime power")
    return p, r


@dataclass(frozen=True)
class GF:
    q: int
    p: int = field(init=False)
    r: int = field(init=False)

    def __post_init__(self):
        p, r = factor_prime_power(self.q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "r", r)
        exp, log = _tables(self.q)
        object.__setattr__(self, "_exp", exp)
        object.__setattr__(self, "_log", log)

    def __repr__(self) -> str:
        return f"GF({self.q})"

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    @property
    def generator(self) -> int:
        return self._exp[1] if self.q > 2 else 1

    def elements(self) -> range:
        return range(self.q)

    def from_int(self, n: int) -> int:
        return n % self.p

    def _digits(self, a: int) -> List[int]:
        return [(a // self.p ** i) % self.p for i in range(self.r)]

    def _undigits(self, ds: Sequence[int]) -> int:
        return sum((d % self.p) * self.p ** i for i, d in enumerate(ds))

    def add(self, a: int, b: int) -> int:
        if self.r == 1:
            return (a + b) % self.p
        return self._undigits([x + y for x, y in zip(self._digits(a), self._digits(b))])

    def neg(self, a: int) -> int:
        if self.r == 1:
            return (-a) % self.p
        return self._undigits([-x for x in self._digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.r == 1:
            return (a * b) % self.p
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.r == 1:
            return pow(a, -1, self.p)
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k < 0:
                raise ZeroDivisionError("negative power of zero")
            return 1 if k == 0 else 0
        return self._exp[(self._log[a] * k) % (self.q - 1)]

    def log(self, a: int) -> int:
        """Discrete log to the base ``generator``."""
        if a == 0:
            raise ValueError("log of zero")
        return self._log[a]


def _poly_mulx(a: List[int], modpoly: Sequence[int], p: int) -> List[int]:
    """Multiply by x modulo x^r + sum modpoly_i x^i."""
    r = len(modpoly)
    top = a[-1]
    out = [0] + a[:-1]
    return [(o - top * m) % p for o, m in zip(out, modpoly)] if top else out


@lru_cache(maxsize=None)
def _tables(q: int):
    p, r = factor_prime_power(q)
    if r == 1:
        g = next(x for x in range(1, p) if _is_primitive_root(x, p)) if p > 2 else 1
        exp = [pow(g, k, p) for k in range(p - 1)]
        log = {v: k for k, v in enumerate(exp)}
        return exp, log
    modpoly = CONWAY.get((p, r)) or _find_primitive_poly(p, r)
    exp = []
    cur = [1] + [0] * (r - 1)
    for _ in range(q - 1):
        exp.append(sum(c * p ** i for i, c in enumerate(cur)))
        cur = _poly_mulx(cur, modpoly, p)
    if len(set(exp)) != q - 1:
        raise ValueError(f"modulus for GF({q}) is not primitive")
    log = {v: k for k, v in enumerate(exp)}
    return exp, log


def _is_primitive_root(g: int, p: int) -> bool:
    n = p - 1
    return all(pow(g, n // f, p) != 1 for f in _prime_factors(n))


def _prime_factors(n: int) -> List[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _find_primitive_poly(p: int, r: int) -> Tuple[int, ...]:
    q = p ** r
    for coeffs in itertools.product(range(p), repeat=r):
        if coeffs[0] == 0:
            continue
        cur = [1] + [0] * (r - 1)
        seen = set()
        ok = True
        for _ in range(q - 1):
            key = tuple(cur)
            if key in seen:
                ok = False
                break
            seen.add(key)
            cur = _poly_mulx(cur, coeffs, p)
        if ok and len(seen) == q - 1:
            return tuple(coeffs)
    raise ValueError(f"no primitive polynomial for GF({q})")
