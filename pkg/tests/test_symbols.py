from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from artifact.errors import (DimensionMismatch, FieldMismatch, InsufficientPrecision,
                             InvalidField, ZeroInput)
from artifact.ffield import GF
from artifact.qforms import QuadraticForm
from artifact.symbols import (QQ, LaurentSeries, PAdic, TameLocalField, basis_lift,
                              expected_commutator, parse_padic, random_element, random_series,
                              random_steinberg_input, residue_symbol, tame_hilbert,
                              torus_commutator, torus_cover_inv, torus_cover_mul,
                              TorusCoverElement, working_precision)

Q5 = TameLocalField.parse("Qp:5,n:4")
FIELDS = ["Qp:5,n:4", "Fq:7,n:6", "Fq:9,n:8", "Qp:7,n:3", "Fq:5,n:2"]


def test_residue_examples():
    t = LaurentSeries.tau(QQ)
    assert residue_symbol(t, t) == -1
    assert residue_symbol(t, t.one_minus()) == 1
    u = LaurentSeries.make(QQ, 0, [3, 1, 4])
    v = LaurentSeries.make(QQ, 0, [Fraction(1, 2), 5])
    assert residue_symbol(u, v) == 1


def test_residue_zero_inputs():
    t = LaurentSeries.tau(QQ)
    with pytest.raises(ZeroInput):
        residue_symbol(LaurentSeries.zero(QQ), t)
    with pytest.raises(InsufficientPrecision):
        residue_symbol(t - t, t)


def test_residue_over_finite_field():
    F = GF(7)
    t = LaurentSeries.tau(F)
    assert residue_symbol(t, t) == 6
    assert residue_symbol(t * t, LaurentSeries.constant(F, 3)) == 4  # 1 / 3^2 = 1/2 = 4


def test_laurent_arithmetic():
    F = GF(9)
    f = LaurentSeries.make(F, -1, [1, 2, 3, 4])
    one = f * f.inverse()
    assert one.valuation == 0 and one.leading == 1 and all(c == 0 for c in one.coeffs[1:])
    assert (f ** 3) / f == f * f
    with pytest.raises(FieldMismatch):
        f + LaurentSeries.tau(GF(3))


def test_precision_env(monkeypatch):
    monkeypatch.setenv("BDCOVER_PRECISION", "5")
    assert working_precision() == 5
    assert len(LaurentSeries.make(QQ, 0, [1]).coeffs) == 5
    monkeypatch.setenv("BDCOVER_PRECISION", "0")
    with pytest.raises(ValueError):
        working_precision()


def test_hilbert_examples():
    assert tame_hilbert(5, 5, Q5).idx == 2
    assert tame_hilbert(2, 5, Q5).idx == 1
    assert tame_hilbert("2", "1*5^1", Q5).idx == 1


def test_padic_parse_and_arithmetic():
    x = parse_padic("3*5^2", 5)
    assert (x.v, x.residue()) == (2, 3)
    with pytest.raises(FieldMismatch):
        parse_padic("3*7^2", 5)
    a = PAdic.from_rational(Fraction(7, 3), 5)
    assert (a * a.inverse()).u == 1 and (a * a.inverse()).v == 0
    with pytest.raises(InsufficientPrecision):
        a - a


def test_invalid_fields():
    with pytest.raises(InvalidField):
        TameLocalField.parse("Qp:5,n:3")
    with pytest.raises(InvalidField):
        TameLocalField.parse("Zz:5,n:2")
    with pytest.raises(InvalidField):
        TameLocalField.parse("Qp:9,n:2")
    with pytest.raises(InvalidField):
        TameLocalField.parse("Fq:9")


@pytest.mark.parametrize("desc", FIELDS)
def test_steinberg_and_bimultiplicativity(desc):
    K = TameLocalField.parse(desc)
    rng = random.Random(desc)
    for _ in range(200):
        a, b = random_steinberg_input(K, rng)
        assert tame_hilbert(a, b, K).is_one()
        x, y, z = (random_element(K, rng) for _ in range(3))
        assert tame_hilbert(x * y, z, K) == tame_hilbert(x, z, K) * tame_hilbert(y, z, K)
        assert tame_hilbert(x, y * z, K) == tame_hilbert(x, y, K) * tame_hilbert(x, z, K)
        assert tame_hilbert(x, y, K) == tame_hilbert(y, x, K).inv()


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_residue_steinberg_rational(seed):
    f = random_series(QQ, random.Random(seed))
    assert residue_symbol(f, f.one_minus()) == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9), st.sampled_from([GF(7), GF(9)]))
def test_residue_steinberg_finite(seed, F):
    f = random_series(F, random.Random(seed))
    assert residue_symbol(f, f.one_minus()) == F.one


def test_torus_commutator_example():
    Q = QuadraticForm.from_gram([1, 1], [[0, 2], [2, 0]])
    x = basis_lift(Q5, 2, 0, 2)
    y = basis_lift(Q5, 2, 1, 5)
    assert torus_commutator(x, y, Q).idx == 2


def test_torus_split_form_commutes():
    Q = QuadraticForm.diagonal([1, 3])
    rng = random.Random(0)
    for _ in range(20):
        u, v = random_element(Q5, rng), random_element(Q5, rng)
        assert torus_commutator(basis_lift(Q5, 2, 0, u), basis_lift(Q5, 2, 1, v), Q).is_one()


def _random_form(rng, r):
    gram = [[0] * r for _ in range(r)]
    for i in range(r):
        for j in range(i + 1, r):
            gram[i][j] = gram[j][i] = rng.randint(-3, 3)
    return QuadraticForm.from_gram([rng.randint(-3, 3) for _ in range(r)], gram)


@pytest.mark.parametrize("desc", ["Qp:5,n:4", "Fq:9,n:8"])
def test_torus_commutator_all_pairs(desc):
    K = TameLocalField.parse(desc)
    rng = random.Random(7)
    for r in (1, 2, 3):
        Q = _random_form(rng, r)
        for i in range(r):
            for j in range(r):
                u, v = random_element(K, rng), random_element(K, rng)
                got = torus_commutator(basis_lift(K, r, i, u), basis_lift(K, r, j, v), Q)
                assert got == expected_commutator(Q, i, j, u, v, K)


def test_torus_group_laws():
    K = TameLocalField.parse("Fq:7,n:6")
    Q = _random_form(random.Random(1), 2)
    rng = random.Random(2)
    one = TorusCoverElement.identity(K, 2)
    for _ in range(30):
        x, y, z = (TorusCoverElement.lift(K, [random_element(K, rng) for _ in range(2)]) for _ in range(3))
        lhs = torus_cover_mul(torus_cover_mul(x, y, Q), z, Q)
        rhs = torus_cover_mul(x, torus_cover_mul(y, z, Q), Q)
        assert lhs.zeta == rhs.zeta
        assert torus_cover_mul(x, torus_cover_inv(x, Q), Q).zeta == one.zeta
    with pytest.raises(DimensionMismatch):
        torus_cover_mul(TorusCoverElement.identity(K, 3), TorusCoverElement.identity(K, 3), Q)
