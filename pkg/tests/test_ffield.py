from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from artifact.ffield import GF, factor_prime_power

FIELDS = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 49]


def test_factor():
    assert factor_prime_power(9) == (3, 2)
    assert factor_prime_power(7) == (7, 1)
    with pytest.raises(ValueError):
        factor_prime_power(12)


def test_generators():
    assert GF(5).generator == 2
    assert GF(7).generator == 3
    F9 = GF(9)
    x = 3  # the class of x in F_3[x]/(x^2 + 2x + 2)
    assert F9.generator == x
    # x^2 = -2x - 2 = x + 1
    assert F9.mul(x, x) == F9.add(x, 1)


@pytest.mark.parametrize("q", FIELDS)
def test_field_axioms(q):
    F = GF(q)
    els = list(F.elements())
    assert sorted(F.pow(F.generator, k) for k in range(q - 1)) == els[1:]
    for a in els:
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
            assert F.pow(F.generator, F.log(a)) == a


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(FIELDS), st.data())
def test_distributive(q, data):
    F = GF(q)
    a, b, c = (data.draw(st.integers(0, q - 1)) for _ in range(3))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
