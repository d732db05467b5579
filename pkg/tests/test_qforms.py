from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from artifact.errors import NonDecomposable, ParityViolation
from artifact.lattice import LatticeHom
from artifact.qforms import (QuadraticForm, compute_nQ, direct_sum, eval_B, eval_Q,
                             invariant_form_space, is_decomposable, is_weyl_invariant,
                             pullback_form, weyl_invariant_form)
from artifact.roots import build_root_datum


def test_c2_a1():
    Q = weyl_invariant_form(build_root_datum("C", 2), 1)
    assert Q.diag == (1, 1) and Q.is_diagonal()
    assert eval_Q(Q, (1, -1)) == 2


def test_d3_a2():
    Q = weyl_invariant_form(build_root_datum("D", 3), 2)
    assert Q.diag == (1, 1, 1) and Q.is_diagonal()


def test_b2_odd_a_is_a_parity_violation():
    with pytest.raises(ParityViolation):
        weyl_invariant_form(build_root_datum("B", 2), 1)


def test_eval_examples():
    Q = QuadraticForm.diagonal([1, 1])
    assert eval_Q(Q, (1, -1)) == 2
    assert eval_B(Q, (1, 0), (0, 1)) == 0


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=3, max_size=3),
       st.lists(st.integers(-3, 3), min_size=3, max_size=3),
       st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_b_is_polarization(diag, y, z):
    Q = QuadraticForm.from_gram(diag, [[0, 1, -2], [1, 0, 3], [-2, 3, 0]])
    assert eval_B(Q, y, y) == 2 * eval_Q(Q, y)
    s = tuple(a + b for a, b in zip(y, z))
    assert eval_B(Q, y, z) == eval_Q(Q, s) - eval_Q(Q, y) - eval_Q(Q, z)
    assert eval_B(Q, y, z) == eval_B(Q, z, y)


def test_nq_arithmetic():
    C1 = build_root_datum("C", 2)
    Q = weyl_invariant_form(C1, 1)  # Q(e1 - e2) = 2
    assert compute_nQ(4, Q, C1) == 2
    assert compute_nQ(3, Q, C1) == 3


def test_nq_u1():
    # GL_1 / U_1 with a = 1: n / gcd(n, 2a)
    assert compute_nQ(4, QuadraticForm.diagonal([1])) == 2


def test_decomposable():
    assert is_decomposable(QuadraticForm.diagonal([1, 2, 3]), [[0], [1, 2]])
    A = build_root_datum("A", 1)
    Q = weyl_invariant_form(A, 1, q_offdiag=1, decomposable=False)
    assert not is_decomposable(Q, [[0], [1]])
    with pytest.raises(NonDecomposable):
        weyl_invariant_form(A, 1, q_offdiag=1)


def test_square_form_is_decomposable():
    Q = weyl_invariant_form(build_root_datum("C", 2), 1)
    Qsq = direct_sum(Q, Q)
    assert is_decomposable(Qsq, [[0, 1], [2, 3]])
    assert eval_B(Qsq, (1, 2, 0, 0), (0, 0, 3, -1)) == 0


def test_pullback_diagonal_doubles():
    Q = QuadraticForm.diagonal([1, 1])
    diag = LatticeHom.from_images([(1, 1)], 2)
    assert pullback_form(Q, diag).diag == (2,)


@pytest.mark.parametrize("fam,ranks,values", [
    ("A", (1, 2, 3), (1, 2, 3, 4)), ("C", (1, 2, 3, 4), (1, 2, 3, 4)),
    ("B", (2, 3, 4), (2, 4)), ("D", (2, 3, 4), (2, 4))])
def test_uniqueness_and_invariance(fam, ranks, values):
    for n in ranks:
        d = build_root_datum(fam, n)
        assert len(invariant_form_space(d)) == 1
        for a in values:
            assert is_weyl_invariant(weyl_invariant_form(d, a), d, full=True)


@pytest.mark.parametrize("fam,n", [("B", 2), ("B", 3), ("D", 2), ("D", 3), ("C", 2), ("A", 2)])
def test_parity_exhaustive(fam, n):
    d = build_root_datum(fam, n)
    for a in range(1, 7):
        odd_orth = fam in ("B", "D") and a % 2
        if odd_orth:
            with pytest.raises(ParityViolation):
                weyl_invariant_form(d, a)
        else:
            weyl_invariant_form(d, a)


def test_b1_needs_four():
    d = build_root_datum("B", 1)
    with pytest.raises(ParityViolation):
        weyl_invariant_form(d, 2)
    assert weyl_invariant_form(d, 4).diag == (1,)
