from __future__ import annotations

import random

import numpy as np
import pytest

from artifact import kernels as K
from artifact.errors import (FieldMismatch, NotInGroup, NotUnipotentInFlag, ShapeMismatch,
                             TooLarge, UnsupportedFamily)
from artifact.geometry import (DoubledSpace, WhittakerPair, build_group, classify_subspace,
                               diagonal_lemma_check, enumerate_double_cosets,
                               enumerate_max_isotropic, geometric_tilde, group_order,
                               intersect, lagrangian_of, max_isotropic_count,
                               modular_character_check, omega1_exhaustive, omega_classify,
                               whittaker_pair_classify)


@pytest.mark.parametrize("fam,m,q,order", [
    ("C", 1, 2, 6), ("C", 1, 3, 24), ("B", 1, 3, 24), ("A", 1, 5, 4),
    ("C", 2, 2, 720), ("D", 2, 3, 576), ("A", 2, 3, 48), ("D", 1, 3, 2)])
def test_group_orders(fam, m, q, order):
    G = build_group(fam, m, q)
    assert group_order(fam, m, q) == order
    els = G.elements()
    assert len(els) == order
    assert all(G.contains(g) for g in els[:50])


def test_so3_f3_spinor_kernel():
    assert len(build_group("B", 1, 3, derived=True).elements()) == 12


def test_prime_only():
    with pytest.raises(FieldMismatch):
        build_group("C", 1, 4)
    with pytest.raises(UnsupportedFamily):
        build_group("E", 1, 3)


def test_iota_is_an_embedding():
    G = build_group("C", 1, 3)
    dbl = DoubledSpace(G.space, 2)
    assert np.array_equal(dbl.iota(G.identity(), G.identity()), np.eye(dbl.dim, dtype=np.int64))
    rng = random.Random(0)
    for _ in range(20):
        a, b, c, d = (G.random_element(rng) for _ in range(4))
        h1, h2 = dbl.iota(a, b), dbl.iota(c, d)
        assert dbl.space.preserves(h1)
        prod = dbl.iota(K.matmul(a, c, 3), K.matmul(b, d, 3))
        assert np.array_equal(K.matmul(h1, h2, 3), prod)


@pytest.mark.parametrize("q,count", [(2, 15), (3, 40)])
def test_lagrangian_counts(q, count):
    G = build_group("C", 1, q)
    dbl = DoubledSpace(G.space, 1)
    Ls = enumerate_max_isotropic(dbl)
    assert len(Ls) == count == max_isotropic_count(dbl.space) == (q + 1) * (q * q + 1)


def test_lagrangian_count_k2():
    dbl = DoubledSpace(build_group("C", 1, 2).space, 2)
    assert len(enumerate_max_isotropic(dbl)) == 2295 == 3 * 5 * 9 * 17


def test_max_states_guard():
    dbl = DoubledSpace(build_group("C", 1, 3).space, 2)
    with pytest.raises(TooLarge):
        enumerate_max_isotropic(dbl, max_states=100)


def test_psi_trivial_cases():
    G = build_group("C", 1, 3)
    d1 = DoubledSpace(G.space, 1)
    assert d1.n_bullet_basis == [] and d1.psi_argument(np.eye(d1.dim, dtype=np.int64)) == 0
    d2 = DoubledSpace(G.space, 2)
    assert d2.psi_argument(np.eye(d2.dim, dtype=np.int64)) == 0
    assert len(d2.n_bullet_basis) == 11


def test_psi_not_in_flag():
    d2 = DoubledSpace(build_group("C", 1, 3).space, 2)
    g = d2.iota(build_group("C", 1, 3).generators[0], np.eye(2, dtype=np.int64))
    with pytest.raises(NotUnipotentInFlag):
        d2.psi_argument(g)


def test_psi_trace_equals_dimension():
    """At q = 5 an element whose first block inverts A_1 has psi = dim W = 2."""
    p = 5
    G = build_group("C", 1, p)
    dbl = DoubledSpace(G.space, 2)
    d = dbl.d
    r0, c0 = dbl.block("+", 1) * d, dbl.block("+", 2) * d
    basis = dbl.n_bullet_basis
    target = (pow(2, -1, p) * np.eye(d, dtype=np.int64)).ravel() % p
    A = np.array([b[r0:r0 + d, c0:c0 + d].ravel() for b in basis]).T % p
    R, piv = K.rref(np.hstack([A, target[:, None]]), p)
    assert len(basis) not in piv  # solvable
    coef = np.zeros(len(basis), dtype=np.int64)
    for row, c in zip(R, piv):
        coef[c] = row[-1]
    X = sum(int(c) * b for c, b in zip(coef, basis)) % p
    half = pow(2, -1, p)
    I = np.eye(dbl.dim, dtype=np.int64)
    u = K.matmul((I + half * X) % p, K.inverse((I - half * X) % p, p), p)
    assert dbl.in_n_bullet(u)
    assert dbl.psi_argument(u) == d % p


def test_psi_is_a_character():
    p = 3
    dbl = DoubledSpace(build_group("C", 1, p).space, 2)
    gens = dbl.n_bullet_generators
    rng = random.Random(1)
    for _ in range(30):
        a, b = rng.choice(gens), rng.choice(gens)
        ab = K.matmul(a, b, p)
        assert dbl.psi_argument(ab) == (dbl.psi_argument(a) + dbl.psi_argument(b)) % p


def test_psi_vanishes_in_char_2():
    dbl = DoubledSpace(build_group("C", 1, 2).space, 2)
    assert not dbl.psi_vector.any()


def test_whittaker_examples():
    I = np.eye(1, dtype=np.int64)
    assert whittaker_pair_classify(WhittakerPair((1, 1), (I,), 3), 2, 1).label == "in_orbit_km"
    pair = WhittakerPair((1, 1, 1, 1), (I, I, I), 3)
    assert whittaker_pair_classify(pair, 2, 2).label == "higher"
    Z = np.zeros((1, 1), dtype=np.int64)
    res = whittaker_pair_classify(WhittakerPair((1, 1), (Z,), 3), 2, 1)
    assert res.label == "other" and res.stabilizer["rank"] == 0
    with pytest.raises(ShapeMismatch):
        WhittakerPair((1, 2), (I,), 3)


def test_omega_identity_is_tilde():
    for q in (2, 3):
        dbl = DoubledSpace(build_group("C", 1, q).space, 2)
        assert omega_classify(np.eye(dbl.dim, dtype=np.int64), dbl) == "tilde"


def test_k1_everything_tilde():
    dbl = DoubledSpace(build_group("C", 1, 3).space, 1)
    assert all(classify_subspace(L, dbl).label == "tilde" for L in enumerate_max_isotropic(dbl))


def test_omega_q3_sample():
    """At q = 3 the classification matches L cap Y_1 = 0 and both Omega_1 routes agree."""
    dbl = DoubledSpace(build_group("C", 1, 3).space, 2)
    Ls = enumerate_max_isotropic(dbl)
    rng = random.Random(4)
    from artifact.geometry import n_bullet_elements
    els = np.stack(n_bullet_elements(dbl))
    assert len(els) == 3 ** 11
    for L in rng.sample(Ls, 20):
        res = classify_subspace(L, dbl)
        assert (res.label == "tilde") == geometric_tilde(L, dbl)
        assert res.omega1 == omega1_exhaustive(L, dbl, els)


@pytest.mark.parametrize("q,sizes,stab", [(2, [6, 9], 6), (3, [24, 16], 24)])
def test_double_cosets_k1(q, sizes, stab):
    R = enumerate_double_cosets("C", 1, q, 1)
    assert [o.size for o in R.orbits] == sizes
    main = R.main_orbits()
    assert len(main) == 1 and main[0].contains_identity and main[0].stabilizer_order == stab
    assert main[0].stabilizer_is_diagonal
    assert all(o.n_minus for o in R.orbits if o.cls != "main")
    assert sum(o.size for o in R.orbits) == R.total == R.expected_total


def test_double_cosets_parallel_is_deterministic():
    a = enumerate_double_cosets("C", 1, 3, 1).to_json()
    b = enumerate_double_cosets("C", 1, 3, 1, jobs=4).to_json()
    assert a == b


def test_double_cosets_so3():
    R = enumerate_double_cosets("B", 1, 3, 1)
    assert len(R.main_orbits()) == 1
    assert sum(o.size for o in R.orbits) == R.expected_total


def test_gl_doubling_unsupported():
    with pytest.raises(UnsupportedFamily):
        enumerate_double_cosets("A", 1, 3, 1)


@pytest.mark.parametrize("q", [2, 3])
def test_diagonal_lemma(q):
    ok, count = diagonal_lemma_check(build_group("C", 1, q), 2)
    assert ok and count == group_order("C", 1, q)


def test_modular_character():
    G = build_group("C", 1, 3)
    dbl = DoubledSpace(G.space, 2)
    I = G.identity()
    assert modular_character_check(I, I, dbl, G) == 1
    rng = random.Random(9)
    assert {modular_character_check(G.random_element(rng), G.random_element(rng), dbl, G)
            for _ in range(100)} == {1}
    assert modular_character_check(G.generators[0], I, DoubledSpace(G.space, 1), G) == 1
    with pytest.raises(NotInGroup):
        modular_character_check(np.array([[1, 1], [0, 2]]), I, dbl, G)


def test_lagrangian_of_identity():
    dbl = DoubledSpace(build_group("C", 1, 3).space, 2)
    L = lagrangian_of(np.eye(dbl.dim, dtype=np.int64), dbl)
    assert np.array_equal(L, dbl.delta_k())
    assert intersect(L, dbl.flag().subspaces[-1], 3).shape[0] == 0
