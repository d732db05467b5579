from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from artifact.errors import DimensionMismatch, IndexInfinite, NonInjective
from artifact.lattice import (INFINITE_INDEX, Character, Lattice, LatticeHom, MuN, QmodZ, UnitsFq,
                              det, extend_character, identity, matmul, smith_normal_form,
                              sublattice_index)
from artifact.roots import build_root_datum


def _diag(D):
    return [D[i][i] for i in range(min(len(D), len(D[0])))]


def test_snf_hand_example():
    U, D, V = smith_normal_form(((2, 4), (6, 8)))
    assert _diag(D) == [2, 4]
    assert matmul(matmul(U, ((2, 4), (6, 8))), V) == D


def test_snf_trivial_cases():
    assert smith_normal_form(identity(3))[1] == identity(3)
    assert smith_normal_form(((0,),))[1] == ((0,),)


int_mats = st.integers(1, 4).flatmap(lambda m: st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=m, max_size=m)))


@settings(max_examples=150, deadline=None)
@given(int_mats)
def test_snf_properties(M):
    M = tuple(tuple(r) for r in M)
    U, D, V = smith_normal_form(M)
    assert matmul(matmul(U, M), V) == D
    assert abs(det(U)) == 1 and abs(det(V)) == 1
    d = _diag(D)
    for i in range(len(D)):
        for j in range(len(D[0])):
            if i != j:
                assert D[i][j] == 0
    assert all(x >= 0 for x in d)
    for a, b in zip(d, d[1:]):
        assert (b == 0) if a == 0 else b % a == 0


def test_sublattice_index():
    assert sublattice_index(LatticeHom.from_images([(2,)], 1)) == 2
    assert sublattice_index(LatticeHom.from_images([(1, 0)], 2)) == INFINITE_INDEX
    with pytest.raises(NonInjective):
        sublattice_index(LatticeHom.from_images([(1,), (1,)], 1))


def test_so4_simply_connected_index():
    d = build_root_datum("D", 2)
    assert sublattice_index(d.sc_inclusion()) == 2


def test_extend_character_divisible():
    G = QmodZ()
    sub = LatticeHom.from_images([(2,)], 1)
    chi = Character(Lattice(1), G, (G.elem(Fraction(1, 3)),))
    ext = extend_character(sub, chi, Lattice(1))
    assert ext is not None
    assert ext((2,)) == G.elem(Fraction(1, 3))


def test_extend_character_mu2_has_no_root_of_minus_one():
    G = MuN(2)
    sub = LatticeHom.from_images([(2,)], 1)
    chi = Character(Lattice(1), G, (G.minus_one(),))
    assert extend_character(sub, chi, Lattice(1)) is None
    # exhaustive oracle over Hom(Z, mu_2)
    assert all((G.from_index(k) ** 2) != G.minus_one() for k in range(2))


def test_extend_character_identity():
    G = MuN(6)
    sub = LatticeHom(Lattice(2), Lattice(2), identity(2))
    chi = Character(Lattice(2), G, (G.from_index(1), G.from_index(4)))
    assert extend_character(sub, chi, Lattice(2)).values == chi.values


def test_extend_character_infinite_index():
    G = QmodZ()
    sub = LatticeHom.from_images([(1, 0)], 2)
    with pytest.raises(IndexInfinite):
        extend_character(sub, Character(Lattice(1), G, (G.one(),)), Lattice(2))


@settings(max_examples=80, deadline=None)
@given(st.lists(st.lists(st.integers(-4, 4), min_size=2, max_size=2), min_size=2, max_size=2),
       st.lists(st.integers(0, 11), min_size=2, max_size=2))
def test_extend_character_restricts(cols, vals):
    """Whenever an extension exists in mu_12 it restricts to the given values."""
    if det(tuple(tuple(r) for r in zip(*cols))) == 0:
        return
    G = MuN(12)
    sub = LatticeHom.from_images([tuple(c) for c in cols], 2)
    chi = Character(Lattice(2), G, tuple(G.from_index(v) for v in vals))
    ext = extend_character(sub, chi, Lattice(2))
    if ext is None:
        # brute force: no character of Z^2 into mu_12 restricts correctly
        for a in range(12):
            for b in range(12):
                c = Character(Lattice(2), G, (G.from_index(a), G.from_index(b)))
                assert c.compose(sub).values != chi.values
    else:
        assert ext.compose(sub).values == chi.values


def test_coefficient_groups():
    assert MuN(12).order == 12 and UnitsFq(9).order == 8 and QmodZ().order is None
    G = MuN(4)
    assert G.divide(G.from_index(2), 2) ** 2 == G.from_index(2)
    assert MuN(2).divide(MuN(2).minus_one(), 2) is None
    with pytest.raises(ValueError):
        MuN(3).minus_one()
    with pytest.raises(DimensionMismatch):
        LatticeHom(Lattice(2), Lattice(2), ((1, 0),))
