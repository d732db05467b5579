from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from artifact.errors import CoeffMismatch, ExtensionMismatch, ParentsDiffer
from artifact.extensions import (ExplicitTable, Extension, baer_sum, baer_sum_n, basis_grid,
                                 cocycle_tables_equal, commutator_matches, ext_commutator,
                                 ext_inv, ext_mul, full_grid, iso_extensions, mul_map,
                                 pr_element, pr_star, pullback_ext, pushout_m,
                                 random_table_extension, standard_extension, trivial_extension,
                                 twisted_product_ext)
from artifact.lattice import Lattice, LatticeHom, MuN, QmodZ
from artifact.qforms import QuadraticForm, eval_B, weyl_invariant_form
from artifact.roots import build_root_datum

HALF = Fraction(1, 2)


def _q(diag, b):
    return QuadraticForm.from_gram(diag, [[0, b], [b, 0]])


def test_commutator_examples():
    E = standard_extension(_q([1, 1], 1), QmodZ())
    x, y = E.lift((1, 0)), E.lift((0, 1))
    assert ext_commutator(x, y).value == HALF
    assert ext_commutator(x, x).is_one()
    z = E.elem(Fraction(1, 3), (2, -1))
    assert ext_mul(z, ext_inv(z)) == E.identity()


def test_mismatched_elements():
    E1 = trivial_extension(1, MuN(2))
    E2 = trivial_extension(1, MuN(2))
    with pytest.raises(ExtensionMismatch):
        ext_mul(E1.lift((1,)), E2.lift((1,)))
    with pytest.raises(CoeffMismatch):
        baer_sum(E1, trivial_extension(1, MuN(4)))


def test_bad_cocycle_rejected():
    # a non-normalized table
    bad = ExplicitTable(((Fraction(0),),), (((0,), Fraction(1, 2)),))
    with pytest.raises(ExtensionMismatch):
        Extension(Lattice(1), MuN(2), bad)


def test_baer_examples():
    Q = _q([1, 0], 1)
    E = standard_extension(Q, QmodZ())
    grid = full_grid(2, 2)
    assert baer_sum_n(E, 1) is E
    assert cocycle_tables_equal(baer_sum_n(E, 3), standard_extension(Q.scale(3), QmodZ()), grid)
    F = random_table_extension(2, MuN(2), random.Random(5))
    assert cocycle_tables_equal(baer_sum_n(F, 2), trivial_extension(2, MuN(2)), grid)
    assert cocycle_tables_equal(baer_sum_n(F, 0), trivial_extension(2, MuN(2)), grid)


def test_pushout_examples(rng):
    E = random_table_extension(2, MuN(6), rng)
    grid = full_grid(2, 2)
    assert cocycle_tables_equal(pushout_m(E, 0), trivial_extension(2, MuN(6)), grid)
    assert cocycle_tables_equal(pushout_m(E, 6), trivial_extension(2, MuN(6)), grid)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(0, 5), st.integers(0, 10 ** 6))
def test_baer_equals_pushout(rank, m, seed):
    E = random_table_extension(rank, MuN(12), random.Random(seed), window=1)
    assert cocycle_tables_equal(pushout_m(E, m), baer_sum_n(E, m), full_grid(rank, 1))


def test_pullback_examples():
    b = 3
    E = standard_extension(_q([1, 1], b), QmodZ())
    diag = LatticeHom.from_images([(1, 1)], 2)
    P = pullback_ext(E, diag)
    for x in range(-2, 3):
        for y in range(-2, 3):
            assert P.sigma((x,), (y,)) == (HALF * b * x * y) % 1
    ident = LatticeHom.from_images([(1, 0), (0, 1)], 2)
    assert cocycle_tables_equal(pullback_ext(E, ident), E, full_grid(2, 2))
    zero = LatticeHom.from_images([(0, 0)], 2)
    assert cocycle_tables_equal(pullback_ext(E, zero), trivial_extension(1, QmodZ()), full_grid(1, 3))


def test_mul_map_examples(rng):
    E = random_table_extension(1, MuN(4), rng)
    one = E.coeff.one()
    assert mul_map(pr_element(one, E.identity(), E.identity())) == E.identity()
    y1, y2 = (2,), (-1,)
    p = pr_element(one, E.lift(y1), E.lift(y2))
    assert mul_map(p) == E.elem(E.sigma(y1, y2), (1,))
    with pytest.raises(ParentsDiffer):
        mul_map(pr_element(one, E.lift(y1), trivial_extension(1, MuN(4)).lift(y2)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3),
       st.integers(-2, 2), st.integers(-2, 2), st.integers(0, 10 ** 6))
def test_central_elements_move_across(x, t, s, y1, y2, seed):
    """(x, e1, e2) and (x t^-1 s^-1, e1 t, e2 s) are the same class."""
    E = random_table_extension(1, MuN(4), random.Random(seed))
    G = E.coeff
    e1 = E.elem(Fraction(seed % 4, 4), (y1,))
    e2 = E.elem(0, (y2,))
    a = pr_element(G.from_index(x), e1, e2)
    b = pr_element(G.from_index(x - t - s), E.elem(e1.coeff.value + Fraction(t, 4), e1.point),
                   E.elem(e2.coeff.value + Fraction(s, 4), e2.point))
    assert a == b and mul_map(a) == mul_map(b)


def test_pr_star_quotient_count():
    """Brute-force orbit count of mu_2 x E1 x E2 modulo {(ts, t^-1, s^-1)}."""
    E1 = random_table_extension(1, MuN(2), random.Random(1))
    E2 = random_table_extension(1, MuN(2), random.Random(2))
    pts = [(-1,), (0,), (1,)]
    triples = [(x, c1, y1, c2, y2) for x in (0, 1) for c1 in (0, 1) for c2 in (0, 1)
               for y1 in pts for y2 in pts]
    seen, orbits = set(), 0
    for tr in triples:
        if tr in seen:
            continue
        orbits += 1
        x, c1, y1, c2, y2 = tr
        for t, s in itertools.product((0, 1), repeat=2):
            seen.add(((x + t + s) % 2, (c1 + t) % 2, y1, (c2 + s) % 2, y2))
    G = MuN(2)
    canon = {pr_element(G.from_index(x), E1.elem(Fraction(c1, 2), y1), E2.elem(Fraction(c2, 2), y2))
             for x, c1, y1, c2, y2 in triples}
    assert orbits == len(canon) == 2 * len(pts) ** 2


def test_pr_star_is_block_sum(rng):
    E1 = random_table_extension(1, MuN(6), rng)
    E2 = random_table_extension(2, MuN(6), rng)
    P = pr_star(E1, E2)
    for a in full_grid(3, 1):
        for b in full_grid(3, 1):
            assert P.sigma(a, b) == (E1.sigma(a[:1], b[:1]) + E2.sigma(a[1:], b[1:])) % 1


def _so_odd_square():
    T = build_root_datum("B", 1)
    Q = weyl_invariant_form(T, 4)
    E = standard_extension(Q, QmodZ())
    Qsq = weyl_invariant_form(build_root_datum("D", 3), 4)
    return E, twisted_product_ext(E, E, Qsq), Qsq


def test_twisted_product_commutator():
    E, Tw, Qsq = _so_odd_square()
    extra = (0, 0, 1)
    for y in full_grid(2, 2):
        v = tuple(y) + (0,)
        assert Tw.commutator_value(extra, v) == (HALF * eval_B(Qsq, extra, v)) % 1
    assert commutator_matches(Tw, Qsq, basis_grid(3, 2))


def test_twisted_product_slice_is_pr_star():
    E, Tw, _ = _so_odd_square()
    P = pr_star(E, E)
    for a in full_grid(2, 2):
        for b in full_grid(2, 2):
            assert Tw.sigma(a + (0,), b + (0,)) == P.sigma(a, b)


def test_twisted_product_associative():
    _, Tw, _ = _so_odd_square()
    r = random.Random(3)
    pts = full_grid(3, 2)
    for _ in range(200):
        a, b, c = (Tw.elem(Fraction(r.randrange(8), 8), r.choice(pts)) for _ in range(3))
        assert (a * b) * c == a * (b * c)


def test_iso_identity_witness():
    d = build_root_datum("C", 2)
    Q = weyl_invariant_form(d, 1)
    E = standard_extension(Q, QmodZ())
    f = [E.lift(c) for c in d.simple_coroots]
    w = iso_extensions(E, E, f, f, d.sc_inclusion())
    assert w is not None and all(v.is_one() for v in w.chi.values)


@settings(max_examples=12, deadline=None)
@given(st.lists(st.fractions(0, 1).map(lambda x: Fraction(x.numerator % 24, 24)), min_size=4, max_size=4))
def test_iso_exists_over_divisible(vals):
    d = build_root_datum("D", 2)
    Q = weyl_invariant_form(d, 2)
    E = standard_extension(Q, QmodZ())
    E2 = standard_extension(Q, QmodZ())
    f = [E.elem(v, c) for v, c in zip(vals[:2], d.simple_coroots)]
    f2 = [E2.elem(v, c) for v, c in zip(vals[2:], d.simple_coroots)]
    w = iso_extensions(E, E2, f, f2, d.sc_inclusion())
    assert w is not None and w.verify(f, f2, full_grid(2, 2))


def test_iso_fails_without_square_root():
    G = MuN(2)
    E = trivial_extension(1, G)
    E2 = trivial_extension(1, G)
    sub = LatticeHom.from_images([(2,)], 1)
    assert iso_extensions(E, E2, [E.lift((2,))], [E2.elem(HALF, (2,))], sub) is None
