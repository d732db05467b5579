from __future__ import annotations

from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from artifact.errors import NoDecomposition, UnsupportedFamily, UnsupportedRank
from artifact.roots import (all_star_decompositions, build_root_datum, check_sign_group_level,
                            check_star, chevalley_signs, dot, star_decompose, weyl_act,
                            weyl_element, weyl_group)

SMALL = [("A", 1), ("A", 2), ("A", 3), ("B", 2), ("B", 3), ("C", 1), ("C", 2), ("C", 3),
         ("D", 2), ("D", 3), ("D", 4)]


def test_c2_roots():
    d = build_root_datum("C", 2)
    assert set(d.roots) == {(2, 0), (-2, 0), (0, 2), (0, -2),
                            (1, 1), (1, -1), (-1, 1), (-1, -1)}


def test_d4_root_count():
    assert len(build_root_datum("D", 4).roots) == 24


def test_a1_roots():
    assert set(build_root_datum("A", 1).roots) == {(1, -1), (-1, 1)}


@pytest.mark.parametrize("fam,n", SMALL)
def test_counts_and_pairing(fam, n):
    d = build_root_datum(fam, n)
    expected = {"A": n * (n + 1), "B": 2 * n * n, "C": 2 * n * n, "D": 2 * n * (n - 1)}[fam]
    assert len(d.roots) == len(d.coroots) == expected
    for r, c in zip(d.roots, d.coroots):
        assert dot(r, c) == 2
    for i, r in enumerate(d.simple_roots):
        for j, c in enumerate(d.simple_coroots):
            if i != j:
                assert dot(r, c) <= 0


@pytest.mark.parametrize("fam,n", SMALL)
def test_weyl_order(fam, n):
    order = {"A": factorial(n + 1), "B": 2 ** n * factorial(n),
             "C": 2 ** n * factorial(n), "D": 2 ** (n - 1) * factorial(n)}[fam]
    assert len(weyl_group(build_root_datum(fam, n))) == order


def test_weyl_act_examples():
    d = build_root_datum("A", 1)
    assert weyl_act(weyl_element(d, [0]), (1, 0)) == (0, 1)
    c = build_root_datum("C", 2)
    assert weyl_act(weyl_element(c, [1]), (0, 1)) == (0, -1)
    assert weyl_act(weyl_element(c, []), (3, -2)) == (3, -2)


def test_long_root_reflection_c2():
    c = build_root_datum("C", 2)
    # reflection in the long root 2e_1: y - <2e_1, y> e_1
    assert c.reflect_coweight((2, 0), (1, 0)) == (-1, 0)


@pytest.mark.parametrize("fam,n", SMALL)
def test_weyl_permutes_coroots(fam, n):
    d = build_root_datum(fam, n)
    cs = set(d.coroots)
    for w in weyl_group(d):
        assert {weyl_act(w, c) for c in cs} == cs


def test_unsupported():
    with pytest.raises(UnsupportedFamily):
        build_root_datum("E", 6)
    with pytest.raises(UnsupportedRank):
        build_root_datum("D", 1)


def test_sign_table_frozen_d4():
    """Counts of the D_4 sign table in the SO_8 realization."""
    d = build_root_datum("D", 4)
    t = chevalley_signs(d).fill()
    orth = [(a, b) for a in d.roots for b in d.roots if dot(a, d.coroot_of(b)) == 0]
    assert len(t) == 576 and sum(v == -1 for v in t.values()) == 240
    assert len(orth) == 144 and all(t[a, b] == 1 for a, b in orth)


def test_sign_table_frozen_c2():
    t = chevalley_signs(build_root_datum("C", 2)).fill()
    assert sum(v == -1 for v in t.values()) == 40


@pytest.mark.parametrize("fam,n", [("A", 2), ("B", 2), ("C", 2), ("D", 3), ("C", 3)])
def test_signs_hold_at_group_level(fam, n):
    d = build_root_datum(fam, n)
    for a in d.roots:
        for b in d.roots:
            assert check_sign_group_level(d, a, b)


@pytest.mark.parametrize("fam,n", SMALL)
def test_sign_involution(fam, n):
    """w_a x_a w_a^-1 = x_{-a}(-t), and likewise for -a."""
    d = build_root_datum(fam, n)
    t = chevalley_signs(d)
    for a in d.roots:
        assert t[a, a] == -1 and t[a, tuple(-x for x in a)] == -1


def test_star_d3():
    d = build_root_datum("D", 3)
    dec = star_decompose(d, (1, 0, -1))
    assert check_star(d, dec)
    assert {x.summands for x in all_star_decompositions(d, (1, 0, -1))} == {(0, 1), (1, 0)}


def test_star_simple_is_singleton():
    d = build_root_datum("B", 3)
    for i, c in enumerate(d.simple_coroots):
        assert star_decompose(d, c).summands == (i,)


def test_star_c2_exhaustive():
    d = build_root_datum("C", 2)
    decs = all_star_decompositions(d, (1, 1))
    assert {x.summands for x in decs} == {(0, 1, 1), (1, 0, 1)}
    assert all(check_star(d, x) for x in decs)


def test_star_not_a_coroot():
    with pytest.raises(NoDecomposition):
        star_decompose(build_root_datum("C", 2), (2, 2))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SMALL), st.data())
def test_every_coroot_has_star_path(fn, data):
    d = build_root_datum(*fn)
    c = data.draw(st.sampled_from(d.coroots))
    dec = star_decompose(d, c)
    assert check_star(d, dec)
    assert dec.negative == (not d.is_positive_coroot(c))
