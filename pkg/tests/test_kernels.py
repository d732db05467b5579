from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artifact import _kernels_py as pure
from artifact import kernels

compiled = pytest.importorskip("artifact._kernels")

PRIMES = [2, 3, 5, 7]


def mats(p, max_rows=6, max_cols=7):
    return st.tuples(st.integers(1, max_rows), st.integers(1, max_cols)).flatmap(
        lambda s: st.lists(st.integers(0, p - 1), min_size=s[0] * s[1], max_size=s[0] * s[1])
        .map(lambda v: np.array(v, dtype=np.int64).reshape(s)))


def test_selector_reports_compiled():
    assert kernels.COMPILED


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(PRIMES).flatmap(lambda p: st.tuples(st.just(p), mats(p))))
def test_rref_rank_nullspace_parity(pm):
    p, M = pm
    R1, piv1 = pure.rref(M, p)
    R2, piv2 = compiled.rref(M, p)
    assert piv1 == piv2 and np.array_equal(R1, R2)
    assert pure.rank(M, p) == compiled.rank(M, p) == len(piv1)
    N1, N2 = pure.nullspace(M, p), compiled.nullspace(M, p)
    assert np.array_equal(N1, N2)
    assert not ((M @ N1.T) % p).any()
    assert N1.shape[0] + len(piv1) == M.shape[1]
    assert pure.subspace_key(M, p) == compiled.subspace_key(M, p)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(PRIMES).flatmap(lambda p: st.tuples(st.just(p), mats(p, 5, 5), mats(p, 5, 5))))
def test_matmul_parity(pab):
    p, A, B = pab
    if A.shape[1] != B.shape[0]:
        B = np.resize(B, (A.shape[1], B.shape[1]))
    assert np.array_equal(pure.matmul(A, B, p), compiled.matmul(A, B, p))


@pytest.mark.parametrize("p", PRIMES)
def test_inverse_parity(p):
    rng = np.random.default_rng(p)
    done = 0
    while done < 20:
        M = rng.integers(0, p, size=(4, 4))
        if pure.rank(M, p) < 4:
            with pytest.raises(ZeroDivisionError):
                compiled.inverse(M, p)
            continue
        I1, I2 = pure.inverse(M, p), compiled.inverse(M, p)
        assert np.array_equal(I1, I2)
        assert np.array_equal((M @ I1) % p, np.eye(4, dtype=np.int64))
        done += 1


def test_act_rref_parity():
    p = 3
    rng = np.random.default_rng(0)
    B = rng.integers(0, p, size=(2, 4))
    g = rng.integers(0, p, size=(4, 4))
    assert np.array_equal(pure.act_rref(B, g, p), compiled.act_rref(B, g, p))


def test_benchmark_runs(capsys):
    pytest.importorskip("artifact._kernels")
    import importlib.util
    import pathlib
    path = pathlib.Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    assert mod.main(["--repeat", "2"]) == 0
    assert "rref 12x12" in capsys.readouterr().out
