import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aqec_lab import gf2
from aqec_lab.gf2 import BitMatrix


def dense_rank(a):
    a = np.array(a, dtype=np.uint8) % 2
    rank = 0
    rows, cols = a.shape
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if a[r, c]), None)
        if piv is None:
            continue
        a[[rank, piv]] = a[[piv, rank]]
        for r in range(rows):
            if r != rank and a[r, c]:
                a[r] ^= a[rank]
        rank += 1
    return rank


def test_roundtrip_wide_matrix():
    rng = np.random.default_rng(0)
    a = rng.integers(0, 2, size=(7, 130), dtype=np.uint8)
    assert np.array_equal(BitMatrix.from_dense(a).to_dense(), a)


def test_identity_and_zero_rank():
    assert gf2.rank(BitMatrix.identity(70)) == 70
    assert gf2.rank(BitMatrix.zeros(5, 9)) == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(1, 80), st.integers(0, 2**32 - 1))
def test_rank_matches_reference(rows, cols, seed):
    a = np.random.default_rng(seed).integers(0, 2, size=(rows, cols), dtype=np.uint8)
    m = BitMatrix.from_dense(a)
    assert gf2.rank(m) == dense_rank(a)
    assert gf2.rank(m.T) == dense_rank(a)
    assert np.array_equal(m.to_dense(), a)


def test_rank_inplace_consumes_copy_only():
    rng = np.random.default_rng(1)
    m = BitMatrix.random(10, 10, rng)
    before = m.copy()
    assert gf2.rank_inplace(m.copy()) == gf2.rank(before)
    assert gf2.rank(m) == gf2.rank(before)


def test_matmul_matches_numpy():
    rng = np.random.default_rng(2)
    a = rng.integers(0, 2, size=(6, 70), dtype=np.uint8)
    b = rng.integers(0, 2, size=(70, 9), dtype=np.uint8)
    got = BitMatrix.from_dense(a).matmul(BitMatrix.from_dense(b)).to_dense()
    assert np.array_equal(got, (a.astype(int) @ b) % 2)
    x = rng.integers(0, 2, size=70)
    assert np.array_equal(BitMatrix.from_dense(a).matvec(x), (a.astype(int) @ x) % 2)


def test_solve_consistent_and_inconsistent():
    rng = np.random.default_rng(3)
    a = rng.integers(0, 2, size=(8, 12), dtype=np.uint8)
    x = rng.integers(0, 2, size=12)
    b = (a.astype(int) @ x) % 2
    sol = gf2.solve(BitMatrix.from_dense(a), b)
    assert sol is not None and np.array_equal((a.astype(int) @ sol) % 2, b)
    singular = BitMatrix.from_dense([[1, 1], [1, 1]])
    assert gf2.solve(singular, [1, 0]) is None


def test_rank_of_ints():
    assert gf2.rank_of_ints([0b011, 0b101, 0b110]) == 2
    assert gf2.rank_of_ints([1 << 100, 1, (1 << 100) | 1]) == 2
    assert gf2.rank_of_ints([]) == 0
