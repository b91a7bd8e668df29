from __future__ import annotations

from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mdsarray.codec import (Codeword, TooLarge, TooManyErasures, decode_erasures, encode,
                            encode_batch, parity_residual, sub_block, verify_mds,
                            verify_optimal_update)
from mdsarray.gfmatrix import SingularSystem, rank
from mdsarray.lift import LiftSpec, lift


def _data(code, seed=0):
    return np.random.default_rng(seed).integers(0, code.q, size=(code.k, code.N))


def test_zero_data(c1):
    cw = encode(c1, np.zeros((9, 8), dtype=np.int64))
    assert not cw.columns.any()


def test_encode_residual(c1):
    cw = encode(c1, _data(c1), parity_positions=[9, 10, 11])
    assert cw.is_valid()
    assert np.array_equal(cw.columns[:9], _data(c1))


@pytest.mark.parametrize("name", ["c1", "c2", "c3"])
def test_reencode_from_other_positions(name, request):
    code = request.getfixturevalue(name)
    cw = encode(code, _data(code, 3))
    rng = np.random.default_rng(7)
    for _ in range(5):
        parity = sorted(rng.choice(code.n, size=code.r, replace=False).tolist())
        keep = [j for j in range(code.n) if j not in parity]
        again = encode(code, cw.columns[keep], parity_positions=parity)
        assert np.array_equal(again.columns, cw.columns)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 28), st.integers(0, 28))
def test_linearity(c1, seed, alpha, beta):
    rng = np.random.default_rng(seed)
    u, v = rng.integers(0, 29, size=(2, 9, 8))
    lhs = encode(c1, (alpha * u + beta * v) % 29).columns
    rhs = (alpha * encode(c1, u).columns + beta * encode(c1, v).columns) % 29
    assert np.array_equal(lhs, rhs)


def test_decode_examples(c1):
    cw = encode(c1, _data(c1))
    same = decode_erasures(c1, cw.columns, [])
    assert np.array_equal(same.columns, cw.columns)
    damaged = cw.columns.copy()
    damaged[[0, 5, 11]] = 0
    assert np.array_equal(decode_erasures(c1, damaged, [0, 5, 11]).columns, cw.columns)
    damaged[[1, 2]] = 0
    partial = cw.columns.copy()
    partial[[4]] = 0
    assert np.array_equal(decode_erasures(c1, partial, [4]).columns, cw.columns)
    with pytest.raises(TooManyErasures):
        decode_erasures(c1, damaged, [0, 1, 2, 5])


def test_c2_all_triples_decode(c2):
    cw = encode(c2, _data(c2, 1))
    for pat in combinations(range(10), 3):
        d = cw.columns.copy()
        d[list(pat)] = 0
        assert np.array_equal(decode_erasures(c2, d, pat).columns, cw.columns)


def test_batch_matches_single(c1):
    rng = np.random.default_rng(5)
    data = rng.integers(0, 29, size=(4, 9, 8))
    batch = encode_batch(c1, data)
    for b in range(4):
        assert np.array_equal(batch[b], encode(c1, data[b]).columns)
    assert not parity_residual(c1, batch).any()


def test_verify_mds_c1_determinant_oracle(c1):
    rep = verify_mds(c1)
    assert rep.ok and rep.patterns == 220 and rep.modes_agree
    for pat in combinations(range(12), 3):
        assert rank(sub_block(c1, pat), 29) == 24


def test_verify_mds_detects_identical_columns(c0):
    # s = 2 with x = 1 duplicates every column
    code = lift(c0, LiftSpec(2, np.ones((3, 12), dtype=np.int64)))
    rep = verify_mds(code)
    assert not rep.ok and rep.modes_agree
    assert (0, 6, 1) not in rep.rank_failures
    assert (0, 1, 6) in rep.rank_failures


def test_verify_mds_guard(c1):
    with pytest.raises(TooLarge):
        verify_mds(c1, max_n=8)


def test_optimal_update(c1, c2, c2p, c3):
    assert verify_optimal_update(c2) and verify_optimal_update(c2p)
    assert not verify_optimal_update(c3) and not verify_optimal_update(c1)


def test_codeword_shape_checked(c1):
    with pytest.raises(ValueError):
        Codeword(c1, np.zeros((3, 3)))


def test_singular_positions_raise(c0):
    code = lift(c0, LiftSpec(2, np.ones((3, 12), dtype=np.int64)))
    with pytest.raises(SingularSystem):
        encode(code, np.zeros((9, 8), dtype=np.int64), parity_positions=[0, 6, 1])
