from __future__ import annotations

from itertools import combinations, product
from math import ceil

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mdsarray.families import (UnknownFamily, build, build_c1, build_c2, build_c2prime,
                               build_c3, c3_interference_matrix, c3_theta, check_conditions)
from mdsarray.gfmatrix import is_nonsingular, matmul, matpow
from mdsarray.lift import as_array_code
from mdsarray.msrbase import InvalidParams, build_c0, build_yb2


def test_c1_example(c1):
    assert (c1.n, c1.k, c1.N, c1.d, c1.q, c1.field.c) == (12, 9, 8, 10, 29, 2)
    c = c1.field.c
    assert all(c1.tables["x"][6 + i] == pow(c, 12, 29) for i in range(6))
    assert all(c1.tables["x"][i] == 1 for i in range(6))
    assert c1.base.lam[3, 0] == pow(c, 2, 29) and c1.base.lam[5, 1] == pow(c, 11, 29)


def test_c1_s1_is_base():
    code = build_c1(3, 2, 3, 1)
    base = build_c0(3, 2, 3, code.field)
    assert np.array_equal(code.blocks, base.blocks)


def test_c2_instance(c2):
    assert (c2.n, c2.k, c2.N, c2.d, c2.q) == (10, 7, 32, 8, 11)
    d = c2.tables["delta"]
    assert pow(d, 2, 11) == 1 and d != 1
    for i in range(c2.n):
        assert np.array_equal(c2.blocks[0, i], np.eye(32, dtype=np.int64))


def test_c2_coefficients_formula(c2):
    f, q, w, nbar = c2.field, c2.q, 2, 5
    d = c2.tables["delta"]
    for i in range(nbar):
        for u in range(w):
            assert c2.base.lam[i, u] == f.cpow(i) * pow(d, u, q) % q
    for i in range(c2.n):
        z, rest = divmod(i, w * nbar)
        y = rest // nbar
        assert c2.tables["x"][i] == f.cpow(z * nbar) * pow(d, y, q) % q


def test_c2prime_instances(c2p, c2p13):
    assert (c2p.n, c2p.k, c2p.N, c2p.q) == (10, 7, 32, 11)
    assert c2p13.q == 13
    for code in (c2p, c2p13):
        xi = code.tables["xi"]
        assert all(len(set(xi[i].tolist())) == code.w for i in range(code.n))
    base = build_c2prime(5, 2, 3, 1)
    f = base.field
    for i, u in product(range(5), range(2)):
        assert base.tables["xi"][i, u] == f.cpow(i * 2 + u)


def test_c3_instance(c3):
    assert (c3.n, c3.k, c3.N, c3.d, c3.q) == (10, 7, 32, 8, 13)
    q, c = c3.q, c3.field.c
    x9 = int(c3.tables["x"][9])
    a9 = c3.blocks[1, 9]
    assert np.array_equal(matmul(a9, a9, q), x9 * x9 * pow(c, 5, q) * np.eye(32, dtype=np.int64) % q)
    for i in range(c3.n):
        ai = c3.blocks[1, i]
        want = pow(int(c3.tables["x"][i]), 2, q) * pow(c, i % 5 + 1, q) % q
        assert np.array_equal(matpow(ai, 2, q), want * np.eye(32, dtype=np.int64))
    assert [int(v) for v in c3.tables["x"]] == [1] * 5 + [pow(c, ceil(5 / 2), q)] * 5


def test_c3_s1_is_yb2():
    code = build_c3(5, 2, 3, 1)
    assert np.array_equal(code.blocks, build_yb2(5, 2, 3, code.field).blocks)


@pytest.mark.parametrize("name", ["c1", "c2", "c2p", "c2p13", "c3"])
def test_builders_pass_conditions(name, request):
    rep = check_conditions(request.getfixturevalue(name))
    assert rep.ok and not rep.witnesses


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["C1", "C2", "C2P", "C3"]), st.integers(1, 5), st.integers(2, 3),
       st.integers(0, 2))
def test_builders_pass_conditions_across_params(fam, s, w, extra):
    # blocks are materialized, so keep N = w**nbar at desk scale (<= 243)
    r = w + 1
    if w == 3:
        extra = 0
    if fam == "C1":
        code = build_c1(3, w, r, s)
    elif fam == "C2":
        code = build_c2(r + 1 + extra, w, r, s)
    elif fam == "C2P":
        code = build_c2prime(r + 1 + extra, w, r, s)
    else:
        code = build_c3(r + 1 + extra, w, r, s)
    assert check_conditions(code).ok


def test_c1_corrupted_x_gives_witness():
    code = build_c1(3, 2, 3, 2, x=[1] * 12)
    rep = check_conditions(code)
    assert not rep.ok
    assert not rep.clauses["ii"]
    w = rep.witnesses["ii"]
    kap = lambda i, u: code.tables["x"][i] * code.base.lam[i % 6, u] % code.q
    assert kap(w["i"], w["u"]) == kap(w["j"], w["u"])


def test_c2_duplicate_lambda_gives_witness(c2):
    lam = c2.base.lam.copy()
    lam[2, 1] = lam[2, 0]
    code = build_c2(5, 2, 3, 2, lam=lam)
    rep = check_conditions(code)
    assert not rep.clauses["ii"]
    w = rep.witnesses["ii"]
    assert code.tables["xi"][w["i"], w["u"]] == code.tables["xi"][w["i"], w["v"]]


def test_c2prime_duplicate_xi_gives_witness(c2p):
    xi = c2p.tables["xi"].copy()
    xi[7] = xi[2]
    rep = check_conditions(build_c2prime(5, 2, 3, 2, xi=xi))
    assert not rep.clauses["i"]
    assert {rep.witnesses["i"]["i"], rep.witnesses["i"]["j"]} == {2, 7}


def test_c3_corrupted_x_gives_witness():
    # x = 1 everywhere makes nodes p and p + nbar indistinguishable
    code = build_c3(5, 2, 3, 2, x=[1] * 10)
    rep = check_conditions(code)
    assert not rep.clauses["i"] and rep.clauses["ii"]
    th = c3_theta(code)
    wi = rep.witnesses["i"]
    assert th[wi["p"]] == th[wi["p2"]]
    # x_6 = c gives theta_6 = c**2 * c**2 = theta_3
    x = [1] * 10
    x[6] = code.field.c
    code = build_c3(5, 2, 3, 2, x=x)
    rep = check_conditions(code)
    assert not rep.clauses["ii"]
    th = c3_theta(code)
    wii = rep.witnesses["ii"]
    assert th[wii["p"]] == th[wii["failed"]]


def test_check_conditions_unknown_family(c0):
    with pytest.raises(UnknownFamily):
        check_conditions(as_array_code(c0))


def test_optimal_update_structure(c2, c2p):
    for code in (c2, c2p):
        off = code.blocks.copy()
        idx = np.arange(code.N)
        off[..., idx, idx] = 0
        assert not off.any()


def test_c3_b_matrices(c3):
    q = c3.q
    for failed in range(c3.n):
        i = failed % 5
        sel = c3.select_matrix(failed, 0)
        nodes = [p for p in range(c3.n) if (p - failed) % 5]
        bs = {p: c3_interference_matrix(c3, failed, p) for p in nodes}
        for p, b in bs.items():
            for t in range(c3.r):
                lhs = sel.apply(c3.blocks[t, p], q)
                assert np.array_equal(lhs, matmul(matpow(b, t, q), sel.dense(), q))
        for a, b in combinations(nodes, 2):
            assert np.array_equal(matmul(bs[a], bs[b], q), matmul(bs[b], bs[a], q))
            assert is_nonsingular((bs[a] - bs[b]) % q, q)
        assert i == failed % 5


def test_build_dispatch():
    assert build("C0", m=3, w=2, r=3).family == "C0"
    assert build("c1", nbar=6, w=2, r=3, s=2).n == 12
    assert build("YB1", nbar=5, w=2, r=3).family == "YB1"
    assert build("C2P", nbar=5, w=2, r=3, s=2, q=13).q == 13
    with pytest.raises(UnknownFamily):
        build("ZZ", nbar=5, w=2, r=3)
    with pytest.raises(InvalidParams):
        build("C1", nbar=5, w=2, r=3)
    with pytest.raises(InvalidParams):
        build_c3(5, 2, 5, 2)
