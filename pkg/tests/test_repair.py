from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mdsarray.codec import ParityViolation, encode
from mdsarray.digits import partition_selector
from mdsarray.families import build_c1, build_c2, c3_interference_matrix
from mdsarray.gfmatrix import matmul, matpow
from mdsarray.lift import LiftSpec, lift
from mdsarray.msrbase import c0_interference
from mdsarray.repair import (InvalidAvoidSet, RankDeficient, admissible_avoid,
                             aggregate_projection, annihilator_check, annihilator_matrix,
                             execute_repair, factor_interference, plan_repair,
                             repair_system, verify_repair_all)


def _cw(code, seed=0):
    rng = np.random.default_rng(seed)
    return encode(code, rng.integers(0, code.q, size=(code.k, code.N)))


def test_plan_example(c1):
    plan = plan_repair(c1, 3, [0])
    assert plan.helpers == (1, 2, 4, 5, 6, 7, 8, 9, 10, 11)
    assert plan.compulsory == (9,)
    assert plan_repair(c1, 3).avoid == (0,)
    assert plan.repair_matrix(9).is_identity
    with pytest.raises(InvalidAvoidSet):
        plan_repair(c1, 3, [9])
    with pytest.raises(InvalidAvoidSet):
        plan_repair(c1, 3, [0, 1])
    with pytest.raises(InvalidAvoidSet):
        plan_repair(c1, 3, [3])


def test_plan_base(c0):
    plan = plan_repair(c0, 0)
    assert plan.compulsory == () and len(plan.helpers) == c0.dbar


def test_example_repair(c1):
    cw = _cw(c1)
    col, rep = execute_repair(cw, plan_repair(c1, 3, [0]))
    assert np.array_equal(col, cw.columns[3])
    assert rep.downloaded_symbols == 44 and rep.gamma_optimal == 40
    assert rep.ratio == Fraction(11, 10)
    assert rep.per_helper[9]["symbols"] == 8
    assert all(rep.per_helper[j]["symbols"] == 4 for j in rep.helpers if j != 9)
    d = rep.as_dict()
    assert (d["ratio_num"], d["ratio_den"], d["gamma_optimal"]) == (11, 10, 40)


def test_c2_node4(c2):
    cw = _cw(c2, 4)
    col, rep = execute_repair(cw, plan_repair(c2, 4, [0]))
    assert np.array_equal(col, cw.columns[4])
    assert rep.ratio == Fraction(9, 8)


def test_failed_column_not_read(c1):
    cw = _cw(c1)
    plan = plan_repair(c1, 5)
    broken = cw.columns.copy()
    broken[5] = 0
    from mdsarray.codec import Codeword
    col, _ = execute_repair(Codeword(c1, broken), plan)
    assert np.array_equal(col, cw.columns[5])


def test_parity_violation_rejected(c1):
    from mdsarray.codec import Codeword
    cw = _cw(c1)
    bad = cw.columns.copy()
    bad[7, 0] = (bad[7, 0] + 1) % 29
    with pytest.raises(ParityViolation):
        execute_repair(Codeword(c1, bad), plan_repair(c1, 3))


def test_base_codes_msr(c0, yb1, yb2):
    for code, gamma in ((c0, 16), (yb1, 48), (yb2, 48)):
        rep = verify_repair_all(code)
        assert rep.ok and rep.gammas == {gamma} and rep.ratios == {1}


def test_factor_identity_group(c1):
    plan = plan_repair(c1, 3)
    for j in admissible_avoid(c1, 3):
        b = factor_interference(c1, plan, j, 0)
        assert np.array_equal(b, np.eye(4, dtype=np.int64))


def test_factor_matches_c0_closed_form(c1):
    for i in range(12):
        plan = plan_repair(c1, i)
        for j, t in product(admissible_avoid(c1, i), range(3)):
            b = factor_interference(c1, plan, j, t)
            want = pow(int(c1.tables["x"][j]), t, 29) * c0_interference(c1.base, t, j % 6, i % 6) % 29
            assert np.array_equal(b, want)
            assert not np.any(np.tril(b, -1))


def test_factor_matches_c3_form(c3):
    for i in range(10):
        plan = plan_repair(c3, i)
        for j in admissible_avoid(c3, i):
            bj = c3_interference_matrix(c3, i, j)
            for t in range(3):
                assert np.array_equal(factor_interference(c3, plan, j, t), matpow(bj, t, c3.q))


@pytest.mark.parametrize("name", ["c1", "c2", "c2p", "c3"])
def test_square_system(name, request):
    code = request.getfixturevalue(name)
    plan = plan_repair(code, 0)
    m, c, _ = repair_system(plan)
    rows = code.N // code.w
    assert m.shape == (code.r * rows, code.N + (code.r - code.w) * rows)
    assert m.shape[0] == m.shape[1]


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["c1", "c2", "c2p", "c3"]), st.integers(0, 2**32 - 1), st.data())
def test_random_repairs(request, name, seed, data):
    code = request.getfixturevalue(name)
    cw = _cw(code, seed)
    i = data.draw(st.integers(0, code.n - 1))
    avoid = data.draw(st.lists(st.sampled_from(admissible_avoid(code, i)),
                               min_size=code.r - code.w, max_size=code.r - code.w, unique=True))
    col, rep = execute_repair(cw, plan_repair(code, i, avoid))
    assert np.array_equal(col, cw.columns[i])
    assert rep.downloaded_symbols == (code.d - code.dc) * code.N // code.w + code.dc * code.N


def test_access_ratio_c3(c3):
    rep = verify_repair_all(c3)
    assert rep.ok and rep.access_ratios == rep.ratios == {Fraction(9, 8)}


def test_adversarial_lift_fails_repair(c0):
    # all of the second copy scaled by the same power as the first breaks R3
    code = None
    for e in range(1, 12):
        x = np.ones((3, 12), dtype=np.int64)
        x[1, 6:] = c0.field.cpow(e)
        x[2, 6:] = c0.field.cpow(2 * e)
        x[1, 0] = x[1, 6]
        x[2, 0] = x[2, 6]
        cand = lift(c0, LiftSpec(2, x))
        rep = verify_repair_all(cand)
        if not rep.ok:
            code = cand
            break
    assert code is not None
    assert any(f["error"] == "SingularSystem" for f in rep.failures)


def test_aggregate_projection():
    e0 = np.zeros(8, dtype=np.int64)
    e0[0] = 1
    mu = aggregate_projection(e0, 0, 2, 3)
    assert mu.tolist() == [1, 0, 0, 0]
    rng = np.random.default_rng(0)
    f = rng.integers(0, 11, size=27)
    for i in range(3):
        mu = aggregate_projection(f, i, 3, 3, 11)
        dense = sum(partition_selector(i, u, 3, 3).dense() for u in range(3))
        assert np.array_equal(mu, dense @ f % 11)


def test_annihilator(c2, c2p):
    for code in (c2, c2p):
        for f in range(code.n):
            assert annihilator_check(code, f)
    p = annihilator_matrix([3, 5], 3, 11)
    for z in (3, 5):
        assert (p @ np.array([1, z, z * z]) % 11 == 0).all()


def test_annihilator_detects_duplicate(c2):
    # x_1 = x_2 = 1, so this makes xi[1, 1] == xi[2, 0]
    lam = c2.base.lam.copy()
    lam[1, 1] = lam[2, 0]
    code = build_c2(5, 2, 3, 2, lam=lam)
    assert code.tables["xi"][1, 1] == code.tables["xi"][2, 0]
    with pytest.raises(RankDeficient) as e:
        for f in range(code.n):
            annihilator_check(code, f)
    assert "failed" in e.value.witness


def test_annihilator_degenerate():
    assert annihilator_matrix([1, 2], 2, 11).shape == (0, 2)
