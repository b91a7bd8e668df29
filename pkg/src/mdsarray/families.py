"""Explicit lifted families C1, C2, C2', C3 and their condition checkers.

Each builder picks the smallest admissible prime unless ``q`` is given,
and accepts an injected coefficient table so that checkers can be
exercised on deliberately broken codes.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations
from math import ceil

import numpy as np

from .digits import aggregate_selector, digit_table
from .gf import FieldSpec, resolve_field
from .lift import ArrayCode, LiftSpec, lift
from .msrbase import (InvalidParams, _check_params, _power_blocks, build_c0, build_yb1,
                      build_yb2, c0_bound)


class UnknownFamily(ValueError):
    pass


FAMILIES = ("C1", "C2", "C2P", "C3")


def c1_bound(m: int, w: int, s: int) -> int:
    return s * c0_bound(m, w)


def c2_bound(nbar: int, w: int, s: int) -> int:
    return ceil(s / w) * w * nbar


def c3_bound(nbar: int, w: int, s: int) -> int:
    return ceil(nbar / w) * s * w


def _lifted(family: str, base, xs, field: FieldSpec, tables: dict) -> ArrayCode:
    spec = LiftSpec.power_form(xs, base.r, field.q)
    code = lift(base, spec, family=family)
    code.tables.update(tables, x=np.asarray(spec.x[1] if base.r > 1 else xs, dtype=np.int64))
    return code


def build_c1(m: int, w: int, r: int, s: int, q: int | None = None, x=None) -> ArrayCode:
    """C0 lifted with x_i = c**(floor(i/nbar) * bound(m, w))."""
    if s < 1:
        raise InvalidParams("s must be >= 1")
    if not (2 <= w < r <= 2 * m - 1):
        raise InvalidParams(f"need 2 <= w < r <= 2m-1, got m={m}, w={w}, r={r}")
    field = resolve_field(c1_bound(m, w, s), q)
    base = build_c0(m, w, r, field)
    nbar = 2 * m
    if x is None:
        step = c0_bound(m, w)
        x = [field.cpow((i // nbar) * step) for i in range(s * nbar)]
    return _lifted("C1", base, x, field, {"lam": base.lam})


def c2_coefficients(nbar: int, w: int, s: int, field: FieldSpec):
    """lam[i, u] = c**i * delta**u and x_i = c**(z*nbar) * delta**y."""
    delta = field.root_of_unity(w)
    q = field.q
    lam = np.array([[field.cpow(i) * pow(delta, u, q) % q for u in range(w)]
                    for i in range(nbar)], dtype=np.int64)
    xs = []
    for i in range(s * nbar):
        z, rest = divmod(i, w * nbar)
        y = rest // nbar
        xs.append(field.cpow(z * nbar) * pow(delta, y, q) % q)
    return lam, xs, delta


def build_c2(nbar: int, w: int, r: int, s: int, q: int | None = None,
             lam=None, x=None) -> ArrayCode:
    _check_params(nbar, w, r)
    if s < 1:
        raise InvalidParams("s must be >= 1")
    field = resolve_field(c2_bound(nbar, w, s), q, divisor=w)
    lam0, x0, delta = c2_coefficients(nbar, w, s, field)
    lam = lam0 if lam is None else np.asarray(lam, dtype=np.int64) % field.q
    xs = x0 if x is None else list(x)
    base = build_yb1(nbar, w, r, field, lam=lam, strict=False)
    code = _lifted("C2", base, xs, field, {"lam": base.lam, "delta": delta})
    xv = code.tables["x"]
    code.tables["xi"] = xv[:, None] * base.lam[np.arange(code.n) % nbar] % field.q
    return code


def c2prime_xi(nbar: int, w: int, s: int, field: FieldSpec) -> np.ndarray:
    xi = np.zeros((s * nbar, w), dtype=np.int64)
    for i in range(s * nbar):
        z, rest = divmod(i, w * nbar)
        y, ib = divmod(rest, nbar)
        for u in range(w):
            xi[i, u] = field.cpow(z * w * nbar + ib * w + (u + y) % w)
    return xi


def build_c2prime(nbar: int, w: int, r: int, s: int, q: int | None = None,
                  xi=None) -> ArrayCode:
    """Direct diagonal construction; no divisibility constraint on q."""
    _check_params(nbar, w, r)
    if s < 1:
        raise InvalidParams("s must be >= 1")
    field = resolve_field(c2_bound(nbar, w, s), q)
    xi = c2prime_xi(nbar, w, s, field) if xi is None else np.asarray(xi, dtype=np.int64) % field.q
    n = s * nbar
    if xi.shape != (n, w):
        raise InvalidParams(f"xi table must have shape {(n, w)}")
    dig = digit_table(w, nbar)
    base = [np.diag(xi[i][dig[:, i % nbar]]) for i in range(n)]
    blocks = _power_blocks(base, r, field.q)
    blocks.setflags(write=False)
    schema = tuple(aggregate_selector(i, w, nbar) for i in range(nbar))
    return ArrayCode("C2P", n, r, w, nbar, field, blocks, schema, tables={"xi": xi})


def build_c3(nbar: int, w: int, r: int, s: int, q: int | None = None, x=None) -> ArrayCode:
    """YB2 lifted with x_{u*nbar + i} = c**(u * ceil(nbar / w))."""
    _check_params(nbar, w, r)
    if s < 1:
        raise InvalidParams("s must be >= 1")
    field = resolve_field(c3_bound(nbar, w, s), q)
    base = build_yb2(nbar, w, r, field)
    if x is None:
        x = [field.cpow((i // nbar) * ceil(nbar / w)) for i in range(s * nbar)]
    return _lifted("C3", base, x, field, {"lam": base.lam})


def build(family: str, *, nbar: int | None = None, m: int | None = None, w: int, r: int,
          s: int = 1, q: int | None = None):
    """Dispatch by family tag (``C0``/``YB1``/``YB2`` return base codes)."""
    from .gf import FieldSpec as _FS
    fam = family.upper()
    if fam in ("C0", "C1"):
        if m is None:
            if nbar is None or nbar % 2:
                raise InvalidParams("C0/C1 need m or an even nbar")
            m = nbar // 2
        if fam == "C0":
            if s != 1:
                raise InvalidParams("base codes have s = 1")
            return build_c0(m, w, r, None if q is None else _FS.of(q))
        return build_c1(m, w, r, s, q)
    if nbar is None:
        raise InvalidParams(f"{family} needs nbar")
    if fam in ("YB1", "YB2"):
        if s != 1:
            raise InvalidParams("base codes have s = 1")
        f = None if q is None else _FS.of(q)
        return build_yb1(nbar, w, r, f) if fam == "YB1" else build_yb2(nbar, w, r, f)
    if fam == "C2":
        return build_c2(nbar, w, r, s, q)
    if fam in ("C2P", "C2'", "C2PRIME"):
        return build_c2prime(nbar, w, r, s, q)
    if fam == "C3":
        return build_c3(nbar, w, r, s, q)
    raise UnknownFamily(family)


@dataclass
class ConditionReport:
    family: str
    clauses: dict[str, bool] = dc_field(default_factory=dict)
    witnesses: dict[str, dict] = dc_field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.clauses.values())

    def __bool__(self) -> bool:
        return self.ok

    def record(self, clause: str, witness: dict | None) -> None:
        self.clauses[clause] = witness is None
        if witness is not None:
            self.witnesses[clause] = witness

    def as_dict(self) -> dict:
        return {"family": self.family, "ok": self.ok, "clauses": self.clauses,
                "witnesses": self.witnesses}


def _first(it):
    return next(iter(it), None)


def _c1_conditions(code: ArrayCode, rep: ConditionReport) -> None:
    q, n, w, nbar = code.q, code.n, code.w, code.nbar
    m = nbar // 2
    lam = code.base.lam
    xs = code.tables["x"]
    kap = xs[:, None] * lam[np.arange(n) % nbar] % q  # kap[i, u] = x_i * lam[i % nbar, u]
    pairs = list(combinations(range(n), 2))
    rep.record("i", _first(
        {"i": i, "j": j, "u": u, "v": v, "value": int(kap[i, u])}
        for i, j in pairs if (i - j) % m
        for u in range(w) for v in range(w) if kap[i, u] == kap[j, v]))
    rep.record("ii", _first(
        {"i": i, "j": j, "u": u, "value": int(kap[i, u])}
        for i, j in pairs if (i - j) % m == 0
        for u in range(w) if kap[i, u] == kap[j, u]))
    rep.record("iii", _first(
        {"ibar": ib, "u": u, "v": v, "value": int(lam[ib, u])}
        for ib in range(nbar) for u, v in combinations(range(w), 2) if lam[ib, u] == lam[ib, v]))
    rep.record("iv", _first(
        {"i": i, "j": j, "u": u, "value": int(kap[i, 0])}
        for i in range(n) for j in range(n)
        if (i - j) % m == 0 and (i - j) % nbar
        for u in range(1, w) if kap[i, 0] == kap[j, u]))


def _c2_conditions(code: ArrayCode, rep: ConditionReport) -> None:
    xi = code.tables["xi"]
    n, w, nbar = code.n, code.w, code.nbar
    pairs = list(combinations(range(n), 2))
    rep.record("i", _first(
        {"i": i, "j": j, "u": u, "v": v, "value": int(xi[i, u])}
        for i, j in pairs
        for u in range(w) for v in range(w)
        if ((i - j) % nbar or u == v) and xi[i, u] == xi[j, v]))
    rep.record("ii", _first(
        {"i": i, "u": u, "v": v, "value": int(xi[i, u])}
        for i in range(n) for u, v in combinations(range(w), 2) if xi[i, u] == xi[i, v]))


def c3_theta(code: ArrayCode) -> np.ndarray:
    """Per node: x_p**w * prod_t lam[p % nbar, t], the scalar of A_p**w."""
    q, w, nbar = code.q, code.w, code.nbar
    lam = code.base.lam
    prod = [1] * nbar
    for i in range(nbar):
        for v in lam[i]:
            prod[i] = prod[i] * int(v) % q
    return np.array([pow(int(code.tables["x"][p]), w, q) * prod[p % nbar] % q
                     for p in range(code.n)], dtype=np.int64)


def _c3_conditions(code: ArrayCode, rep: ConditionReport) -> None:
    theta = c3_theta(code)
    n, nbar = code.n, code.nbar
    wit_i = wit_ii = None
    for f in range(n):
        others = [p for p in range(n) if (p - f) % nbar]
        if wit_i is None:
            wit_i = _first({"failed": f, "p": a, "p2": b, "value": int(theta[a])}
                           for a, b in combinations(others, 2) if theta[a] == theta[b])
        if wit_ii is None:
            wit_ii = _first({"failed": f, "p": p, "value": int(theta[p])}
                            for p in others if theta[p] == theta[f])
    rep.record("i", wit_i)
    rep.record("ii", wit_ii)


def check_conditions(code: ArrayCode) -> ConditionReport:
    """Exhaustive scan of the sufficient conditions for the code's family."""
    fam = getattr(code, "family", None)
    rep = ConditionReport(fam)
    if fam == "C1":
        _c1_conditions(code, rep)
    elif fam in ("C2", "C2P"):
        _c2_conditions(code, rep)
    elif fam == "C3":
        _c3_conditions(code, rep)
    else:
        raise UnknownFamily(f"no condition set for family {fam!r}")
    return rep


def c3_interference_matrix(code: ArrayCode, failed: int, p: int) -> np.ndarray:
    """Reduced (N/w x N/w) matrix B_p with V_{i,0} A_p = B_p V_{i,0}, i = failed % nbar.

    Row b carries x_p * lam[j, b_j'] at column b(j', b_j' + 1 mod w), where
    j = p % nbar and j' is j's digit position once digit i is removed.
    """
    nbar, w, q = code.nbar, code.w, code.q
    i, j = failed % nbar, p % nbar
    if i == j:
        raise ValueError("node is congruent to the failed node")
    jp = j if j < i else j - 1
    m = nbar - 1
    M = w**m
    dig = digit_table(w, m)
    b = np.arange(M)
    bj = dig[:, jp]
    col = b + (((bj + 1) % w) - bj) * w ** (m - 1 - jp)
    out = np.zeros((M, M), dtype=np.int64)
    out[b, col] = int(code.tables["x"][p]) * code.base.lam[j][bj] % q
    return out
