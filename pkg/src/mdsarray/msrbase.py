"""Base MSR codes with repair degree k+w-1 < n-1.

Three constructions, all in parity-check form with row-selection repair
and select matrices:

* ``C0``  -- n = 2m, N = w**m, upper-triangular parity blocks.
* ``YB1`` -- N = w**n, diagonal blocks (optimal update).
* ``YB2`` -- N = w**n, generalized-permutation blocks (optimal access).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .digits import Selector, aggregate_selector, digit_table, partition_selector
from .gf import FieldSpec, resolve_field
from .gfmatrix import matmul, rank


class InvalidParams(ValueError):
    pass


class DuplicateLambda(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MsrCode:
    family: str
    nbar: int
    r: int
    w: int
    m: int  # number of digits in a row index; N = w**m
    field: FieldSpec
    lam: np.ndarray  # (nbar, w)
    blocks: np.ndarray = dc_field(repr=False)  # (r, nbar, N, N)
    schema: tuple[Selector, ...] = dc_field(repr=False)  # R_{i,j} = S_{i,t} for node i

    @property
    def kbar(self) -> int:
        return self.nbar - self.r

    @property
    def dbar(self) -> int:
        return self.kbar + self.w - 1

    @property
    def N(self) -> int:
        return self.w**self.m

    @property
    def q(self) -> int:
        return self.field.q

    def block(self, t: int, i: int) -> np.ndarray:
        return self.blocks[t, i]

    def repair_matrix(self, i: int, j: int) -> Selector:
        if i == j:
            raise ValueError("repair matrix undefined for j == i")
        return self.schema[i]

    def select_matrix(self, i: int, t: int) -> Selector:
        return self.schema[i]

    def params(self) -> dict:
        return {"family": self.family, "nbar": self.nbar, "kbar": self.kbar, "r": self.r,
                "w": self.w, "m": self.m, "dbar": self.dbar, "N": self.N,
                "q": self.q, "c": self.field.c}


def _check_params(nbar: int, w: int, r: int) -> None:
    if not (2 <= w < r < nbar):
        raise InvalidParams(f"need 2 <= w < r < nbar, got w={w}, r={r}, nbar={nbar}")


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def c0_bound(m: int, w: int) -> int:
    return m * (w + 2) if w == 2 else m * (w + 1)


def c0_lambda(m: int, w: int, field: FieldSpec) -> np.ndarray:
    """Two-case coefficient assignment for C0 (w = 2 versus w >= 3)."""
    lam = np.zeros((2 * m, w), dtype=np.int64)
    for i in range(m):
        for u in range(w):
            if w == 2:
                lam[i, u] = field.cpow(i * (w + 2) + u)
                lam[i + m, u] = field.cpow(i * (w + 2) + w + u)
            else:
                lam[i, u] = field.cpow(i * (w + 1) + u)
                if u == 0:
                    lam[i + m, u] = field.cpow(i * (w + 1) + w)
                else:
                    lam[i + m, u] = field.cpow(i * (w + 1) + u % (w - 1) + 1)
    return lam


def c0_block(lam: np.ndarray, t: int, i: int, m: int, w: int, q: int) -> np.ndarray:
    """Entry table of the C0 parity block for group t, node i."""
    N = w**m
    dig = digit_table(w, m)
    lt = np.array([pow(int(x), t, q) for x in lam[i]], dtype=np.int64)
    a = np.arange(N)
    out = np.zeros((N, N), dtype=np.int64)
    if i < m:
        out[a, a] = lt[dig[:, i]]
        base = a[dig[:, i] == 0]
        p = w ** (m - 1 - i)
        for u in range(1, w):
            out[base, base + u * p] = (lt[0] - lt[u]) % q
    else:
        out[a, a] = lt[dig[:, i - m]]
    return out


def build_c0(m: int, w: int, r: int, field: FieldSpec | None = None,
             lam: np.ndarray | None = None) -> MsrCode:
    """The (2m, 2m-r) code with N = w**m."""
    nbar = 2 * m
    if not (2 <= w < r <= nbar - 1):
        raise InvalidParams(f"need 2 <= w < r <= 2m-1, got m={m}, w={w}, r={r}")
    if field is None:
        field = resolve_field(c0_bound(m, w))
    q = field.q
    lam = c0_lambda(m, w, field) if lam is None else np.asarray(lam, dtype=np.int64) % q
    if lam.shape != (nbar, w):
        raise InvalidParams("lambda table must have shape (2m, w)")
    blocks = np.stack([np.stack([c0_block(lam, t, i, m, w, q) for i in range(nbar)])
                       for t in range(r)])
    schema = tuple(partition_selector(i, 0, w, m) if i < m else aggregate_selector(i - m, w, m)
                   for i in range(nbar))
    return MsrCode("C0", nbar, r, w, m, field, _freeze(lam), _freeze(blocks), schema)


def yb1_lambda(nbar: int, w: int, field: FieldSpec) -> np.ndarray:
    return np.array([[field.cpow(i * w + u) for u in range(w)] for i in range(nbar)],
                    dtype=np.int64)


def yb1_base_matrix(lam_row: np.ndarray, i: int, w: int, m: int) -> np.ndarray:
    dig = digit_table(w, m)
    return np.diag(np.asarray(lam_row, dtype=np.int64)[dig[:, i]])


def _power_blocks(base: list[np.ndarray], r: int, q: int) -> np.ndarray:
    N = base[0].shape[0]
    out = np.empty((r, len(base), N, N), dtype=np.int64)
    for i, b in enumerate(base):
        p = np.eye(N, dtype=np.int64)
        for t in range(r):
            out[t, i] = p
            p = matmul(p, b, q)
    return out


def build_yb1(nbar: int, w: int, r: int, field: FieldSpec | None = None,
              lam: np.ndarray | None = None, strict: bool = True) -> MsrCode:
    """Diagonal-block code; ``lam`` may be injected (the default is c**(iw+u)).

    ``strict=False`` skips the distinctness check, for use inside lifts whose
    own conditions replace it.
    """
    _check_params(nbar, w, r)
    if field is None:
        field = resolve_field(w * nbar)
    q = field.q
    lam = yb1_lambda(nbar, w, field) if lam is None else np.asarray(lam, dtype=np.int64) % q
    if lam.shape != (nbar, w):
        raise InvalidParams("lambda table must have shape (nbar, w)")
    flat = lam.ravel().tolist()
    if 0 in flat or (strict and len(set(flat)) != len(flat)):
        raise DuplicateLambda("the w*nbar coefficients must be distinct and nonzero")
    base = [yb1_base_matrix(lam[i], i, w, nbar) for i in range(nbar)]
    schema = tuple(aggregate_selector(i, w, nbar) for i in range(nbar))
    return MsrCode("YB1", nbar, r, w, nbar, field, _freeze(lam),
                   _freeze(_power_blocks(base, r, q)), schema)


def yb2_lambda(nbar: int, w: int, field: FieldSpec) -> np.ndarray:
    lam = np.ones((nbar, w), dtype=np.int64)
    for i in range(nbar):
        lam[i, 0] = field.cpow(i + 1)
    return lam


def yb2_base_matrix(lam_row: np.ndarray, i: int, w: int, m: int) -> np.ndarray:
    """Row a carries lam[a_i] in column a(i, a_i + 1 mod w)."""
    N = w**m
    dig = digit_table(w, m)
    a = np.arange(N)
    ai = dig[:, i]
    p = w ** (m - 1 - i)
    col = a + (((ai + 1) % w) - ai) * p
    out = np.zeros((N, N), dtype=np.int64)
    out[a, col] = np.asarray(lam_row, dtype=np.int64)[ai]
    return out


def build_yb2(nbar: int, w: int, r: int, field: FieldSpec | None = None) -> MsrCode:
    _check_params(nbar, w, r)
    if field is None:
        field = resolve_field(nbar)
    q = field.q
    lam = yb2_lambda(nbar, w, field)
    base = [yb2_base_matrix(lam[i], i, w, nbar) for i in range(nbar)]
    schema = tuple(partition_selector(i, 0, w, nbar) for i in range(nbar))
    return MsrCode("YB2", nbar, r, w, nbar, field, _freeze(lam),
                   _freeze(_power_blocks(base, r, q)), schema)


def base_matrix(code: MsrCode, i: int) -> np.ndarray:
    """The matrix whose powers give the parity blocks (YB codes only)."""
    if code.family == "YB1":
        return yb1_base_matrix(code.lam[i], i, code.w, code.m)
    if code.family == "YB2":
        return yb2_base_matrix(code.lam[i], i, code.w, code.m)
    raise ValueError("C0 blocks are not powers of a single matrix")


def check_r1(code, i: int) -> bool:
    """Stacked select-times-parity blocks of node i have rank N."""
    stacked = np.vstack([code.select_matrix(i, t).apply(code.block(t, i), code.q)
                         for t in range(code.r)])
    return rank(stacked, code.q) == code.N


def check_r2(code, i: int, j: int) -> bool:
    """Interference from node j is a function of its downloaded data."""
    R = code.repair_matrix(i, j)
    base = R.rank
    dense = R.dense()
    for t in range(code.r):
        sa = code.select_matrix(i, t).apply(code.block(t, j), code.q)
        if rank(np.vstack([dense, sa]), code.q) != base:
            return False
    return True


def c0_interference(code: MsrCode, t: int, j: int, i: int) -> np.ndarray:
    """Closed-form (N/w x N/w) factor with S_{i,t} A_{t,j} = B R_{i,j} for C0.

    Kept independent of the numeric factorization so each checks the other.
    """
    if code.family != "C0":
        raise ValueError("closed form only for C0")
    if i == j:
        raise ValueError("factor undefined for j == i")
    m, w, q = code.m, code.w, code.q
    ip = i % m
    M = w ** (m - 1)
    lt = np.array([pow(int(x), t, q) for x in code.lam[j]], dtype=np.int64)
    if j % m == ip:
        return lt[0] * np.eye(M, dtype=np.int64) % q
    dig = digit_table(w, m - 1)
    a = np.arange(M)
    if j < m:
        pos = j if j < ip else j - 1
    else:
        pos = j - m if j < m + ip else j - m - 1
    out = np.zeros((M, M), dtype=np.int64)
    out[a, a] = lt[dig[:, pos]]
    if j < m:
        base = a[dig[:, pos] == 0]
        p = w ** (m - 2 - pos)
        for u in range(1, w):
            out[base, base + u * p] = (lt[0] - lt[u]) % q
    return out
