"""Exact dense linear algebra over GF(q) on numpy int64 arrays.

Entries are kept in [0, q).  With q < 2**20 every product fits in 40 bits
and row reductions never overflow int64.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np


class SingularSystem(ArithmeticError):
    pass


class NonCommuting(ValueError):
    pass


class NotUpperTriangular(ValueError):
    pass


def asmat(a, q: int) -> np.ndarray:
    return np.asarray(a, dtype=np.int64) % q


def matmul(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.ndim == 2 and a.shape[1] * (q - 1) ** 2 >= 2**62:
        raise OverflowError("inner dimension too large for int64 accumulation")
    return (a @ b) % q


def matpow(a: np.ndarray, e: int, q: int) -> np.ndarray:
    out = np.eye(a.shape[0], dtype=np.int64)
    base = asmat(a, q)
    while e:
        if e & 1:
            out = matmul(out, base, q)
        base = matmul(base, base, q)
        e >>= 1
    return out


def _inverses(q: int) -> np.ndarray:
    inv = np.zeros(q, dtype=np.int64)
    inv[1:] = [pow(x, -1, q) for x in range(1, q)]
    return inv


_INV_CACHE: dict[int, np.ndarray] = {}


def inverse_table(q: int) -> np.ndarray:
    t = _INV_CACHE.get(q)
    if t is None:
        t = _INV_CACHE[q] = _inverses(q)
    return t


def rref(m: np.ndarray, q: int, ncols: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; pivots searched in the first ``ncols`` columns.

    Pivot choice is deterministic: first nonzero entry at or below the
    current row, columns scanned left to right.
    """
    r = asmat(m, q).copy()
    rows, cols = r.shape
    if ncols is None:
        ncols = cols
    inv = inverse_table(q)
    pivots: list[int] = []
    pr = 0
    for col in range(ncols):
        if pr == rows:
            break
        nz = np.flatnonzero(r[pr:, col])
        if nz.size == 0:
            continue
        p = pr + nz[0]
        if p != pr:
            r[[pr, p]] = r[[p, pr]]
        r[pr] = r[pr] * inv[r[pr, col]] % q
        f = r[:, col].copy()
        f[pr] = 0
        hit = np.flatnonzero(f)
        if hit.size:
            r[hit] = (r[hit] - np.outer(f[hit], r[pr])) % q
        pivots.append(col)
        pr += 1
    return r, pivots


def rank(m: np.ndarray, q: int) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return len(rref(m, q)[1])


def solve(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    """Unique x with a @ x = b; ``b`` may be a vector or a matrix of columns."""
    a = asmat(a, q)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("coefficient matrix must be square")
    b = asmat(b, q)
    vec = b.ndim == 1
    bb = b[:, None] if vec else b
    red, piv = rref(np.hstack([a, bb]), q, ncols=n)
    if len(piv) < n:
        raise SingularSystem(f"rank {len(piv)} < {n}")
    x = red[:, n:]
    return x[:, 0] if vec else x


def inv(a: np.ndarray, q: int) -> np.ndarray:
    a = asmat(a, q)
    return solve(a, np.eye(a.shape[0], dtype=np.int64), q)


def is_nonsingular(a: np.ndarray, q: int) -> bool:
    a = np.asarray(a)
    return a.shape[0] == a.shape[1] and rank(a, q) == a.shape[0]


def assemble(grid) -> np.ndarray:
    """Dense matrix from a nested list of equally sized square blocks."""
    return np.block([[np.asarray(b, dtype=np.int64) for b in row] for row in grid])


def block_vandermonde(blocks, q: int) -> np.ndarray:
    v = len(blocks)
    rows = []
    powers = [np.eye(blocks[0].shape[0], dtype=np.int64) for _ in blocks]
    for _ in range(v):
        rows.append(list(powers))
        powers = [matmul(p, b, q) for p, b in zip(powers, blocks)]
    return assemble(rows)


def is_block_vandermonde_nonsingular(blocks, q: int) -> bool:
    """Pairwise-difference criterion for commuting blocks."""
    blocks = [asmat(b, q) for b in blocks]
    order = blocks[0].shape
    if any(b.shape != order or order[0] != order[1] for b in blocks):
        raise ValueError("blocks must be square and of equal order")
    for x, y in combinations(range(len(blocks)), 2):
        if not np.array_equal(matmul(blocks[x], blocks[y], q), matmul(blocks[y], blocks[x], q)):
            raise NonCommuting(f"blocks {x} and {y} do not commute")
    return all(is_nonsingular((blocks[x] - blocks[y]) % q, q)
               for x, y in combinations(range(len(blocks)), 2))


def is_upper_triangular_family_nonsingular(grid, q: int) -> bool:
    """Sufficient test for an r x r grid of upper-triangular blocks.

    True iff every diagonal position carries ``d_i**t`` in block row t with
    the ``d_i`` pairwise distinct across block columns.
    """
    grid = [[asmat(b, q) for b in row] for row in grid]
    r = len(grid)
    for t, row in enumerate(grid):
        for i, b in enumerate(row):
            if np.any(np.tril(b, -1)):
                raise NotUpperTriangular(f"block ({t}, {i}) has entries below the diagonal")
    if r == 1:
        return bool(np.all(np.diagonal(grid[0][0]) != 0))
    base = [np.diagonal(grid[1][i]) for i in range(r)]
    for t in range(r):
        for i in range(r):
            want = np.array([pow(int(d), t, q) for d in base[i]])
            if not np.array_equal(np.diagonal(grid[t][i]), want):
                return False
    return all(np.all(base[i] != base[j]) for i, j in combinations(range(r), 2))
