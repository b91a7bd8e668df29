"""w-ary index calculus over [0, w**m).

Digit vectors are most-significant first: ``a = sum_j w**(m-1-j) * a_j``.
Row-selection matrices are kept as index arrays, never densified unless
asked for.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def expand(a: int, w: int, m: int) -> tuple[int, ...]:
    _check(0 <= a < w**m, f"index {a} out of range for w={w}, m={m}")
    out = [0] * m
    for j in range(m - 1, -1, -1):
        a, out[j] = divmod(a, w)
    return tuple(out)


def compose(digits, w: int) -> int:
    a = 0
    for d in digits:
        _check(0 <= d < w, f"digit {d} out of range for w={w}")
        a = a * w + d
    return a


def digit(a: int, i: int, w: int, m: int) -> int:
    """The i-th digit of ``a`` (position 0 most significant)."""
    return (a // w ** (m - 1 - i)) % w


def replace_digit(a: int, i: int, u: int, w: int, m: int) -> int:
    """``a(i, u)``: ``a`` with its i-th digit set to ``u``."""
    _check(0 <= a < w**m, f"index {a} out of range")
    _check(0 <= i < m, f"position {i} out of range")
    _check(0 <= u < w, f"digit {u} out of range")
    p = w ** (m - 1 - i)
    return a + (u - (a // p) % w) * p


def insert_digit(a: int, i: int, u: int, w: int, m: int) -> int:
    """``g_{i,u}(a)``: insert ``u`` at position i of an (m-1)-digit index."""
    _check(0 <= a < w ** (m - 1), f"index {a} out of range")
    _check(0 <= i < m, f"position {i} out of range")
    _check(0 <= u < w, f"digit {u} out of range")
    low = w ** (m - 1 - i)
    hi, lo = divmod(a, low)
    return (hi * w + u) * low + lo


def digit_add(u: int, v: int, w: int) -> int:
    return (u + v) % w


@lru_cache(maxsize=None)
def digit_table(w: int, m: int) -> np.ndarray:
    """Array of shape (w**m, m): row a holds the digits of a."""
    a = np.arange(w**m)
    cols = [(a // w ** (m - 1 - j)) % w for j in range(m)]
    t = np.stack(cols, axis=1) if m else np.zeros((1, 0), dtype=np.int64)
    t.setflags(write=False)
    return t


@lru_cache(maxsize=None)
def insert_table(i: int, u: int, w: int, m: int) -> np.ndarray:
    """Vectorised ``g_{i,u}`` over all of [0, w**(m-1))."""
    a = np.arange(w ** (m - 1))
    low = w ** (m - 1 - i)
    out = ((a // low) * w + u) * low + a % low
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Selector:
    """Sum-of-row-selections: row ``a`` is ``sum_g e_{cols[a, g]}``.

    A single group is a plain row selector (``V_{i,t}``); ``w`` groups with
    disjoint supports give ``V_{i,0} + ... + V_{i,w-1}``; the identity is
    one group with ``cols[a, 0] = a``.
    """

    cols: np.ndarray  # (rows, groups), int
    width: int

    def __post_init__(self):
        c = np.asarray(self.cols, dtype=np.int64)
        if c.ndim == 1:
            c = c[:, None]
        flat = c.ravel()
        if flat.size and (flat.min() < 0 or flat.max() >= self.width):
            raise ValueError("selector column out of range")
        if np.unique(flat).size != flat.size:
            raise ValueError("selector supports must be disjoint")
        c.setflags(write=False)
        object.__setattr__(self, "cols", c)

    @property
    def rows(self) -> int:
        return self.cols.shape[0]

    @property
    def rank(self) -> int:
        # disjoint nonempty supports => independent rows
        return self.rows

    @property
    def nonzero_columns(self) -> int:
        return self.cols.size

    @property
    def is_identity(self) -> bool:
        return self.cols.shape == (self.width, 1) and bool(
            np.array_equal(self.cols[:, 0], np.arange(self.width)))

    def apply(self, x: np.ndarray, q: int) -> np.ndarray:
        """Selector times ``x`` (vector, or matrix acting on its rows)."""
        x = np.asarray(x)
        return x[self.cols].sum(axis=1) % q

    def dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.width), dtype=np.int64)
        for g in range(self.cols.shape[1]):
            out[np.arange(self.rows), self.cols[:, g]] = 1
        return out

    def row_indices(self) -> list[int]:
        if self.cols.shape[1] != 1:
            raise ValueError("not a single row selector")
        return self.cols[:, 0].tolist()

    @classmethod
    def identity(cls, n: int) -> "Selector":
        return cls(np.arange(n)[:, None], n)


def partition_selector(i: int, t: int, w: int, m: int) -> Selector:
    """``V_{i,t}``: rows e_a with a_i = t, a ascending."""
    _check(0 <= i < m, f"position {i} out of range")
    _check(0 <= t < w, f"digit {t} out of range")
    return Selector(insert_table(i, t, w, m)[:, None], w**m)


def aggregate_selector(i: int, w: int, m: int) -> Selector:
    """``V_{i,0} + V_{i,1} + ... + V_{i,w-1}``."""
    _check(0 <= i < m, f"position {i} out of range")
    cols = np.stack([insert_table(i, u, w, m) for u in range(w)], axis=1)
    return Selector(cols, w**m)
