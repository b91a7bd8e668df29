"""Generic lift of a base MSR code to length n = s * nbar.

Parity blocks become ``x[t, j] * Abar[t, j % nbar]``; repair and select
matrices are inherited from the base node ``i % nbar`` except that nodes
congruent to the failed one (the compulsory helpers) are downloaded whole.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .digits import Selector
from .gf import FieldSpec
from .msrbase import MsrCode


class ZeroCoefficient(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LiftSpec:
    s: int  # 0 means: infer from the width of x
    x: np.ndarray  # (r, s * nbar)

    @classmethod
    def power_form(cls, xs, r: int, q: int) -> "LiftSpec":
        """``x[t, i] = xs[i]**t``."""
        xs = [int(v) % q for v in xs]
        tab = np.array([[pow(v, t, q) for v in xs] for t in range(r)], dtype=np.int64)
        return cls(0, tab)

    @classmethod
    def trivial(cls, s: int, n: int, r: int) -> "LiftSpec":
        return cls(s, np.ones((r, n), dtype=np.int64))


@dataclass(frozen=True, eq=False)
class ArrayCode:
    """An (n, k) array code in parity-check form with a lifted repair schema."""

    family: str
    n: int
    r: int
    w: int
    nbar: int
    field: FieldSpec
    blocks: np.ndarray = dc_field(repr=False)  # (r, n, N, N)
    schema: tuple[Selector, ...] = dc_field(repr=False)  # indexed by base node
    base: MsrCode | None = dc_field(default=None, repr=False)
    lift: LiftSpec | None = dc_field(default=None, repr=False)
    tables: dict = dc_field(default_factory=dict, repr=False)

    @property
    def s(self) -> int:
        return self.n // self.nbar

    @property
    def k(self) -> int:
        return self.n - self.r

    @property
    def N(self) -> int:
        return self.blocks.shape[2]

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def d(self) -> int:
        # n - nbar + dbar with dbar = kbar + w - 1
        return self.k + self.w - 1

    @property
    def dc(self) -> int:
        return self.s - 1

    def block(self, t: int, i: int) -> np.ndarray:
        return self.blocks[t, i]

    def repair_matrix(self, i: int, j: int) -> Selector:
        if i == j:
            raise ValueError("repair matrix undefined for j == i")
        if (j - i) % self.nbar == 0:
            return Selector.identity(self.N)
        return self.schema[i % self.nbar]

    def select_matrix(self, i: int, t: int) -> Selector:
        return self.schema[i % self.nbar]

    def params(self) -> dict:
        return {"family": self.family, "n": self.n, "k": self.k, "r": self.r,
                "w": self.w, "nbar": self.nbar, "s": self.s, "N": self.N,
                "d": self.d, "dc": self.dc, "q": self.q, "c": self.field.c}


def lift(base: MsrCode, spec: LiftSpec, family: str | None = None) -> ArrayCode:
    x = np.asarray(spec.x, dtype=np.int64) % base.q
    s = spec.s or x.shape[-1] // base.nbar
    if s < 1:
        raise ShapeMismatch("replication factor must be >= 1")
    n = s * base.nbar
    if x.shape != (base.r, n):
        raise ShapeMismatch(f"x table must have shape {(base.r, n)}, got {x.shape}")
    if np.any(x == 0):
        t, j = map(int, np.argwhere(x == 0)[0])
        raise ZeroCoefficient(f"x[{t}, {j}] is zero")
    idx = np.arange(n) % base.nbar
    blocks = base.blocks[:, idx] * x[:, :, None, None] % base.q
    blocks.setflags(write=False)
    x.setflags(write=False)
    return ArrayCode(family or f"lift({base.family})", n, base.r, base.w, base.nbar,
                     base.field, blocks, base.schema, base, LiftSpec(s, x))


def as_array_code(code) -> ArrayCode:
    """View a base code as its own identity lift."""
    if isinstance(code, ArrayCode):
        return code
    return lift(code, LiftSpec.trivial(1, code.nbar, code.r), family=code.family)


def compulsory_helpers(code: ArrayCode, i: int) -> list[int]:
    if not 0 <= i < code.n:
        raise ValueError(f"node {i} out of range")
    return [j for j in range(i % code.nbar, code.n, code.nbar) if j != i]


@dataclass(frozen=True)
class Bandwidth:
    ratio: Fraction
    gamma: Fraction
    gamma_optimal: Fraction


def repair_ratio(n: int, r: int, w: int, s: int) -> Fraction:
    """1 + d_c (d - k) / d with d = k + w - 1 and d_c = s - 1."""
    k = n - r
    d = k + w - 1
    return 1 + Fraction((s - 1) * (d - k), d)


def bandwidth_ratio(code) -> Bandwidth:
    """Exact repair bandwidth, the cut-set optimum and their ratio."""
    code = as_array_code(code)
    d, k, dc, N = code.d, code.k, code.dc, code.N
    gamma = Fraction((d - dc) * N, d - k + 1) + dc * N
    opt = Fraction(d * N, d - k + 1)
    ratio = repair_ratio(code.n, code.r, code.w, code.s)
    assert gamma / opt == ratio
    return Bandwidth(ratio, gamma, opt)
