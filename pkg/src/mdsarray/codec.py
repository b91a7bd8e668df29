"""Encoding, erasure decoding and MDS checks straight from the parity-check form.

A codeword is an (n, N) array whose row j is node j's column f_j; it is
valid when ``sum_i A[t, i] @ f_i == 0`` for every group t.  Batched
variants take a leading stripe axis.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field as dc_field
from itertools import combinations

import numpy as np

from .gfmatrix import SingularSystem, assemble, inv, rank
from .lift import ArrayCode, as_array_code


class TooManyErasures(ValueError):
    pass


class TooLarge(ValueError):
    pass


class ParityViolation(ValueError):
    pass


_VIEWS: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()
_INVERSES: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def view(code) -> ArrayCode:
    """Array-code view of ``code``, memoised so per-code caches stick."""
    if isinstance(code, ArrayCode):
        return code
    v = _VIEWS.get(code)
    if v is None:
        v = _VIEWS[code] = as_array_code(code)
    return v


@dataclass(eq=False)
class Codeword:
    code: ArrayCode
    columns: np.ndarray  # (n, N)

    def __post_init__(self):
        self.code = view(self.code)
        self.columns = np.asarray(self.columns, dtype=np.int64) % self.code.q
        if self.columns.shape != (self.code.n, self.code.N):
            raise ValueError(f"codeword must have shape {(self.code.n, self.code.N)}")

    def column(self, j: int) -> np.ndarray:
        return self.columns[j]

    def residual(self) -> np.ndarray:
        return parity_residual(self.code, self.columns)

    def is_valid(self) -> bool:
        return not np.any(self.residual())


def sub_block(code, positions) -> np.ndarray:
    """The rN x rN matrix (A[t, p]) over groups t and the given columns."""
    code = view(code)
    return assemble([[code.blocks[t, p] for p in positions] for t in range(code.r)])


def parity_residual(code, columns: np.ndarray) -> np.ndarray:
    """(..., r, N) array of ``sum_i A[t, i] f_i``; zero for codewords."""
    code = view(code)
    f = np.asarray(columns, dtype=np.int64)
    # blocks (r, n, N, N), f (..., n, N) -> (..., r, N)
    out = np.einsum("tiab,...ib->...ta", code.blocks, f) % code.q
    return out


def _positions_inverse(code: ArrayCode, positions: tuple[int, ...]) -> np.ndarray:
    cache = _INVERSES.setdefault(code, {})
    m = cache.get(positions)
    if m is None:
        m = cache[positions] = inv(sub_block(code, positions), code.q)
        m.setflags(write=False)
    return m


def _complete(code: ArrayCode, columns: np.ndarray, unknown: tuple[int, ...]) -> np.ndarray:
    """Fill the ``unknown`` rows of (..., n, N) ``columns`` from the rest."""
    q, N = code.q, code.N
    known = [j for j in range(code.n) if j not in unknown]
    hinv = _positions_inverse(code, unknown)
    f = np.array(columns, dtype=np.int64, copy=True)
    rhs = np.einsum("tiab,...ib->...ta", code.blocks[:, known], f[..., known, :]) % q
    rhs = (-rhs).reshape(*rhs.shape[:-2], code.r * N) % q
    sol = np.einsum("xy,...y->...x", hinv, rhs) % q
    f[..., list(unknown), :] = sol.reshape(*sol.shape[:-1], len(unknown), N)
    return f


def default_parity(code) -> tuple[int, ...]:
    code = view(code)
    return tuple(range(code.k, code.n))


def encode_batch(code, data: np.ndarray, parity_positions=None) -> np.ndarray:
    """(B, k, N) data -> (B, n, N) codewords."""
    code = view(code)
    parity = tuple(sorted(parity_positions)) if parity_positions is not None else default_parity(code)
    if len(parity) != code.r or len(set(parity)) != code.r:
        raise ValueError(f"need {code.r} distinct parity positions")
    data = np.asarray(data, dtype=np.int64) % code.q
    if data.shape[-2:] != (code.k, code.N):
        raise ValueError(f"data must end in shape {(code.k, code.N)}")
    full = np.zeros(data.shape[:-2] + (code.n, code.N), dtype=np.int64)
    dpos = [j for j in range(code.n) if j not in parity]
    full[..., dpos, :] = data
    return _complete(code, full, parity)


def encode(code, data: np.ndarray, parity_positions=None) -> Codeword:
    """Unique codeword carrying ``data`` (k x N) on the non-parity nodes."""
    code = view(code)
    return Codeword(code, encode_batch(code, data, parity_positions))


def decode_batch(code, columns: np.ndarray, erased) -> np.ndarray:
    code = view(code)
    erased = tuple(sorted(set(int(e) for e in erased)))
    if len(erased) > code.r:
        raise TooManyErasures(f"{len(erased)} erasures exceed r = {code.r}")
    if not erased:
        return np.asarray(columns, dtype=np.int64) % code.q
    # pad to exactly r unknowns; the square system then has a unique solution
    extra = [j for j in range(code.n) if j not in erased][: code.r - len(erased)]
    unknown = tuple(sorted(erased + tuple(extra)))
    return _complete(code, columns, unknown)


def decode_erasures(code, columns: np.ndarray, erased) -> Codeword:
    """Complete an (n, N) array whose ``erased`` rows are unknown."""
    code = view(code)
    return Codeword(code, decode_batch(code, columns, erased))


def random_codeword(code, rng: np.random.Generator) -> Codeword:
    code = view(code)
    return encode(code, rng.integers(0, code.q, size=(code.k, code.N)))


@dataclass
class MdsReport:
    patterns: int = 0
    rank_failures: list = dc_field(default_factory=list)
    decode_failures: list = dc_field(default_factory=list)
    modes: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.rank_failures and not self.decode_failures

    @property
    def modes_agree(self) -> bool:
        if len(self.modes) < 2:
            return True
        return sorted(self.rank_failures) == sorted(self.decode_failures)

    def __bool__(self) -> bool:
        return self.ok

    def as_dict(self) -> dict:
        return {"ok": self.ok, "patterns": self.patterns, "modes": list(self.modes),
                "modes_agree": self.modes_agree,
                "rank_failures": [list(p) for p in self.rank_failures],
                "decode_failures": [list(p) for p in self.decode_failures]}


def verify_mds(code, mode: str = "both", seed: int = 0, max_n: int = 16,
               max_N: int = 64) -> MdsReport:
    """Exhaustive check over all r-subsets of nodes.

    ``rank`` tests each r x r sub-block for full rank; ``decode`` erases
    each pattern from a random codeword and recovers it; ``both`` runs the
    two independently.
    """
    code = view(code)
    if code.n > max_n or code.N > max_N:
        raise TooLarge(f"exhaustive check limited to n <= {max_n}, N <= {max_N}")
    modes = ("rank", "decode") if mode == "both" else (mode,)
    if any(m not in ("rank", "decode") for m in modes):
        raise ValueError(f"unknown mode {mode!r}")
    rep = MdsReport(modes=modes)
    cw = None
    if "decode" in modes:
        rng = np.random.default_rng(seed)
        data = rng.integers(0, code.q, size=(code.k, code.N))
        # systematic encoding itself needs one nonsingular pattern
        try:
            cw = encode(code, data).columns
        except SingularSystem:
            cw = None
    for pat in combinations(range(code.n), code.r):
        rep.patterns += 1
        if "rank" in modes:
            if rank(sub_block(code, pat), code.q) != code.r * code.N:
                rep.rank_failures.append(pat)
        if "decode" in modes:
            if cw is None:
                rep.decode_failures.append(pat)
                continue
            damaged = cw.copy()
            damaged[list(pat)] = 0
            try:
                ok = np.array_equal(decode_batch(code, damaged, pat), cw)
            except SingularSystem:
                ok = False
            if not ok:
                rep.decode_failures.append(pat)
    return rep


def verify_optimal_update(code) -> bool:
    """True iff every parity block is diagonal."""
    b = view(code).blocks
    off = b.copy()
    idx = np.arange(b.shape[-1])
    off[..., idx, idx] = 0
    return not np.any(off)
