"""Single-node repair with d helpers, d_c of them compulsory.

The engine is family agnostic.  For each group t the failed node's
equations are compressed by S = S_{i,t}; every non-congruent node j enters
through a factor B with B R_{i,j} = S A_{t,j}.  Unknowns are f_i and
R_{i,l} f_l for the avoided nodes l, which gives a square system of size
r N / w.  Solving it once per plan yields a linear operator from the
downloaded symbols to f_i, which is then applied to any number of stripes.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .codec import ParityViolation, encode, parity_residual, view
from .digits import Selector, aggregate_selector
from .gfmatrix import SingularSystem, rank, solve
from .lift import ArrayCode, bandwidth_ratio, compulsory_helpers


class InvalidAvoidSet(ValueError):
    pass


class NoFactorization(ArithmeticError):
    pass


class RankDeficient(ArithmeticError):
    def __init__(self, msg: str, witness: dict):
        super().__init__(msg)
        self.witness = witness


@dataclass(frozen=True, eq=False)
class RepairPlan:
    code: ArrayCode = dc_field(repr=False)
    failed: int
    helpers: tuple[int, ...]
    avoid: tuple[int, ...]
    compulsory: tuple[int, ...]

    def repair_matrix(self, j: int) -> Selector:
        return self.code.repair_matrix(self.failed, j)

    def select_matrix(self, t: int) -> Selector:
        return self.code.select_matrix(self.failed, t)

    @property
    def key(self) -> tuple:
        return (self.failed, self.avoid)


@dataclass(frozen=True)
class RepairReport:
    failed: int
    helpers: tuple[int, ...]
    avoided: tuple[int, ...]
    downloaded_symbols: int
    accessed_columns: int
    gamma_optimal: Fraction
    per_helper: dict = dc_field(default_factory=dict)

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.downloaded_symbols) / self.gamma_optimal

    @property
    def access_ratio(self) -> Fraction:
        return Fraction(self.accessed_columns) / self.gamma_optimal

    def as_dict(self) -> dict:
        g = self.gamma_optimal
        return {"failed": self.failed, "helpers": list(self.helpers),
                "avoided": list(self.avoided),
                "downloaded_symbols": self.downloaded_symbols,
                "accessed_columns": self.accessed_columns,
                "gamma_optimal": int(g) if g.denominator == 1 else str(g),
                "ratio_num": self.ratio.numerator, "ratio_den": self.ratio.denominator}


def admissible_avoid(code, failed: int) -> list[int]:
    code = view(code)
    return [j for j in range(code.n) if (j - failed) % code.nbar]


def plan_repair(code, failed: int, avoid=None) -> RepairPlan:
    code = view(code)
    if not 0 <= failed < code.n:
        raise ValueError(f"node {failed} out of range")
    size = code.r - code.w
    comp = compulsory_helpers(code, failed)
    if avoid is None:
        avoid = admissible_avoid(code, failed)[:size]
    avoid = tuple(sorted(set(int(a) for a in avoid)))
    if len(avoid) != size:
        raise InvalidAvoidSet(f"avoid set must have {size} nodes, got {len(avoid)}")
    for a in avoid:
        if not 0 <= a < code.n or a == failed:
            raise InvalidAvoidSet(f"node {a} cannot be avoided")
        if a in comp:
            raise InvalidAvoidSet(f"node {a} is a compulsory helper")
        if (a - failed) % code.nbar == 0:
            raise InvalidAvoidSet(f"node {a} is congruent to the failed node")
    helpers = tuple(j for j in range(code.n) if j != failed and j not in avoid)
    return RepairPlan(code, failed, helpers, avoid, tuple(comp))


def _times_selector(b: np.ndarray, sel: Selector, q: int) -> np.ndarray:
    """Dense ``b @ sel`` without building the selector."""
    out = np.zeros((b.shape[0], sel.width), dtype=np.int64)
    for g in range(sel.cols.shape[1]):
        out[:, sel.cols[:, g]] += b
    return out % q


def factor_interference(code, plan: RepairPlan, j: int, t: int) -> np.ndarray:
    """B with B R_{i,j} = S_{i,t} A_{t,j}; raises NoFactorization otherwise."""
    code = view(code)
    if (j - plan.failed) % code.nbar == 0:
        raise ValueError("factor undefined for nodes congruent to the failed one")
    R = plan.repair_matrix(j)
    sa = plan.select_matrix(t).apply(code.blocks[t, j], code.q)
    # supports are disjoint, so the first column of each row isolates it
    b = sa[:, R.cols[:, 0]]
    if not np.array_equal(_times_selector(b, R, code.q), sa):
        raise NoFactorization(f"no factor for node {j}, group {t}, failed {plan.failed}")
    return b


@dataclass(frozen=True, eq=False)
class RepairOperator:
    plan: RepairPlan
    matrix: np.ndarray  # (N, gamma): downloaded symbols -> f_i
    offsets: dict  # helper -> slice into the download vector


_OPERATORS: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def repair_system(plan: RepairPlan):
    """(M, C, offsets): M [f_i; y_L] = C [downloads]."""
    code, q, N, r = plan.code, plan.code.q, plan.code.N, plan.code.r
    i = plan.failed
    rows = plan.select_matrix(0).rows
    offsets, pos = {}, 0
    for j in plan.helpers:
        size = plan.repair_matrix(j).rows
        offsets[j] = slice(pos, pos + size)
        pos += size
    gamma = pos
    ycols, ypos = {}, N
    for l in plan.avoid:
        ycols[l] = slice(ypos, ypos + plan.repair_matrix(l).rows)
        ypos = ycols[l].stop
    if ypos != r * rows:
        raise SingularSystem(f"repair system is {r * rows} x {ypos}, not square")
    M = np.zeros((r * rows, ypos), dtype=np.int64)
    C = np.zeros((r * rows, gamma), dtype=np.int64)
    for t in range(r):
        S = plan.select_matrix(t)
        er = slice(t * rows, (t + 1) * rows)
        M[er, :N] = S.apply(code.blocks[t, i], q)
        for l in plan.avoid:
            M[er, ycols[l]] = factor_interference(code, plan, l, t)
        for j in plan.helpers:
            if j in plan.compulsory:
                C[er, offsets[j]] = (-S.apply(code.blocks[t, j], q)) % q
            else:
                C[er, offsets[j]] = (-factor_interference(code, plan, j, t)) % q
    return M, C, offsets


def repair_operator(plan: RepairPlan) -> RepairOperator:
    cache = _OPERATORS.setdefault(plan.code, {})
    op = cache.get(plan.key)
    if op is None:
        M, C, offsets = repair_system(plan)
        sol = solve(M, C, plan.code.q)
        mat = np.ascontiguousarray(sol[: plan.code.N])
        mat.setflags(write=False)
        op = cache[plan.key] = RepairOperator(plan, mat, offsets)
    return op


def download(plan: RepairPlan, columns: np.ndarray) -> np.ndarray:
    """Symbols sent by the helpers, concatenated in helper order; (..., gamma)."""
    q = plan.code.q
    cols = np.asarray(columns, dtype=np.int64)
    parts = []
    for j in plan.helpers:
        R = plan.repair_matrix(j)
        fj = cols[..., j, :]
        parts.append(fj[..., R.cols].sum(axis=-1) % q)
    return np.concatenate(parts, axis=-1)


def report_for(plan: RepairPlan) -> RepairReport:
    per = {}
    gamma = access = 0
    for j in plan.helpers:
        R = plan.repair_matrix(j)
        per[j] = {"symbols": R.rank, "accessed": R.nonzero_columns}
        gamma += R.rank
        access += R.nonzero_columns
    opt = bandwidth_ratio(plan.code).gamma_optimal
    return RepairReport(plan.failed, plan.helpers, plan.avoid, gamma, access, opt, per)


def repair_batch(plan: RepairPlan, columns: np.ndarray) -> np.ndarray:
    """Regenerate f_i for every stripe of a (B, n, N) array."""
    op = repair_operator(plan)
    d = download(plan, columns)
    return np.einsum("ag,...g->...a", op.matrix, d) % plan.code.q


def execute_repair(codeword, plan: RepairPlan, check: bool = True):
    """Regenerate the failed column of ``codeword``; returns (column, report).

    The failed column's stored value is never read.
    """
    cols = np.asarray(codeword.columns)
    if check:
        # the failed node is unavailable, so test parity after completing
        # it from the same data the repair would use
        probe = cols.copy()
        probe[plan.failed] = repair_batch(plan, cols)
        if np.any(parity_residual(plan.code, probe)):
            raise ParityViolation("helper data is not consistent with any codeword")
        return probe[plan.failed], report_for(plan)
    return repair_batch(plan, cols), report_for(plan)


@dataclass
class RepairSuiteReport:
    checks: int = 0
    passes: int = 0
    failures: list = dc_field(default_factory=list)
    ratios: set = dc_field(default_factory=set)
    access_ratios: set = dc_field(default_factory=set)
    gammas: set = dc_field(default_factory=set)

    @property
    def ok(self) -> bool:
        return self.checks > 0 and self.passes == self.checks

    def __bool__(self) -> bool:
        return self.ok

    def as_dict(self) -> dict:
        return {"ok": self.ok, "checks": self.checks, "passes": self.passes,
                "failures": self.failures,
                "ratios": sorted(str(r) for r in self.ratios),
                "access_ratios": sorted(str(r) for r in self.access_ratios),
                "gammas": sorted(self.gammas)}


def verify_repair_all(code, seed: int = 0, max_n: int = 16, max_N: int = 64) -> RepairSuiteReport:
    """Every failed node against every admissible avoid set on a random codeword."""
    code = view(code)
    if code.n > max_n or code.N > max_N:
        raise ValueError(f"exhaustive repair check limited to n <= {max_n}, N <= {max_N}")
    rng = np.random.default_rng(seed)
    rep = RepairSuiteReport()
    try:
        cw = encode(code, rng.integers(0, code.q, size=(code.k, code.N)))
    except SingularSystem as e:
        rep.failures.append({"error": "SingularSystem", "detail": f"encoding failed: {e}"})
        return rep
    expect = bandwidth_ratio(code)
    for i in range(code.n):
        for avoid in combinations(admissible_avoid(code, i), code.r - code.w):
            rep.checks += 1
            wit = {"failed": i, "avoid": list(avoid)}
            try:
                plan = plan_repair(code, i, avoid)
                col, r = execute_repair(cw, plan, check=False)
            except (SingularSystem, NoFactorization) as e:
                rep.failures.append({**wit, "error": type(e).__name__, "detail": str(e)})
                continue
            rep.ratios.add(r.ratio)
            rep.access_ratios.add(r.access_ratio)
            rep.gammas.add(r.downloaded_symbols)
            if not np.array_equal(col, cw.columns[i]):
                rep.failures.append({**wit, "error": "wrong column"})
            elif r.ratio != expect.ratio:
                rep.failures.append({**wit, "error": f"ratio {r.ratio} != {expect.ratio}"})
            else:
                rep.passes += 1
    return rep


def aggregate_projection(column, i: int, w: int, m: int, q: int | None = None) -> np.ndarray:
    """mu values: entry b is sum_u f[g_{i,u}(b)], the data in (sum_u V_{i,u}) f."""
    col = np.asarray(column, dtype=np.int64)
    if col.shape != (w**m,):
        raise ValueError(f"column must have length {w**m}")
    out = col[aggregate_selector(i, w, m).cols].sum(axis=1)
    return out % q if q else out


def _poly_from_roots(roots, q: int) -> list[int]:
    """Coefficients, constant term first, of prod (x - root)."""
    p = [1]
    for z in roots:
        nxt = [0] * (len(p) + 1)
        for k, c in enumerate(p):
            nxt[k + 1] = (nxt[k + 1] + c) % q
            nxt[k] = (nxt[k] - z * c) % q
        p = nxt
    return p


def annihilator_matrix(xi_failed, r: int, q: int) -> np.ndarray:
    """Rows are x**k * p0(x), k < r - w, as length-r coefficient vectors."""
    p0 = _poly_from_roots([int(v) for v in xi_failed], q)
    w = len(p0) - 1
    P = np.zeros((max(r - w, 0), r), dtype=np.int64)
    for k in range(r - w):
        P[k, k:k + w + 1] = p0
    return P


def annihilator_check(code, failed: int) -> bool:
    """Oracle for the diagonal families: P kills the failed node's powers and
    P M has full rank r - w, on every (r - w)-subset of columns, for every
    digit vector.  Raises RankDeficient with a witness otherwise."""
    code = view(code)
    if "xi" not in code.tables:
        raise ValueError("annihilator check needs a xi table (C2 or C2')")
    q, r, w, nbar = code.q, code.r, code.w, code.nbar
    xi = code.tables["xi"]
    P = annihilator_matrix(xi[failed], r, q)
    if P.shape[0] == 0:
        return True
    t = np.arange(r)
    vand = np.array([[pow(int(v), int(k), q) for v in xi[failed]] for k in t], dtype=np.int64)
    if np.any(P @ vand % q):
        raise RankDeficient("P does not annihilate the failed node", {"failed": failed})
    others = [j for j in range(code.n) if (j - failed) % nbar]
    from .digits import digit_table
    dig = digit_table(w, nbar)
    size = r - w
    for a in range(w**nbar):
        vals = [int(xi[j, dig[a, j % nbar]]) for j in others]
        M = np.array([[pow(v, int(k), q) for v in vals] for k in t], dtype=np.int64)
        PM = P @ M % q
        if rank(PM, q) != size:
            raise RankDeficient("rank(PM) < r - w", {"failed": failed, "a": a})
        for sub in combinations(range(len(others)), size):
            if rank(PM[:, list(sub)], q) != size:
                raise RankDeficient("singular column subset",
                                    {"failed": failed, "a": a,
                                     "nodes": [others[s] for s in sub]})
    return True
