"""In-memory storage cluster simulator with optional on-disk persistence.

Objects are packed into field symbols, cut into stripes of k * N symbols,
encoded and spread over n nodes.  Every repair meters the symbols each
helper ships; the ledger keeps one entry per (repair, helper).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .codec import TooManyErasures, decode_batch, encode_batch, view
from .config import CodeSpec
from .lift import bandwidth_ratio
from .repair import RepairReport, plan_repair, repair_batch, report_for

MAGIC = b"MDSA"
VERSION = 1
_HEADER = struct.Struct("<4sBQII")


class NodeDown(RuntimeError):
    pass


class TwoFailures(RuntimeError):
    pass


class UnknownObject(KeyError):
    pass


class FormatError(ValueError):
    pass


def symbol_bits(q: int) -> int:
    return q.bit_length() - 1


def pack(payload: bytes, q: int) -> np.ndarray:
    """Bytes to symbols: little-endian groups of floor(log2 q) bits."""
    b = symbol_bits(q)
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8), bitorder="little")
    pad = (-bits.size) % b
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    groups = bits.reshape(-1, b).astype(np.int64)
    return groups @ (1 << np.arange(b, dtype=np.int64))


def unpack(symbols: np.ndarray, q: int, nbytes: int) -> bytes:
    b = symbol_bits(q)
    s = np.asarray(symbols, dtype=np.int64)[: -(-nbytes * 8 // b)]
    bits = ((s[:, None] >> np.arange(b)) & 1).astype(np.uint8).ravel()
    return np.packbits(bits[: nbytes * 8], bitorder="little").tobytes()


@dataclass
class StoredObject:
    id: int
    len_bytes: int
    first: int
    count: int


@dataclass
class Cluster:
    spec: CodeSpec
    code: object = dc_field(init=False, repr=False)
    nodes: list = dc_field(init=False, repr=False)  # per node: (stripes, N) array or None
    ledger: list = dc_field(default_factory=list)
    objects: dict = dc_field(default_factory=dict)
    stripes: int = 0

    def __post_init__(self):
        self.code = view(self.spec.build())
        self.nodes = [np.zeros((0, self.code.N), dtype=np.int64) for _ in range(self.code.n)]

    # --- state ---------------------------------------------------------------
    @property
    def failed(self) -> list[int]:
        return [j for j, v in enumerate(self.nodes) if v is None]

    @property
    def ledger_total(self) -> int:
        return sum(e["symbols"] for e in self.ledger)

    def _stack(self, sl: slice) -> np.ndarray:
        """(stripes, n, N) view with failed nodes zero-filled."""
        n, N = self.code.n, self.code.N
        count = len(range(self.stripes)[sl])
        out = np.zeros((count, n, N), dtype=np.int64)
        for j, v in enumerate(self.nodes):
            if v is not None:
                out[:, j] = v[sl]
        return out

    # --- operations ----------------------------------------------------------
    def ingest(self, payload: bytes) -> int:
        if self.failed:
            raise NodeDown(f"nodes {self.failed} are down")
        code = self.code
        syms = pack(bytes(payload), code.q)
        per = code.k * code.N
        count = -(-syms.size // per)
        data = np.zeros(count * per, dtype=np.int64)
        data[: syms.size] = syms
        cw = encode_batch(code, data.reshape(count, code.k, code.N))
        for j in range(code.n):
            self.nodes[j] = np.concatenate([self.nodes[j], cw[:, j]])
        oid = len(self.objects)
        self.objects[oid] = StoredObject(oid, len(payload), self.stripes, count)
        self.stripes += count
        return oid

    def fail_node(self, i: int) -> None:
        if not 0 <= i < self.code.n:
            raise ValueError(f"node {i} out of range")
        self.nodes[i] = None

    def repair_node(self, i: int, avoid=None) -> RepairReport:
        if not 0 <= i < self.code.n:
            raise ValueError(f"node {i} out of range")
        down = self.failed
        if i not in down:
            return RepairReport(i, (), (), 0, 0, bandwidth_ratio(self.code).gamma_optimal)
        if len(down) > 1:
            raise TwoFailures(f"nodes {down} are down; only single repairs are supported")
        plan = plan_repair(self.code, i, avoid)
        rep = report_for(plan)
        self.nodes[i] = repair_batch(plan, self._stack(slice(None)))
        for j in plan.helpers:
            self.ledger.append({"from": j, "to": i, "stripes": self.stripes,
                                "symbols": rep.per_helper[j]["symbols"] * self.stripes})
        return rep

    def read_object(self, oid: int) -> bytes:
        obj = self.objects.get(oid)
        if obj is None:
            raise UnknownObject(oid)
        code = self.code
        down = self.failed
        if len(down) > code.r:
            raise TooManyErasures(f"{len(down)} nodes down, at most {code.r} tolerated")
        sl = slice(obj.first, obj.first + obj.count)
        cols = self._stack(sl)
        if down:
            cols = decode_batch(code, cols, down)
        data = cols[:, : code.k].reshape(-1)
        return unpack(data, code.q, obj.len_bytes)

    # --- persistence ---------------------------------------------------------
    def meta(self) -> dict:
        c = self.code
        return {"family": self.spec.family, "nbar": c.nbar, "w": c.w, "r": c.r,
                "s": c.s, "q": c.q, "c": c.field.c, "n": c.n, "k": c.k, "d": c.d,
                "dc": c.dc, "N": c.N,
                "stripes": [{"id": o.id, "len_bytes": o.len_bytes, "first": o.first,
                             "count": o.count} for o in self.objects.values()],
                "ledger": self.ledger}

    def save(self, path) -> None:
        root = Path(path)
        root.mkdir(parents=True, exist_ok=True)
        (root / "meta.json").write_text(json.dumps(self.meta(), indent=2) + "\n")
        for j, v in enumerate(self.nodes):
            f = root / f"node_{j}.bin"
            if v is None:
                f.unlink(missing_ok=True)
                continue
            flat = v.reshape(-1).astype("<u4")
            f.write_bytes(_HEADER.pack(MAGIC, VERSION, self.code.q, self.code.N, flat.size)
                          + flat.tobytes())

    @classmethod
    def load(cls, path) -> "Cluster":
        root = Path(path)
        meta = json.loads((root / "meta.json").read_text())
        spec = CodeSpec(meta["family"], meta["w"], meta["r"], nbar=meta["nbar"],
                        s=meta["s"], q=meta["q"])
        cl = cls(spec)
        if cl.code.N != meta["N"] or cl.code.n != meta["n"]:
            raise FormatError("metadata does not match the rebuilt code")
        for o in meta["stripes"]:
            cl.objects[o["id"]] = StoredObject(o["id"], o["len_bytes"], o["first"], o["count"])
        cl.stripes = sum(o.count for o in cl.objects.values())
        cl.ledger = list(meta.get("ledger", []))
        for j in range(cl.code.n):
            f = root / f"node_{j}.bin"
            cl.nodes[j] = None if not f.exists() else read_node_file(f, cl.code.q, cl.code.N)
        return cl


def read_node_file(path, q: int, N: int) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, ver, fq, fN, count = _HEADER.unpack_from(raw)
    if magic != MAGIC or ver != VERSION:
        raise FormatError(f"{path}: bad magic or version")
    if fq != q or fN != N:
        raise FormatError(f"{path}: field or sub-packetization mismatch")
    body = np.frombuffer(raw, dtype="<u4", offset=_HEADER.size)
    if body.size != count or count % N:
        raise FormatError(f"{path}: symbol count mismatch")
    return body.astype(np.int64).reshape(-1, N)


def gamma_total(reports, stripes: int) -> Fraction:
    return Fraction(sum(r.downloaded_symbols for r in reports) * stripes)
