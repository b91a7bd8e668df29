"""Command-line front end.

Exit codes: 0 pass, 1 usage, 2 property violation, 3 I/O.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from itertools import product
from math import comb
from pathlib import Path

import numpy as np

from . import families
from .cluster import Cluster, FormatError, NodeDown, TwoFailures, UnknownObject
from .codec import TooLarge, TooManyErasures, verify_mds, view
from .config import CodeSpec
from .gf import FieldError, FieldTooSmall
from .gfmatrix import SingularSystem
from .lift import bandwidth_ratio, repair_ratio
from .msrbase import DuplicateLambda, InvalidParams, c0_bound
from .repair import InvalidAvoidSet, NoFactorization, verify_repair_all

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(obj: dict, as_json: bool, out=None) -> None:
    out = out or sys.stdout
    if as_json:
        out.write(json.dumps(obj, sort_keys=True) + "\n")
        return
    for k, v in obj.items():
        out.write(f"{k}: {json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v}\n")


def _spec(args) -> CodeSpec:
    if not args.spec:
        raise UsageError("--spec is required")
    try:
        spec = CodeSpec.load(args.spec)
    except OSError as e:
        raise OSError(f"cannot read spec: {e}") from e
    except json.JSONDecodeError as e:
        raise UsageError(f"spec is not valid JSON: {e}") from None
    return spec.with_q(args.q)


def _seed(args, spec: CodeSpec | None = None) -> int:
    if args.seed is not None:
        return args.seed
    if spec is not None and spec.seed is not None:
        return spec.seed
    return 0


def _describe(code) -> dict:
    c = view(code)
    bw = bandwidth_ratio(c)
    return {**c.params(), "gamma": str(bw.gamma), "gamma_optimal": str(bw.gamma_optimal),
            "ratio": str(bw.ratio)}


def cmd_build(args) -> int:
    spec = _spec(args)
    code = spec.build()
    _emit({"spec": spec.as_dict(), "code": _describe(code)}, args.json)
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = _spec(args)
    seed = _seed(args, spec)
    want = {k for k in ("mds", "repair", "conditions") if getattr(args, k)}
    if not want:
        want = {"mds", "repair", "conditions"}
    report = {"spec": spec.as_dict(), "seed": seed}
    try:
        code = spec.build()
    except DuplicateLambda as e:
        _emit({**report, "ok": False, "error": str(e)}, args.json)
        return EXIT_VIOLATION
    ok = True
    if "conditions" in want:
        if spec.family in families.FAMILIES:
            cr = families.check_conditions(code)
            report["conditions"] = cr.as_dict()
            ok &= cr.ok
        else:
            report["conditions"] = {"ok": True, "skipped": "base code"}
    if "mds" in want:
        mr = verify_mds(code, seed=seed)
        report["mds"] = mr.as_dict()
        ok &= mr.ok and mr.modes_agree
    if "repair" in want:
        rr = verify_repair_all(code, seed=seed)
        report["repair"] = rr.as_dict()
        ok &= rr.ok
    report["ok"] = bool(ok)
    _emit(report, args.json)
    return EXIT_OK if ok else EXIT_VIOLATION


def table_rows(families_, rs, ss, ws, nbars) -> list[dict]:
    rows = []
    for fam, r, s, w, nbar in product(families_, rs, ss, ws, nbars):
        if not (2 <= w < r < nbar):
            continue
        if fam == "C1":
            if nbar % 2 or r > nbar - 1:
                continue
            N = w ** (nbar // 2)
            bound = s * c0_bound(nbar // 2, w)
        elif fam in ("C2", "C2P"):
            N = w**nbar
            bound = families.c2_bound(nbar, w, s)
        elif fam == "C3":
            N = w**nbar
            bound = families.c3_bound(nbar, w, s)
        else:
            raise UsageError(f"unknown family {fam}")
        n = s * nbar
        ratio = repair_ratio(n, r, w, s)
        eps = ratio - 1
        rows.append({"family": fam, "n": n, "k": n - r, "r": r, "w": w, "s": s, "nbar": nbar,
                     "N": N, "q_bound": bound, "q_generic": N * comb(n - 1, r - 1) + 1,
                     "ratio": str(ratio), "ratio_decimal": f"1+{float(eps):.4f}",
                     "dc_fraction": f"{(s - 1) / (n - 1):.4f}",
                     "dc_percent": f"{100 * (s - 1) / (n - 1):.1f}%"})
    return rows


def cmd_table(args) -> int:
    rows = table_rows(args.family, args.r, args.s, args.w, args.nbar)
    if args.json:
        sys.stdout.write(json.dumps(rows, sort_keys=True) + "\n")
    elif args.csv:
        buf = io.StringIO()
        if rows:
            wr = csv.DictWriter(buf, fieldnames=list(rows[0]))
            wr.writeheader()
            wr.writerows(rows)
        sys.stdout.write(buf.getvalue())
    else:
        cols = ["family", "n", "k", "N", "q_bound", "ratio_decimal", "dc_percent"]
        widths = {c: max(len(c), *(len(str(r[c])) for r in rows)) if rows else len(c)
                  for c in cols}
        sys.stdout.write("  ".join(c.ljust(widths[c]) for c in cols) + "\n")
        for r in rows:
            sys.stdout.write("  ".join(str(r[c]).ljust(widths[c]) for c in cols) + "\n")
    return EXIT_OK


def cmd_encode(args) -> int:
    spec = _spec(args)
    payload = Path(args.input).read_bytes()
    out = Path(args.out)
    cl = Cluster.load(out) if (out / "meta.json").exists() else Cluster(spec)
    oid = cl.ingest(payload)
    cl.save(out)
    _emit({"id": oid, "len_bytes": len(payload), "stripes": cl.objects[oid].count,
           "cluster": str(out)}, args.json)
    return EXIT_OK


def cmd_decode(args) -> int:
    cl = Cluster.load(args.cluster)
    data = cl.read_object(args.id)
    Path(args.out).write_bytes(data)
    _emit({"id": args.id, "len_bytes": len(data), "failed": cl.failed}, args.json)
    return EXIT_OK


def run_script(cl: Cluster, steps, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    log, payloads = [], {}
    for step in steps:
        op = step.get("op")
        if op == "ingest":
            if "file" in step:
                data = Path(step["file"]).read_bytes()
            else:
                data = rng.integers(0, 256, size=int(step.get("size", 0)), dtype=np.uint8).tobytes()
            oid = cl.ingest(data)
            payloads[oid] = data
            log.append({"op": op, "id": oid, "len_bytes": len(data)})
        elif op == "fail":
            cl.fail_node(int(step["node"]))
            log.append({"op": op, "node": int(step["node"])})
        elif op == "repair":
            rep = cl.repair_node(int(step["node"]), step.get("avoid"))
            log.append({"op": op, "report": rep.as_dict(), "stripes": cl.stripes})
        elif op == "read":
            oid = int(step["id"])
            data = cl.read_object(oid)
            entry = {"op": op, "id": oid, "len_bytes": len(data)}
            if oid in payloads:
                entry["match"] = data == payloads[oid]
            log.append(entry)
        else:
            raise UsageError(f"unknown sim op {op!r}")
    return {"steps": log, "ledger_total": cl.ledger_total, "ledger": cl.ledger}


def cmd_sim(args) -> int:
    spec = _spec(args)
    try:
        steps = json.loads(Path(args.script).read_text())
    except json.JSONDecodeError as e:
        raise UsageError(f"script is not valid JSON: {e}") from None
    if not isinstance(steps, list):
        raise UsageError("script must be a JSON list of steps")
    cl = Cluster.load(args.dir) if args.dir and (Path(args.dir) / "meta.json").exists() else Cluster(spec)
    report = run_script(cl, steps, _seed(args, spec))
    if args.dir:
        cl.save(args.dir)
    _emit(report, args.json)
    bad = any(s.get("match") is False for s in report["steps"])
    return EXIT_VIOLATION if bad else EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="code spec JSON file")
    common.add_argument("--q", type=int, help="override the field size")
    common.add_argument("--seed", type=int, help="seed for test data")
    common.add_argument("--json", action="store_true", help="emit one JSON object")

    p = _Parser(prog="mdsarray", description="MDS array codes with near-optimal repair")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    b = sub.add_parser("build", parents=[common], help="build a code and print its parameters")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", parents=[common], help="run property suites")
    v.add_argument("--mds", action="store_true")
    v.add_argument("--repair", action="store_true")
    v.add_argument("--conditions", action="store_true")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("encode", parents=[common], help="store a file in a cluster directory")
    e.add_argument("--in", dest="input", required=True)
    e.add_argument("--out", required=True, help="cluster directory")
    e.set_defaults(func=cmd_encode)

    d = sub.add_parser("decode", parents=[common], help="read an object back from a cluster")
    d.add_argument("--cluster", required=True)
    d.add_argument("--id", type=int, default=0)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_decode)

    t = sub.add_parser("table", parents=[common], help="parameter and ratio table")
    t.add_argument("--family", nargs="+", default=["C1", "C2", "C2P", "C3"])
    t.add_argument("--r", nargs="+", type=int, default=[3, 4])
    t.add_argument("--s", nargs="+", type=int, default=[2])
    t.add_argument("--w", nargs="+", type=int, default=[2])
    t.add_argument("--nbar", nargs="+", type=int, default=[5, 6])
    t.add_argument("--csv", action="store_true")
    t.set_defaults(func=cmd_table)

    s = sub.add_parser("sim", parents=[common], help="run a cluster script")
    s.add_argument("--script", required=True, help="JSON list of steps")
    s.add_argument("--dir", help="persist the cluster here")
    s.set_defaults(func=cmd_sim)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidParams, InvalidAvoidSet, FieldError, FieldTooSmall, UnknownObject,
            families.UnknownFamily) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularSystem, NoFactorization, TwoFailures, TooManyErasures, NodeDown,
            TooLarge) as e:
        print(f"violation: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_VIOLATION
    except (OSError, FormatError) as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
