"""Store a random object, fail and repair every node, read it back."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from mdsarray.cluster import Cluster
from mdsarray.config import CodeSpec


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--spec", help="code spec JSON (default: C1, n=12, k=9)")
    p.add_argument("--size", type=int, default=1 << 20, help="payload bytes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dir", help="save the final cluster here")
    args = p.parse_args(argv)
    spec = CodeSpec.load(args.spec) if args.spec else CodeSpec("C1", 2, 3, m=3, s=2)
    cl = Cluster(spec)
    payload = np.random.default_rng(args.seed).integers(0, 256, args.size, dtype=np.uint8).tobytes()
    oid = cl.ingest(payload)
    print(f"code n={cl.code.n} k={cl.code.k} N={cl.code.N} q={cl.code.q}, stripes={cl.stripes}")
    for i in range(cl.code.n):
        cl.fail_node(i)
        rep = cl.repair_node(i)
        print(f"node {i:2d}: helpers={len(rep.helpers)} avoided={list(rep.avoided)} "
              f"symbols/stripe={rep.downloaded_symbols} ratio={rep.ratio}")
    ok = cl.read_object(oid) == payload
    print(f"ledger total {cl.ledger_total} symbols, read back {'ok' if ok else 'MISMATCH'}")
    if args.dir:
        cl.save(args.dir)
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
