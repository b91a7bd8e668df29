"""Run MDS, repair and condition checks on the reference instances."""

from __future__ import annotations

import argparse
import json
import sys
import time

from mdsarray.codec import verify_mds, verify_optimal_update
from mdsarray.config import CodeSpec
from mdsarray.families import FAMILIES, check_conditions
from mdsarray.repair import verify_repair_all

INSTANCES = [
    CodeSpec("C0", 2, 3, m=3),
    CodeSpec("YB1", 2, 3, nbar=5),
    CodeSpec("YB2", 2, 3, nbar=5),
    CodeSpec("C1", 2, 3, m=3, s=2),
    CodeSpec("C2", 2, 3, nbar=5, s=2),
    CodeSpec("C2P", 2, 3, nbar=5, s=2, q=11),
    CodeSpec("C2P", 2, 3, nbar=5, s=2, q=13),
    CodeSpec("C3", 2, 3, nbar=5, s=2),
]


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    ok = True
    for spec in INSTANCES:
        t0 = time.perf_counter()
        code = spec.build()
        mds = verify_mds(code, seed=args.seed)
        rep = verify_repair_all(code, seed=args.seed)
        cond = check_conditions(code).ok if spec.family in FAMILIES else None
        row = {"spec": spec.as_dict(), "q": code.q, "mds": mds.ok and mds.modes_agree,
               "patterns": mds.patterns, "repair_checks": rep.checks, "repair_ok": rep.ok,
               "ratios": sorted(str(x) for x in rep.ratios), "conditions": cond,
               "optimal_update": verify_optimal_update(code),
               "seconds": round(time.perf_counter() - t0, 2)}
        ok &= row["mds"] and rep.ok and cond is not False
        print(json.dumps(row))
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
