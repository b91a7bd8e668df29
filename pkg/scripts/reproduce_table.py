"""Print the parameter / repair-ratio table for the lifted families."""

from __future__ import annotations

import argparse
import csv
import sys

from mdsarray.cli import table_rows


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--family", nargs="+", default=["C1", "C2", "C3"])
    p.add_argument("--r", nargs="+", type=int, default=[3, 4])
    p.add_argument("--s", nargs="+", type=int, default=[2, 3, 4])
    p.add_argument("--w", nargs="+", type=int, default=[2, 3])
    p.add_argument("--nbar", nargs="+", type=int, default=[5, 6, 8])
    args = p.parse_args(argv)
    rows = table_rows(args.family, args.r, args.s, args.w, args.nbar)
    if rows:
        wr = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]))
        wr.writeheader()
        wr.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
