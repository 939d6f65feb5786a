"""Print barrier values next to literature reference values for a grid of (n, d)."""

from __future__ import annotations

import argparse

from rankbarrier.barrier_lab import gap_report

COLUMNS = ("n", "d", "waring_barrier_per_r", "ah95_generic_waring", "gl17_waring_intro",
           "tensor_barrier_per_r", "aft11_tensor_rounded", "random_tensor_rank")


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ns", default="2,3,4,5,8")
    ap.add_argument("--ds", default="2,3,4,5,6")
    args = ap.parse_args(argv)
    rows = gap_report([int(x) for x in args.ns.split(",")], [int(x) for x in args.ds.split(",")])
    print("  ".join(f"{c:>22}" for c in COLUMNS))
    for row in rows:
        print("  ".join(f"{str(row.get(c, '')):>22}" for c in COLUMNS))


if __name__ == "__main__":
    main()
