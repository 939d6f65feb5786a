"""Sweep random linear maps and tabulate how close observed ranks get to the barrier."""

from __future__ import annotations

import argparse
import sys
from collections import defaultdict

from rankbarrier.barrier_lab import SweepConfig, sweep
from rankbarrier.formats import dumps


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", choices=("waring", "tensor"), default="waring")
    ap.add_argument("--ns", default="2,3")
    ap.add_argument("--ds", default="2,3,4")
    ap.add_argument("--m-min", type=int, default=4)
    ap.add_argument("--m-max", type=int, default=20)
    ap.add_argument("--maps", type=int, default=20)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--density", type=float, default=1.0)
    ap.add_argument("--flattening-summands", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true", help="print full reports instead of the table")
    args = ap.parse_args(argv)

    cfg = SweepConfig(
        family=args.family,
        ns=tuple(int(x) for x in args.ns.split(",")),
        ds=tuple(int(x) for x in args.ds.split(",")),
        m_min=args.m_min,
        m_max=args.m_max,
        maps=args.maps,
        trials=args.trials,
        density=args.density,
        seed=args.seed,
        flattening_summands=args.flattening_summands,
    )
    reports = sweep(cfg)
    if args.json:
        sys.stdout.write(dumps([r.to_dict() for r in reports]))
        return 0 if all(r.passed for r in reports) else 1

    groups = defaultdict(list)
    for r in reports:
        groups[(r.n, r.d)].append(r)
    print(f"{'n':>3} {'d':>3} {'maps':>5} {'max r':>6} {'max rank':>9} {'per-unit':>9} {'max rank/barrier':>17}")
    for (n, d), rs in sorted(groups.items()):
        ratio = max((r.observed_max_rank / r.barrier for r in rs if r.barrier), default=0.0)
        print(f"{n:>3} {d:>3} {len(rs):>5} {max(r.r for r in rs):>6} {max(r.observed_max_rank for r in rs):>9} "
              f"{rs[0].per_unit_barrier:>9} {ratio:>17.3f}")
    bad = [r for r in reports if not r.passed]
    print(f"violations or membership failures: {len(bad)}")
    return 0 if not bad else 1


if __name__ == "__main__":
    sys.exit(main())
