"""Run the seeded end-to-end checks and write their JSON reports to a directory."""

from __future__ import annotations

import argparse
import pathlib
import sys

from rankbarrier.criteria import CHECKS, check_determinism, run_check


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--only", type=int, nargs="*", default=sorted(CHECKS), help="check numbers to run (1-7)")
    ap.add_argument("--determinism", action="store_true", help="also rerun the selected checks and compare bytes")
    ap.add_argument("--out", type=pathlib.Path, default=None, help="directory for per-check JSON reports")
    args = ap.parse_args(argv)

    ok = True
    for k in args.only:
        report, elapsed = run_check(k, args.seed)
        print(f"{report.line()} ({elapsed:.2f}s)")
        ok &= report.passed
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / f"criterion_{k}.json").write_text(report.to_json())
    if args.determinism:
        report = check_determinism(args.seed, tuple(args.only))
        print(report.line())
        ok &= report.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
