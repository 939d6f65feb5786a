"""Compare homogeneous decomposition term counts with the r(d+1) bound on random low-rank matrices."""

from __future__ import annotations

import argparse
import random

from rankbarrier.criteria import random_low_rank_homogeneous
from rankbarrier.decomposition import observed_counts


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    print(f"{'m':>3} {'k':>3} {'n':>3} {'d':>3} {'rank':>5} {'terms':>6} {'bound':>6}")
    for _ in range(args.cases):
        m, k, n, d = rng.randint(2, 5), rng.randint(2, 5), rng.randint(1, 3), rng.randint(1, 4)
        M = random_low_rank_homogeneous(rng, m, k, n, d, rng.randint(1, 3))
        c = observed_counts(M, d)
        print(f"{m:>3} {k:>3} {n:>3} {d:>3} {c['rank']:>5} {c['hom_terms']:>6} {c['hom_bound']:>6}")


if __name__ == "__main__":
    main()
