"""Seeded end-to-end checks with JSON-serializable reports.

Each ``check_*`` function runs one experiment and returns a
:class:`CheckReport`. Reports contain no timings, so the same seed must give
byte-identical JSON.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import asdict, dataclass, field as dc_field
from math import comb

from . import linalg
from .barrier_lab import random_flattening_map, random_linear_map, verify_barrier
from .decomposition import hom_rank_decompose, sm_rank_decompose, verify_decomposition
from .depth3 import PolarizationBasis, build_psi, expected_dim, is_ssm, validate_rank_method
from .formats import dumps
from .poly import STANDARD, Polynomial, VariablePartition, monomials_of_degree, monomials_up_to
from .polymatrix import PolyMatrix, exact_symbolic_rank, randomized_symbolic_rank
from .rank_methods import TENSOR, WARING, Tensor, barrier_bound, catalecticant, mode_flattening, reference_values


@dataclass
class CheckReport:
    number: int
    name: str
    passed: bool
    summary: dict
    failures: list = dc_field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        detail = ", ".join(f"{k}={v}" for k, v in self.summary.items() if not isinstance(v, (list, dict)))
        return f"criterion {self.number} [{status}] {self.name}: {detail}"


# ----- random inputs ------------------------------------------------------------

def _random_poly(rng: random.Random, n: int, max_degree: int, terms: int, homogeneous: int | None = None,
                 coef: int = 5) -> Polynomial:
    mons = monomials_of_degree(n, homogeneous) if homogeneous is not None else monomials_up_to(n, max_degree)
    picks = rng.sample(mons, min(terms, len(mons)))
    return Polynomial(n, {e: rng.randint(-coef, coef) for e in picks}, STANDARD)


def random_matrix(rng: random.Random, rows: int, cols: int, n: int, max_degree: int, terms: int = 3,
                  homogeneous: int | None = None, zero_prob: float = 0.2) -> PolyMatrix:
    return PolyMatrix([
        [Polynomial.zero(n) if rng.random() < zero_prob else _random_poly(rng, n, max_degree, terms, homogeneous)
         for _ in range(cols)]
        for _ in range(rows)
    ], n)


def random_low_rank_homogeneous(rng: random.Random, rows: int, cols: int, n: int, d: int, rank: int) -> PolyMatrix:
    total = PolyMatrix.zeros(rows, cols, n)
    for _ in range(rank):
        k = rng.randint(0, d)
        u = [_random_poly(rng, n, k, 2, k) for _ in range(rows)]
        v = [_random_poly(rng, n, d - k, 2, d - k) for _ in range(cols)]
        total = total + PolyMatrix.outer(u, v)
    return total


def random_sm_matrix(rng: random.Random, rows: int, cols: int, part: VariablePartition,
                     low_rank: bool) -> PolyMatrix:
    nv, d = part.num_vars, part.d

    def sm_poly(blocks) -> Polynomial:
        terms = {}
        for choice in itertools.product(*(part.blocks[j] for j in blocks)):
            if rng.random() < 0.6:
                e = [0] * nv
                for v in choice:
                    e[v] = 1
                terms[tuple(e)] = rng.randint(-4, 4)
        return Polynomial(nv, terms)

    if not low_rank:
        return PolyMatrix([[sm_poly(range(d)) for _ in range(cols)] for _ in range(rows)], nv)
    total = PolyMatrix.zeros(rows, cols, nv)
    for _ in range(rng.randint(1, 2)):
        S = [j for j in range(d) if rng.random() < 0.5]
        rest = [j for j in range(d) if j not in S]
        total = total + PolyMatrix.outer([sm_poly(S) for _ in range(rows)], [sm_poly(rest) for _ in range(cols)])
    return total


# ----- criteria -------------------------------------------------------------------

def _barrier_check(number: int, family: str, ns, ds, seed: int, maps: int, trials: int) -> CheckReport:
    """Half the maps are dense random maps; the other half are sums of composed
    flattenings, whose ``r`` is small so the inequality is not trivially slack."""
    rng = random.Random(f"criterion{number}/{seed}")
    rows, failures = [], []
    for i in range(maps):
        n, d, m = rng.choice(ns), rng.choice(ds), rng.randint(4, 20)
        map_seed = f"{seed}/{i}"
        if i % 2 == 0:
            density = rng.choice((0.3, 0.6, 1.0))
            L = random_linear_map(family, n, d, m, density, seed=map_seed)
            kind = f"dense({density})"
        else:
            summands = rng.randint(1, 2)
            L = random_flattening_map(family, n, d, m, summands, seed=map_seed)
            kind = f"flattening({summands})"
        R = verify_barrier(L, trials, seed=map_seed)
        row = {"kind": kind, **{k: v for k, v in R.to_dict().items() if k not in ("family", "seed", "trials")}}
        rows.append(row)
        if not R.passed:
            failures.append({"map": i, "reason": "violation" if R.observed_max_rank > R.barrier else "membership"})
    violations = sum(1 for r in rows if r["observed_max_rank"] > r["barrier"])
    membership = sum(r["membership_failures"] for r in rows)
    tightest = max((r["observed_max_rank"] / r["barrier"] for r in rows if r["barrier"]), default=0.0)
    summary = {
        "maps": maps,
        "trials_per_map": trials,
        "violations": violations,
        "membership_failures": membership,
        "max_observed_over_barrier": round(tightest, 6),
    }
    if family == TENSOR:
        per_unit_d3 = sorted({(r["n"], r["per_unit_barrier"]) for r in rows if r["d"] == 3})
        summary["per_unit_barrier_d3"] = [list(x) for x in per_unit_d3]
        for n, b in per_unit_d3:
            if b != 8 * n:
                failures.append({"n": n, "reason": f"per-unit barrier {b} != 8n"})
    summary["maps_detail"] = rows
    name = "waring barrier corroboration" if family == WARING else "tensor barrier corroboration"
    return CheckReport(number, name, not failures and violations == 0 and membership == 0, summary, failures)


def check_waring_barrier(seed: int = 0, maps: int = 50, trials: int = 20) -> CheckReport:
    return _barrier_check(1, WARING, (2, 3), (2, 3, 4), seed, maps, trials)


def check_tensor_barrier(seed: int = 0, maps: int = 50, trials: int = 20) -> CheckReport:
    return _barrier_check(2, TENSOR, (2, 3), (2, 3), seed, maps, trials)


def check_decompositions(seed: int = 0, cases: int = 100) -> CheckReport:
    rng = random.Random(f"criterion3/{seed}")
    failures = []
    hom_counts, sm_counts = [], []
    for i in range(cases):
        m, k, n, d = rng.randint(1, 5), rng.randint(1, 5), rng.randint(1, 3), rng.randint(1, 4)
        if i % 2:
            M = random_low_rank_homogeneous(rng, m, k, n, d, rng.randint(1, 2))
        else:
            M = random_matrix(rng, m, k, n, d, terms=3, homogeneous=d)
        dec = hom_rank_decompose(M, d)
        ok = bool(verify_decomposition(M, dec)) and len(dec) <= dec.bound
        hom_counts.append([len(dec), dec.bound])
        if not ok:
            failures.append({"kind": "hom", "case": i})
    for i in range(cases):
        d, n = rng.randint(1, 3), rng.randint(1, 3)
        part = VariablePartition.uniform(d, n)
        m, k = rng.randint(1, 4), rng.randint(1, 4)
        M = random_sm_matrix(rng, m, k, part, low_rank=bool(i % 2))
        if not M.is_set_multilinear(part):
            # a zero draw or a low-rank product missing some blocks; fall back to a dense instance
            M = random_sm_matrix(rng, m, k, part, low_rank=False)
        dec = sm_rank_decompose(M, part)
        ok = bool(verify_decomposition(M, dec)) and len(dec) <= dec.bound
        sm_counts.append([len(dec), dec.bound])
        if not ok:
            failures.append({"kind": "sm", "case": i})
    summary = {
        "hom_cases": cases,
        "sm_cases": cases,
        "hom_max_count_over_bound": round(max(c / b for c, b in hom_counts if b) if any(b for _, b in hom_counts) else 0, 6),
        "sm_max_count_over_bound": round(max(c / b for c, b in sm_counts if b) if any(b for _, b in sm_counts) else 0, 6),
        "hom_counts": hom_counts,
        "sm_counts": sm_counts,
    }
    return CheckReport(3, "decomposition round trips", not failures, summary, failures)


def check_rank_oracles(seed: int = 0, cases: int = 200) -> CheckReport:
    rng = random.Random(f"criterion4/{seed}")
    agree = 0
    failures, pairs = [], []
    for i in range(cases):
        m, k, n = rng.randint(1, 6), rng.randint(1, 6), rng.randint(1, 3)
        M = random_matrix(rng, m, k, n, 3, terms=3)
        ex = exact_symbolic_rank(M)
        rd = randomized_symbolic_rank(M, seed=f"{seed}/{i}")
        pairs.append([ex, rd])
        agree += ex == rd
        if rd > ex:
            failures.append({"case": i, "exact": ex, "randomized": rd})
    rate = agree / cases if cases else 1.0
    summary = {"cases": cases, "agreements": agree, "agreement_rate": rate, "one_sided_violations": len(failures),
               "ranks": pairs}
    return CheckReport(4, "rank oracle agreement", rate >= 0.99 and not failures, summary, failures)


def check_flattenings(seed: int = 0, cases: int = 100) -> CheckReport:
    rng = random.Random(f"criterion5/{seed}")
    failures = []
    cat_ranks = []
    for i in range(cases):
        n = rng.randint(1, 4)
        coefs = [rng.randint(-9, 9) for _ in range(n)]
        if not any(coefs):
            coefs[0] = 1
        ell = Polynomial(n, {tuple(int(i == j) for i in range(n)): c for j, c in enumerate(coefs)})
        for d in range(1, 5):
            power = ell**d
            for k in range(1, d + 1):
                r = linalg.rank(catalecticant(power, k))
                cat_ranks.append(r)
                if r != 1:
                    failures.append({"kind": "catalecticant", "case": i, "d": d, "k": k, "rank": r})
    flat_ok = 0
    for i in range(cases):
        n, d = rng.randint(2, 3), rng.randint(2, 4)
        k = rng.randint(1, 4)
        T = Tensor(n, d)
        for _ in range(k):
            T = T + Tensor.rank_one([[rng.randint(-5, 5) for _ in range(n)] for _ in range(d)])
        S = rng.sample(range(d), rng.randint(1, d - 1))
        r = linalg.rank(mode_flattening(T, S))
        if r <= k:
            flat_ok += 1
        else:
            failures.append({"kind": "flattening", "case": i, "k": k, "rank": r})
    summary = {"catalecticant_checks": len(cat_ranks), "catalecticant_rank_one": cat_ranks.count(1),
               "flattening_cases": cases, "flattening_within_k": flat_ok}
    return CheckReport(5, "flattening sanity", not failures, summary, failures)


def check_reference_numbers() -> CheckReport:
    failures = []
    tensor_d3 = {n: barrier_bound(TENSOR, n, 3) for n in range(2, 11)}
    for n, b in tensor_d3.items():
        if b != 8 * n:
            failures.append({"what": "tensor d=3", "n": n, "got": b})
    waring33 = barrier_bound(WARING, 3, 3)
    if waring33 != 16:
        failures.append({"what": "waring n=3 d=3", "got": waring33})
    ah = {}
    for n in range(2, 7):
        for d in range(2, 7):
            got = reference_values(n, d).ah95_generic_waring
            want = -(-comb(n + d - 1, n - 1) // n)
            ah[f"{n},{d}"] = got
            if got != want:
                failures.append({"what": "ah95", "n": n, "d": d, "got": got})
    if reference_values(3, 3).ah95_generic_waring != 4:
        failures.append({"what": "ah95 n=d=3"})
    aft = {}
    for n in (2, 4, 8, 16):
        for d in range(2, 7):
            got = reference_values(n, d).aft11_tensor
            want = 2 * n ** (d // 2) + n - d * (n.bit_length() - 1)
            aft[f"{n},{d}"] = got
            if got != want or not isinstance(got, int):
                failures.append({"what": "aft11", "n": n, "d": d, "got": got})
    summary = {"tensor_d3": tensor_d3, "waring_3_3": waring33, "ah95": ah, "aft11_power_of_two_n": aft}
    return CheckReport(6, "barrier and reference numbers", not failures, summary, failures)


def check_depth3() -> CheckReport:
    failures = []
    dims = {}
    for n in (1, 2, 3):
        for d in (1, 2, 3):
            got = PolarizationBasis(n, d, d).dim
            dims[f"{n},{d}"] = got
            if got != expected_dim(n, d):
                failures.append({"what": "dim", "n": n, "d": d, "got": got})
    coords = 0
    for n in (1, 2, 3):
        for D in (1, 2, 3, 4):
            for d in range(1, min(D, 3) + 1):
                P = build_psi(n, D, d, check=False)
                part = P.partition
                for e, p in P.coords.items():
                    coords += 1
                    if not is_ssm(p, part):
                        failures.append({"what": "ssm", "n": n, "D": D, "d": d, "exp": list(e)})
                if not validate_rank_method(P.as_matrix(), n, D, d):
                    failures.append({"what": "validate", "n": n, "D": D, "d": d})
    summary = {"polarization_dims": dims, "psi_coordinates_checked": coords}
    return CheckReport(7, "depth-3 structure", not failures, summary, failures)


CHECKS = {
    1: check_waring_barrier,
    2: check_tensor_barrier,
    3: check_decompositions,
    4: check_rank_oracles,
    5: check_flattenings,
    6: lambda seed=0: check_reference_numbers(),
    7: lambda seed=0: check_depth3(),
}


def run_check(number: int, seed: int = 0) -> tuple[CheckReport, float]:
    t0 = time.perf_counter()
    report = CHECKS[number](seed=seed)
    return report, time.perf_counter() - t0


def check_determinism(seed: int = 0, numbers=tuple(CHECKS)) -> CheckReport:
    """Run each check twice with the same seed and compare the JSON byte for byte."""
    differing = []
    for k in numbers:
        a, _ = run_check(k, seed)
        b, _ = run_check(k, seed)
        if a.to_json().encode() != b.to_json().encode():
            differing.append(k)
    summary = {"checks_repeated": len(numbers), "byte_identical": not differing, "differing": differing}
    return CheckReport(8, "determinism", not differing, summary, [{"check": k} for k in differing])
