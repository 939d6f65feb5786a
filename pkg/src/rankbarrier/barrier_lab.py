"""Randomized corroboration of the rank-method barriers on concrete linear maps.

For a map ``L`` the lab computes ``r``, the symbolic rank of ``L`` applied to a
generic simple element, then draws random domain elements ``f`` and checks

* ``rank(L(f)) <= r * barrier_bound(family, n, d)``, and
* ``L(f)`` lies in the coefficient space of the symbolic image.

Passing is corroboration only: the theorems quantify over every linear map and
random maps sample a sliver of that set.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field
from typing import Sequence

from . import linalg
from .field import QQ, Field
from .poly import STANDARD, Polynomial, monomials_up_to
from .polymatrix import MatrixSpace, coefficient_space, randomized_symbolic_rank
from .rank_methods import (
    TENSOR,
    WARING,
    LinearMap,
    Tensor,
    apply_map,
    barrier_bound,
    basis_indices,
    catalecticant_map,
    mode_flattening_map,
    reference_values,
    symbolic_image,
)

ENTRY_RANGE = 9
COEF_RANGE = 10


def trial_rng(seed, index: int) -> random.Random:
    """Independent RNG stream per ``(seed, trial index)``."""
    return random.Random(f"{seed}/{index}")


def random_linear_map(family: str, n: int, d: int, m: int, density: float = 1.0, seed=0,
                      field: Field = QQ) -> LinearMap:
    """Each basis image is an ``m x m`` matrix whose entries are nonzero with
    probability ``density``, drawn uniformly from ``[-9, 9] \\ {0}``."""
    if m < 1:
        raise ValueError("m must be positive")
    if not 0 < density <= 1:
        raise ValueError("density must lie in (0, 1]")
    rng = random.Random(f"map/{family}/{n}/{d}/{m}/{density}/{seed}")
    images = {}
    for key in basis_indices(family, n, d):
        A = []
        for _ in range(m):
            row = []
            for _ in range(m):
                if rng.random() < density:
                    v = rng.randint(1, ENTRY_RANGE) * rng.choice((-1, 1))
                else:
                    v = 0
                row.append(v)
            A.append(row)
        images[key] = A
    return LinearMap(family, n, d, m, images, field)


def random_flattening_map(family: str, n: int, d: int, m: int, summands: int = 1, seed=0,
                          field: Field = QQ) -> LinearMap:
    """``L(f) = sum_t P_t F_t(f) Q_t`` with ``F_t`` a random catalecticant or mode flattening.

    Each summand has rank at most 1 on the simple set, so ``r <= summands``
    while ``L(f)`` can reach the full flattening rank. This stresses the barrier
    inequality far more than dense random maps, whose ``r`` is typically ``m``.
    """
    rng = random.Random(f"flat/{family}/{n}/{d}/{m}/{summands}/{seed}")
    total = {key: linalg.zeros(m, m) for key in basis_indices(family, n, d)}
    for _ in range(summands):
        if family == WARING:
            F = catalecticant_map(n, d, rng.randint(0, d), field)
        else:
            k = rng.randint(1, d - 1) if d > 1 else None
            if k is None:
                continue
            F = mode_flattening_map(n, d, rng.sample(range(d), k), field)
        s = F.m
        P = [[rng.randint(-ENTRY_RANGE, ENTRY_RANGE) for _ in range(s)] for _ in range(m)]
        Q = [[rng.randint(-ENTRY_RANGE, ENTRY_RANGE) for _ in range(m)] for _ in range(s)]
        for key, A in F.images.items():
            total[key] = linalg.mat_add(total[key], linalg.mat_mul(linalg.mat_mul(P, A), Q))
    return LinearMap(family, n, d, m, total, field)


def random_domain_element(L: LinearMap, rng: random.Random):
    """Dense element of the domain with integer coefficients in ``[-10, 10]``."""
    if L.family == WARING:
        terms = {e: rng.randint(-COEF_RANGE, COEF_RANGE) for e in monomials_up_to(L.n, L.d)}
        return Polynomial(L.n, terms, STANDARD, L.field)
    entries = {idx: rng.randint(-COEF_RANGE, COEF_RANGE) for idx in basis_indices(TENSOR, L.n, L.d)}
    return Tensor(L.n, L.d, entries, L.field)


def random_simple_element(L: LinearMap, rng: random.Random, coef_range: int = COEF_RANGE):
    """A ``d``-th power of a random affine form, or a random rank-one tensor."""
    if L.family == WARING:
        ell = Polynomial(L.n, {
            (0,) * L.n: rng.randint(-coef_range, coef_range),
            **{tuple(int(i == j) for i in range(L.n)): rng.randint(-coef_range, coef_range) for j in range(L.n)},
        }, STANDARD, L.field)
        return ell**L.d
    vecs = [[rng.randint(-coef_range, coef_range) for _ in range(L.n)] for _ in range(L.d)]
    return Tensor.rank_one(vecs, L.field)


def estimate_r(L: LinearMap, seed=0, trials: int = 3, sample_range: int | None = None) -> int:
    """Max rank of ``L`` on the simple set, as the randomized symbolic rank of its generic image."""
    if L.is_zero():
        return 0
    return randomized_symbolic_rank(symbolic_image(L), sample_range, trials, f"r/{seed}")


def max_rank_on_simple_set(L: LinearMap, samples: int, seed=0) -> int:
    best = 0
    for t in range(samples):
        g = random_simple_element(L, trial_rng(f"simple/{seed}", t))
        best = max(best, linalg.rank(apply_map(L, g), L.field))
    return best


@dataclass
class BarrierReport:
    family: str
    n: int
    d: int
    m: int
    r: int
    per_unit_barrier: int
    barrier: int
    observed_max_rank: int
    trials: int
    membership_failures: int
    passed: bool
    seed: object
    ranks: list[int] = dc_field(default_factory=list)
    coefficient_space_dim: int = 0

    def to_dict(self) -> dict:
        out = asdict(self)
        out["pass"] = out.pop("passed")
        out["seed"] = str(self.seed) if not isinstance(self.seed, int) else self.seed
        return out


def _one_trial(L: LinearMap, space: MatrixSpace, seed, index: int) -> tuple[int, bool]:
    f = random_domain_element(L, trial_rng(seed, index))
    A = apply_map(L, f)
    return linalg.rank(A, L.field), space.contains(A)


_WORKER_STATE: dict = {}


def _init_worker(L: LinearMap, space: MatrixSpace) -> None:
    _WORKER_STATE["L"], _WORKER_STATE["space"] = L, space


def _worker_trial(seed, index: int) -> tuple[int, bool]:
    return _one_trial(_WORKER_STATE["L"], _WORKER_STATE["space"], seed, index)


def verify_barrier(L: LinearMap, trials: int = 20, seed=0, workers: int = 1) -> BarrierReport:
    """Check the barrier inequality and coefficient-space membership on random inputs.

    Trial ``i`` draws from its own stream ``(seed, i)``, so running trials in
    ``workers`` processes produces the same report as a serial run.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    M = symbolic_image(L)
    r = estimate_r(L, seed)
    space = coefficient_space(M)
    per_unit = barrier_bound(L.family, L.n, L.d)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(L, space)) as pool:
            results = list(pool.map(_worker_trial, [seed] * trials, range(trials)))
    else:
        results = [_one_trial(L, space, seed, t) for t in range(trials)]
    ranks = [rk for rk, _ in results]
    failures = sum(1 for _, ok in results if not ok)
    observed = max(ranks, default=0)
    barrier = r * per_unit
    return BarrierReport(
        L.family, L.n, L.d, L.m, r, per_unit, barrier, observed, trials, failures,
        observed <= barrier and failures == 0, seed, ranks, space.dim,
    )


@dataclass(frozen=True)
class SweepConfig:
    """Parameters for a batch of barrier checks on random maps."""

    family: str = WARING
    ns: Sequence[int] = (2, 3)
    ds: Sequence[int] = (2, 3, 4)
    m_min: int = 4
    m_max: int = 20
    maps: int = 50
    trials: int = 20
    density: float = 1.0
    seed: int = 0
    # 0 draws dense random maps; k > 0 draws sums of k composed flattenings
    flattening_summands: int = 0


def sweep(cfg: SweepConfig) -> list[BarrierReport]:
    """``cfg.maps`` random maps with ``(n, d, m)`` drawn from the configured ranges."""
    rng = random.Random(f"sweep/{cfg.family}/{cfg.seed}")
    reports = []
    for i in range(cfg.maps):
        n = rng.choice(list(cfg.ns))
        d = rng.choice(list(cfg.ds))
        m = rng.randint(cfg.m_min, cfg.m_max)
        if cfg.flattening_summands:
            L = random_flattening_map(cfg.family, n, d, m, cfg.flattening_summands, seed=f"{cfg.seed}/{i}")
        else:
            L = random_linear_map(cfg.family, n, d, m, cfg.density, seed=f"{cfg.seed}/{i}")
        reports.append(verify_barrier(L, cfg.trials, seed=f"{cfg.seed}/{i}"))
    return reports


def gap_report(ns: Sequence[int], ds: Sequence[int]) -> list[dict]:
    """Barrier values next to literature reference values, one row per ``(n, d)``."""
    rows = []
    for n in ns:
        for d in ds:
            ref = reference_values(n, d)
            rows.append({
                "n": n,
                "d": d,
                "waring_barrier_per_r": barrier_bound(WARING, n, d),
                "tensor_barrier_per_r": barrier_bound(TENSOR, n, d),
                **{k: v for k, v in ref.to_dict().items() if k not in ("n", "d")},
            })
    return rows
