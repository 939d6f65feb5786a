"""Command-line entry point.

Exit codes: 0 success, 1 barrier violated, 2 input error, 3 resource refusal.
Every failure prints a JSON object to stderr. Output is deterministic for
fixed inputs, seed and options.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from math import comb

from . import formats
from .barrier_lab import estimate_r, random_flattening_map, random_linear_map, verify_barrier, gap_report
from .decomposition import DecompositionError, hom_rank_decompose, sm_rank_decompose, symbolic_decompose, verify_decomposition
from .depth3 import Depth3Error, build_psi, offending_entry
from .field import QQ, Field, FieldError, field_from_spec, require_randomized_safety
from .linalg import DimensionError
from .poly import PolynomialError, VariablePartition
from .polymatrix import default_sample_range, exact_symbolic_rank, randomized_symbolic_rank
from .rank_methods import (
    TENSOR,
    WARING,
    RankMethodError,
    catalecticant_map,
    lower_bound,
    mode_flattening_map,
)

MAX_M = 64
MAX_DENSE_MONOMIALS = 10**6

INPUT_ERRORS = (formats.FormatError, FieldError, PolynomialError, DecompositionError,
                RankMethodError, Depth3Error, DimensionError)


class ResourceRefusal(RuntimeError):
    pass


class InputError(ValueError):
    pass


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    """Raises on bad arguments so the error can be reported as JSON."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    field: Field = QQ
    seed: int = 0
    sample_range: int | None = None
    trials: int | None = None
    output: str = "json"

    def __post_init__(self):
        if self.sample_range is not None and self.sample_range < 2:
            raise InputError("--sample-range must be at least 2")
        if self.trials is not None and self.trials < 0:
            raise InputError("--trials must be nonnegative")
        if not 0 <= self.seed < 2**64:
            raise InputError("--seed must fit in 64 bits")
        if self.sample_range is not None:
            self.field.check_sample_range(self.sample_range)

    def field_label(self) -> str:
        return "rational" if self.field.characteristic == 0 else f"prime({self.field.characteristic})"


# ----- output -----------------------------------------------------------------

def _text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            nested = isinstance(v, dict) or (isinstance(v, list) and any(isinstance(x, (dict, list)) for x in v))
            if nested and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            lines.append(f"{pad}- [{i}]")
            lines.extend(_text(v, indent + 1))
    else:
        lines.append(pad + _scalar(obj))
    return lines


def _scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    if v is None:
        return "null"
    return str(v)


def emit(report: dict, cfg: RunConfig) -> None:
    if cfg.output == "text":
        sys.stdout.write("\n".join(_text(report)) + "\n")
    else:
        sys.stdout.write(formats.dumps(report))


def fail(kind: str, message: str, code: int, **extra) -> int:
    sys.stderr.write(formats.dumps({"error": kind, "message": message, "exit_code": code, **extra}))
    return code


# ----- subcommands ------------------------------------------------------------

def cmd_rank(args, cfg: RunConfig) -> tuple[dict, int]:
    M = formats.polymatrix_from_json(formats.load_file(args.matrix), cfg.field)
    require_randomized_safety(cfg.field, M.max_degree, max(M.shape))
    _guard_dense(M.rows * M.cols * comb(M.nvars + M.max_degree, M.max_degree), "matrix")
    exact = exact_symbolic_rank(M)
    sample_range = cfg.sample_range or default_sample_range(M)
    trials = 3 if cfg.trials is None else cfg.trials
    randomized = randomized_symbolic_rank(M, sample_range, max(trials, 1), cfg.seed)
    return {
        "rows": M.rows,
        "cols": M.cols,
        "field": cfg.field_label(),
        "exact_rank": exact,
        "randomized_rank": randomized,
        "agree": exact == randomized,
        "sample_range": sample_range,
        "trials": max(trials, 1),
        "seed": cfg.seed,
    }, 0


def _parse_modes(text: str, d: int) -> list[int]:
    try:
        modes = sorted({int(tok) - 1 for tok in text.split(",") if tok.strip()})
    except ValueError as exc:
        raise InputError(f"bad mode list {text!r}") from exc
    if not modes or modes[0] < 0 or modes[-1] >= d:
        raise InputError(f"modes must be a nonempty subset of 1..{d}")
    return modes


def cmd_lower_bound(args, cfg: RunConfig) -> tuple[dict, int]:
    doc = formats.load_file(args.input)
    family = formats.detect_family(doc)
    f = formats.domain_element_from_json(doc, family, cfg.field)
    extra: dict = {}
    if args.catalecticant is not None:
        if family != WARING:
            raise InputError("--catalecticant needs a polynomial input, got a tensor")
        d = args.degree if args.degree is not None else int(max(f.degree, 0))
        if not 0 <= args.catalecticant <= d:
            raise InputError(f"catalecticant order must lie in 0..{d}")
        L = catalecticant_map(f.nvars, d, args.catalecticant, cfg.field)
        mu_S, source = 1, "analytic"
        extra = {"method": "catalecticant", "k": args.catalecticant}
    elif args.flattening is not None:
        if family != TENSOR:
            raise InputError("--flattening needs a tensor input, got a polynomial")
        modes = _parse_modes(args.flattening, f.d)
        L = mode_flattening_map(f.n, f.d, modes, cfg.field)
        mu_S, source = 1, "analytic"
        extra = {"method": "flattening", "modes": [s + 1 for s in modes]}
    else:
        L = formats.linear_map_from_json(formats.load_file(args.map), cfg.field)
        if L.family != family:
            raise InputError(f"map family {L.family} does not match input family {family}")
        mu_S, source = estimate_r(L, cfg.seed, 3 if cfg.trials is None else max(cfg.trials, 1), cfg.sample_range), "randomized"
        extra = {"method": "map"}
        if mu_S == 0:
            raise InputError("map vanishes on every simple element; it certifies nothing")
    if family == WARING and L.n != f.nvars:
        raise InputError(f"map expects {L.n} variables, input has {f.nvars}")
    if family == TENSOR and (L.n, L.d) != (f.n, f.d):
        raise InputError(f"map expects n={L.n}, d={L.d}; input has n={f.n}, d={f.d}")
    result = lower_bound(L, f, mu_S, source)
    return {**result.to_dict(), **extra, "n": L.n, "d": L.d, "m": L.m, "field": cfg.field_label()}, 0


def dense_estimate(family: str, n: int, d: int, m: int) -> int:
    """Monomials in the dense symbolic image: ``m^2`` entries times the monomial count of one entry."""
    per_entry = comb(n + d, d) if family == WARING else n**d
    return m * m * per_entry


def _guard_dense(count: int, what: str) -> None:
    if count > MAX_DENSE_MONOMIALS:
        raise ResourceRefusal(f"{what} needs about {count} dense monomials, limit is {MAX_DENSE_MONOMIALS}")


def cmd_barrier_check(args, cfg: RunConfig) -> tuple[dict, int]:
    if args.m > MAX_M:
        raise ResourceRefusal(f"m={args.m} exceeds the limit {MAX_M}")
    for name in ("n", "d", "m"):
        if getattr(args, name) < 1:
            raise InputError(f"--{name} must be positive")
    if args.maps < 0:
        raise InputError("--maps must be nonnegative")
    _guard_dense(dense_estimate(args.family, args.n, args.d, args.m), "symbolic image")
    if cfg.field.characteristic:
        require_randomized_safety(cfg.field, args.d, args.m)
    trials = 20 if cfg.trials is None else cfg.trials
    if args.maps and trials < 1:
        raise InputError("--trials must be positive")
    reports = []
    for i in range(args.maps):
        map_seed = f"{cfg.seed}/{i}"
        if args.flattening_summands:
            L = random_flattening_map(args.family, args.n, args.d, args.m, args.flattening_summands, map_seed, cfg.field)
        else:
            L = random_linear_map(args.family, args.n, args.d, args.m, args.density, map_seed, cfg.field)
        reports.append(verify_barrier(L, trials, seed=map_seed, workers=args.workers).to_dict())
    all_pass = all(r["pass"] for r in reports)
    report = {
        "family": args.family,
        "n": args.n,
        "d": args.d,
        "m": args.m,
        "maps": args.maps,
        "trials": trials,
        "seed": cfg.seed,
        "field": cfg.field_label(),
        "all_pass": all_pass,
        "violations": sum(1 for r in reports if r["observed_max_rank"] > r["barrier"]),
        "membership_failures": sum(r["membership_failures"] for r in reports),
        "reports": reports,
    }
    return report, 0 if all_pass else 1


def cmd_decompose(args, cfg: RunConfig) -> tuple[dict, int]:
    M = formats.polymatrix_from_json(formats.load_file(args.matrix), cfg.field)
    if args.mode == "sm":
        if args.partition:
            blocks = formats.parse_partition(args.partition, M.nvars)
        elif args.blocks:
            d, n = args.blocks
            blocks = VariablePartition.uniform(d, n).blocks
        else:
            raise InputError("mode sm needs --partition or --blocks")
        part = VariablePartition(blocks)
        part.check(M.nvars)
        dec = sm_rank_decompose(M, part)
        bound, count = dec.bound, len(dec)
        ok = bool(verify_decomposition(M, dec))
    else:
        d = args.degree if args.degree is not None else _common_degree(M)
        if args.mode == "hom":
            dec = hom_rank_decompose(M, d)
            bound, count = dec.bound, len(dec)
            ok = bool(verify_decomposition(M, dec))
        else:
            dec = symbolic_decompose(M, d, check=True)
            bound, count, ok = len(dec), len(dec), True
    doc = formats.decomposition_to_json(dec)
    report = {"mode": args.mode, "count": count, "bound": bound, "verified": ok, "field": cfg.field_label()}
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(formats.dumps(doc))
        report["out"] = args.out
    else:
        report["decomposition"] = doc
    return report, 0


def _common_degree(M) -> int:
    for i, j, p in M.cells():
        if not p.is_zero():
            if not p.is_homogeneous():
                raise DecompositionError(f"entry ({i + 1},{j + 1}) is not homogeneous")
            return int(p.degree)
    return 0


def cmd_depth3(args, cfg: RunConfig) -> tuple[dict, int]:
    if args.action == "psi":
        return formats.psi_to_json(build_psi(args.n, args.D, args.d, cfg.field)), 0
    M = formats.polymatrix_from_json(formats.load_file(args.matrix), cfg.field)
    if M.nvars != args.D * args.n:
        raise InputError(f"matrix has {M.nvars} variables, layout needs D*n = {args.D * args.n}")
    bad = offending_entry(M, args.n, args.D, args.d)
    report = {"valid": bad is None, "n": args.n, "D": args.D, "d": args.d}
    if bad is not None:
        report["offending_entry"] = [bad[0] + 1, bad[1] + 1]
    return report, 0


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise InputError(f"bad integer list {text!r}") from exc


def cmd_gap_report(args, cfg: RunConfig) -> tuple[dict, int]:
    return {"rows": gap_report(_int_list(args.ns), _int_list(args.ds))}, 0


# ----- parser -----------------------------------------------------------------

def _global_options(defaults: bool) -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--field", default=d("rational"), help="rational | prime:P")
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--trials", type=int, default=d(None))
    p.add_argument("--sample-range", type=int, default=d(None))
    p.add_argument("--output", choices=("json", "text"), default=d("json"))
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rankbarrier", parents=[_global_options(True)],
                                     description="Rank-method barriers for Waring and tensor rank.")
    common = _global_options(False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", parents=[common], help="exact and randomized symbolic rank")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("lower-bound", parents=[common], help="rank-method lower bound with its barrier")
    p.add_argument("input")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--catalecticant", type=int, metavar="K")
    g.add_argument("--flattening", metavar="S", help="1-based modes, e.g. 1,2")
    g.add_argument("--map", metavar="FILE")
    p.add_argument("--degree", type=int, help="target degree for the catalecticant (default: input degree)")
    p.set_defaults(func=cmd_lower_bound)

    p = sub.add_parser("barrier-check", parents=[common], help="random maps against the barrier")
    p.add_argument("--family", choices=(WARING, TENSOR), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--maps", type=int, default=10)
    p.add_argument("--density", type=float, default=1.0)
    p.add_argument("--flattening-summands", type=int, default=0,
                   help="draw sums of K composed flattenings instead of dense maps")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_barrier_check)

    p = sub.add_parser("decompose", parents=[common], help="rank-1 decompositions of a polynomial matrix")
    p.add_argument("matrix")
    p.add_argument("--mode", choices=("symbolic", "hom", "sm"), required=True)
    p.add_argument("--degree", type=int)
    p.add_argument("--partition", help='1-based variable blocks, e.g. "1,2;3,4"')
    p.add_argument("--blocks", type=int, nargs=2, metavar=("D", "N"), help="D consecutive blocks of N variables")
    p.add_argument("--out")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("depth3", parents=[common], help="depth-3 symmetric image and validation")
    p.add_argument("action", choices=("psi", "validate"))
    p.add_argument("matrix", nargs="?")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_depth3)

    p = sub.add_parser("gap-report", parents=[common], help="barrier values next to known bounds")
    p.add_argument("--ns", default="2,3,4,5")
    p.add_argument("--ds", default="2,3,4,5,6")
    p.set_defaults(func=cmd_gap_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return fail("usage", str(exc), 2)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        cfg = RunConfig(field_from_spec(args.field), args.seed, args.sample_range, args.trials, args.output)
        if args.command == "depth3" and args.action == "validate" and not args.matrix:
            raise InputError("depth3 validate needs a matrix file")
        report, code = args.func(args, cfg)
    except ResourceRefusal as exc:
        return fail("resource", str(exc), 3)
    except formats.FormatError as exc:
        return fail("format", exc.message, 2, where=exc.where)
    except (InputError, *INPUT_ERRORS) as exc:
        return fail("input", str(exc), 2)
    except OSError as exc:
        return fail("io", str(exc), 2)
    emit(report, cfg)
    return code


if __name__ == "__main__":
    sys.exit(main())
