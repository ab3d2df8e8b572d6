"""Command-line entry point: ``coboson <command> [options]``.

Commands
  quality         bosonic-quality indicators per n
  majorize        LOCC condensation verdict (exit 0 / 3 / 4)
  counterexample  heavy-tailed zeta family with high entanglement, no majorization
  oracle          explicit Fock-space construction vs closed formulas
  scan            parameter grid sweep
  family          dump a distribution in the JSON file format
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fock_oracle
from .errors import DomainError, PauliBlockingError, ResourceLimitError, UndefinedRatioError
from .majorization import (
    DEFAULT_TOL,
    Outcome,
    check_majorization,
    first_element_test,
    gamma_condition,
    geometric_prefix_proof,
    uniform_final_test,
)
from .schmidt import (
    SchmidtDistribution,
    from_json_dict,
    full_purity,
    geometric_family,
    geometric_for_tail,
    purity_closed_form,
    random_distribution,
    to_json_dict,
    uniform_family,
    zeta_family,
)
from .symfun import chi_sequence, departure_expectation, elementary_symmetric, epsilon_norm, f_ratio, quality_report
from .zeta import riemann_zeta, zeta_tail

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_VIOLATED, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4
EXIT_BY_OUTCOME = {Outcome.MAJORIZED: EXIT_OK, Outcome.VIOLATED: EXIT_VIOLATED,
                   Outcome.INCONCLUSIVE: EXIT_INCONCLUSIVE}

N_CAP = 64
ZETA_DEFAULT_D = 10_000
HEAVY_TAIL_S = 1.2
ORACLE_FAIL = 1e-8
PI2_6 = math.pi ** 2 / 6


class InputError(Exception):
    """Bad user input; reported on stderr with exit status 2."""


def warn(msg: str):
    print(f"warning: {msg}", file=sys.stderr)


# -- parsing helpers -------------------------------------------------------


def parse_n_range(text: str) -> list[int]:
    """'5', '1..10' (inclusive) or '2,4,8'."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"cannot parse n range {text!r}") from None
    if not values or min(values) < 1 or max(values) > N_CAP:
        raise InputError(f"n range {text!r} must be non-empty within [1, {N_CAP}]")
    return values


def parse_grid(text: str, default_step: float = 0.01) -> list[float]:
    """'a:b[:step]' with inclusive stop, or a comma list."""
    try:
        if ":" in text:
            parts = [float(x) for x in text.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError
            start, stop = parts[:2]
            step = parts[2] if len(parts) == 3 else default_step
            if step <= 0 or stop < start:
                raise ValueError
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [round(start + i * step, 12) for i in range(count)]
        else:
            values = [float(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"cannot parse grid {text!r}") from None
    if not values:
        raise InputError("empty parameter grid")
    return values


def fmt(x) -> str:
    """Shortest round-trip text for floats, lowercase booleans."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if x is None:
        return ""
    return str(x)


def _jsonable(x):
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def render(rows: list[dict], kind: str, single: bool = False) -> str:
    if kind == "json":
        clean = [{k: _jsonable(v) for k, v in r.items()} for r in rows]
        payload = clean[0] if single and len(clean) == 1 else clean
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(rows[0]))
        for r in rows:
            writer.writerow([fmt(v) for v in r.values()])
    return buf.getvalue()


def emit(args, rows: list[dict], default_format: str = "csv", single: bool = False):
    text = render(rows, args.format or default_format, single)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# -- distributions ----------------------------------------------------------


def load_distribution(path: str) -> SchmidtDistribution:
    try:
        obj = json.loads(Path(path).read_text())
        return from_json_dict(obj)
    except (OSError, json.JSONDecodeError, DomainError) as exc:
        raise InputError(f"invalid distribution file {path}: {exc}") from None


def zeta_truncation(s: float, d: int | None, tail: float) -> int:
    """Smallest d with zeta tail below ``tail``, capped at ZETA_DEFAULT_D."""
    if d is not None:
        return d
    # integral estimate of the tail, then cap
    need = (tail * (s - 1.0)) ** (-1.0 / (s - 1.0)) if s > 1.0 else math.inf
    if s < HEAVY_TAIL_S or need > ZETA_DEFAULT_D:
        warn(f"zeta(s={s!r}) has a heavy tail; truncating at d={ZETA_DEFAULT_D} with the "
             f"analytic tail correction (tail mass "
             f"{zeta_tail(s, ZETA_DEFAULT_D + 1) / riemann_zeta(s):.3g}); pass --d to choose")
        return ZETA_DEFAULT_D
    return max(1, int(math.ceil(need)))


def make_distribution(family: str, param: float | None, d: int | None, tail: float,
                      file: str | None = None) -> SchmidtDistribution:
    if family == "file":
        return load_distribution(file)
    if family == "geometric":
        if param is None:
            raise InputError("geometric family needs --z")
        return geometric_family(param, d) if d else geometric_for_tail(param, tail)
    if family == "zeta":
        if param is None:
            raise InputError("zeta family needs --s")
        return zeta_family(param, zeta_truncation(param, d, tail))
    if family == "uniform":
        if not d:
            raise InputError("uniform family needs --d")
        return uniform_family(d)
    raise InputError(f"unknown family {family!r}")


def _family_of(args) -> str:
    if getattr(args, "file", None):
        return "file"
    if args.family is None:
        raise InputError("give --family or --file")
    return args.family


def _param_of(args):
    return {"geometric": args.z, "zeta": args.s}.get(args.family)


def distribution_from_args(args) -> SchmidtDistribution:
    return make_distribution(_family_of(args), _param_of(args), args.d, args.tail, args.file)


# -- commands ----------------------------------------------------------------


def cmd_quality(args) -> int:
    dist = distribution_from_args(args)
    ns = parse_n_range(args.n) if args.n else list(range(1, min(dist.d, N_CAP) + 1))
    chi = chi_sequence(dist, max(ns) + 1)
    P = full_purity(dist)
    rows = []
    for n in ns:
        if chi.is_zero(n) or (dist.tail_mass > 0.0 and n > dist.d):
            warn(f"n={n} is Pauli blocked or beyond the retained modes; stopping")
            break
        rows.append(quality_report(dist, chi, n, P).to_dict(dist.family_tag))
    emit(args, rows)
    return EXIT_OK


def majorize_record(dist: SchmidtDistribution, n: int, tol: float, max_prefixes: int) -> dict:
    chi = chi_sequence(dist, n + 1)
    verdict = check_majorization(dist, n, max_prefixes, tol, chi)
    first = first_element_test(dist, n, chi, tol)
    rec = verdict.to_dict()
    rec.update(truncation_d=dist.d, tolerance=tol,
               first_element_violated=first.violated, first_element_log_gap=first.gap)
    if n >= 2:
        g = gamma_condition(dist, n)
        rec.update(gamma_fails=g.fails_majorization, gamma_log_lhs=g.log_lhs, gamma_log_rhs=g.log_rhs)
    if dist.tail_mass == 0.0:
        rec["uniform_final_sufficient"] = uniform_final_test(dist, n).sufficient
    return rec


def cmd_majorize(args) -> int:
    if args.proof is not None:
        if args.family != "geometric" or args.z is None:
            raise InputError("--proof needs --family geometric --z")
        n = parse_n_range(args.n)[0]
        rows = [r._asdict() for r in geometric_prefix_proof(args.z, n, args.proof)]
        emit(args, [{"l": r["level"], "g_i": r["g_initial"], "g_f": r["g_final"],
                     "prefix_i": r["prefix_initial"], "prefix_f": r["prefix_final"],
                     "margin": r["margin"]} for r in rows])
        return EXIT_OK
    dist = distribution_from_args(args)
    ns = parse_n_range(args.n)
    if len(ns) != 1:
        raise InputError("majorize takes a single n")
    rec = majorize_record(dist, ns[0], args.tol, args.max_prefixes)
    emit(args, [rec], default_format="json", single=True)
    return EXIT_BY_OUTCOME[Outcome(rec["outcome"])]


def counterexample_record(epsilon: float, n: int, d: int) -> dict:
    s = 1.0 + epsilon
    dist = zeta_family(s, d)
    chi = chi_sequence(dist, n)
    P = purity_closed_form(dist)
    approx = PI2_6 * epsilon ** 2
    first = first_element_test(dist, n, chi)
    g = gamma_condition(dist, n, P)
    return {
        "epsilon": epsilon,
        "n": n,
        "truncation_d": dist.d,
        "purity": P,
        "purity_summed": full_purity(dist),
        "purity_approx": approx,
        "purity_rel_diff": abs(P - approx) / P,
        "first_element_violated": first.violated,
        "first_element_log_gap": first.gap,
        "gamma_fails": g.fails_majorization,
        "gamma_log_lhs": g.log_lhs,
        "gamma_log_rhs": g.log_rhs,
        "f_ratio": f_ratio(chi, n),
        "f_lower_bound": 1.0 - PI2_6 * n * epsilon ** 2,
    }


def cmd_counterexample(args) -> int:
    if args.epsilon <= 0:
        raise InputError("epsilon must be positive")
    if args.n * args.epsilon > 1:
        warn(f"n*epsilon = {args.n * args.epsilon:g} > 1 lies outside the small-epsilon regime")
    d = args.d or ZETA_DEFAULT_D
    emit(args, [counterexample_record(args.epsilon, args.n, d)], default_format="json", single=True)
    return EXIT_OK


def oracle_row(dist: SchmidtDistribution, n: int) -> dict:
    chi = elementary_symmetric(dist, n + 1)
    _, chi_fock = fock_oracle.number_state(dist, n)
    ann = fock_oracle.verify_annihilation(dist, n)
    pairs = {
        "chi": (chi.chi_tilde[n] * math.factorial(n), chi_fock),
        "eps_norm": (epsilon_norm(chi, n), ann.eps_norm),
        "departure": (departure_expectation(chi, n), fock_oracle.commutator_expectation(dist, n)),
        "alpha": (math.sqrt(f_ratio(chi, n)), ann.alpha),
    }
    row = {}
    worst = 0.0
    for name, (formula, oracle) in pairs.items():
        diff = abs(formula - oracle)
        worst = max(worst, diff)
        row.update({f"{name}_formula": formula, f"{name}_oracle": oracle, f"{name}_diff": diff})
    row["orthogonality_residual"] = ann.orthogonality_residual
    row["max_diff"] = worst
    return row


def cmd_oracle(args) -> int:
    if args.d > fock_oracle.MAX_MODES:
        raise ResourceLimitError(f"d={args.d} exceeds the oracle limit of {fock_oracle.MAX_MODES}")
    if not 1 <= args.n <= min(args.d, 6):
        raise InputError("need 1 <= n <= min(d, 6)")
    rng = np.random.default_rng(args.seed)
    rows = []
    for trial in range(args.trials):
        dist = random_distribution(rng, args.d)
        while dist.d < args.n:
            dist = random_distribution(rng, args.d)
        row = {"trial": trial, "d": dist.d, "n": args.n}
        row.update(oracle_row(dist, args.n))
        rows.append(row)
    emit(args, rows)
    worst = max((r["max_diff"] for r in rows), default=0.0)
    return EXIT_FAIL if worst > ORACLE_FAIL else EXIT_OK


@dataclass
class SweepConfig:
    """One scan: a family, a parameter grid and the n values per grid point."""

    family: str
    grid: list[float]
    n_values: list[int]
    d: int | None = None
    tail: float = 1e-12
    file: str | None = None
    out: str | None = None
    format: str = "csv"
    tol: float = DEFAULT_TOL
    max_prefixes: int = 20_000
    jobs: int = 1
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.grid:
            raise InputError("empty parameter grid")
        if not self.n_values or min(self.n_values) < 1 or max(self.n_values) > N_CAP:
            raise InputError(f"n values must lie in [1, {N_CAP}]")
        if not 0.0 < self.tail <= 1e-6:
            raise InputError("tail threshold must lie in (0, 1e-6]")


def scan_point(cfg: SweepConfig, param: float) -> list[dict]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if cfg.family == "uniform":
            dist = make_distribution("uniform", None, int(param), cfg.tail)
        else:
            dist = make_distribution(cfg.family, param, cfg.d, cfg.tail, cfg.file)
        chi = chi_sequence(dist, max(cfg.n_values) + 1)
        P = full_purity(dist)
        rows = []
        for n in cfg.n_values:
            row = {"family": cfg.family, "param": param, "d": dist.d, "n": n,
                   "tail_mass": dist.tail_mass, "purity": P}
            try:
                rep = quality_report(dist, chi, n, P)
                rec = majorize_record(dist, n, cfg.tol, cfg.max_prefixes)
            except (PauliBlockingError, UndefinedRatioError, DomainError):
                row.update(f_ratio=0.0, lower_bound=None, upper_bound=None, eps_norm=None,
                           departure=None, majorize_verdict="PauliBlocked", violation_index=None)
            else:
                row.update(f_ratio=rep.f_ratio, lower_bound=rep.lower_bound,
                           upper_bound=rep.upper_bound, eps_norm=rep.eps_norm,
                           departure=rep.departure, majorize_verdict=rec["outcome"],
                           violation_index=rec["violation_index"])
            rows.append(row)
    return rows


def run_scan(cfg: SweepConfig) -> list[dict]:
    """Rows in grid order, independent of worker completion order."""
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            chunks = list(pool.map(scan_point, [cfg] * len(cfg.grid), cfg.grid))
    else:
        chunks = [scan_point(cfg, p) for p in cfg.grid]
    return [r for chunk in chunks for r in chunk]


def cmd_scan(args) -> int:
    family = _family_of(args)
    if family == "geometric":
        grid = parse_grid(args.z) if args.z else None
    elif family == "zeta":
        grid = parse_grid(args.s) if args.s else None
    elif family == "uniform":
        grid = [float(x) for x in parse_grid(args.d_grid, 1.0)] if args.d_grid else None
    else:
        grid = [0.0]
    if grid is None:
        raise InputError(f"scan over {family} needs its parameter grid")
    if family == "uniform":
        grid = [int(x) for x in grid]
    if family == "zeta" and args.d is None and min(grid) < HEAVY_TAIL_S:
        warn(f"zeta grid reaches s < {HEAVY_TAIL_S}; using d={ZETA_DEFAULT_D} with tail correction")
        args.d = ZETA_DEFAULT_D
    cfg = SweepConfig(family, grid, parse_n_range(args.n), args.d, args.tail, args.file,
                      args.out, args.format or "csv", args.tol, args.max_prefixes, args.jobs)
    emit(args, run_scan(cfg))
    return EXIT_OK


def cmd_family(args) -> int:
    dist = distribution_from_args(args)
    text = json.dumps(to_json_dict(dist), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- argument parser ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="output format (default: csv; json for majorize/counterexample)")
    common.add_argument("--out", default=None, help="write output to this path instead of stdout")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="prefix-sum tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed for random-distribution trials")

    dist_opts = argparse.ArgumentParser(add_help=False)
    dist_opts.add_argument("--family", choices=("geometric", "zeta", "uniform"))
    dist_opts.add_argument("--file", help="distribution JSON file")
    dist_opts.add_argument("--d", type=int, default=None, help="number of retained modes")
    dist_opts.add_argument("--tail", type=float, default=1e-12,
                           help="target tail mass when --d is not given")

    parser = argparse.ArgumentParser(prog="coboson", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("quality", parents=[common, dist_opts], help="quality indicators per n")
    p.add_argument("--z", type=float)
    p.add_argument("--s", type=float)
    p.add_argument("--n", help="n range, e.g. 1..10 (default 1..min(d, 64))")
    p.set_defaults(func=cmd_quality)

    p = sub.add_parser("majorize", parents=[common, dist_opts], help="condensation verdict")
    p.add_argument("--z", type=float)
    p.add_argument("--s", type=float)
    p.add_argument("--n", required=True)
    p.add_argument("--max-prefixes", type=int, default=100_000)
    p.add_argument("--proof", type=int, default=None, metavar="L",
                   help="emit the geometric prefix proof table up to level L instead")
    p.set_defaults(func=cmd_majorize)

    p = sub.add_parser("counterexample", parents=[common], help="zeta(1+eps) counterexample")
    p.add_argument("--epsilon", type=float, default=0.02)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--d", type=int, default=None,
                   help=f"retained modes (default {ZETA_DEFAULT_D}, tail-corrected)")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("oracle", parents=[common], help="Fock-space oracle comparison")
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--trials", type=int, default=50)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("scan", parents=[common, dist_opts], help="parameter sweep")
    p.add_argument("--z", help="grid a:b[:step] or comma list")
    p.add_argument("--s", help="grid a:b[:step] or comma list")
    p.add_argument("--d-grid", help="grid of d values for the uniform family")
    p.add_argument("--n", required=True)
    p.add_argument("--max-prefixes", type=int, default=20_000)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("family", parents=[common, dist_opts], help="write a distribution file")
    p.add_argument("--z", type=float)
    p.add_argument("--s", type=float)
    p.set_defaults(func=cmd_family)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, DomainError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
