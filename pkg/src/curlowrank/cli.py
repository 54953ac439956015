"""Command-line interface: factorizations, sample-size calculators, experiments.

Exit codes: 0 on success, 2 on usage/configuration errors, 1 on runtime
failures.  All matrix files use the Matrix Market "array real general"
format; experiment results land in CSV with a trailing ``# summary`` block.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .cluster import parse_model_spec
from .cur import approx_error, build_cur, randomized_cur
from .deim import deim_cur
from .errors import ConfigError, DomainError
from .harness import (
    ExperimentConfig,
    config_from_mapping,
    config_from_text,
    emit_csv,
    run_experiment,
    trial_generator,
)
from .linalg import COLS, ROWS, compact_svd, condition_number, numerical_rank, stable_rank
from .mmio import read_matrix
from .sampling import (
    leverage_dist,
    length_dist,
    min_sample_size_rv,
    sample_size_length_via_lev,
    sample_size_leverage,
    uniform_dist,
)


def _emit(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _common_flags(sub):
    sub.add_argument("--seed", type=int, default=0, help="master seed for any randomness")
    sub.add_argument("--tol", type=float, default=None, help="rank/exactness tolerance override")
    sub.add_argument("--out", default=None, help="output file (default: stdout, or CSV path)")


def _dists_for(a, scheme, k):
    if scheme == "uniform":
        return uniform_dist(a.shape[0], ROWS), uniform_dist(a.shape[1], COLS)
    if scheme == "length":
        return length_dist(a, ROWS), length_dist(a, COLS)
    if k is None:
        raise ConfigError("leverage sampling needs --k", field="k")
    return leverage_dist(a, k, ROWS), leverage_dist(a, k, COLS)


def _cmd_svd(args):
    a = read_matrix(args.infile)
    rank = numerical_rank(a, args.tol)
    lines = [f"shape: {a.shape[0]} {a.shape[1]}", f"numerical_rank: {rank}"]
    if rank > 0:
        f = compact_svd(a, args.tol)
        sigmas = " ".join(format(s, ".17g") for s in f.all_singular_values)
        lines.append(f"singular_values: {sigmas}")
        lines.append(f"stable_rank: {stable_rank(a):.17g}")
        lines.append(f"condition_number: {condition_number(a, args.tol):.17g}")
    _emit(lines, args.out)
    return 0


def _cmd_cur(args):
    a = read_matrix(args.infile)
    rng = trial_generator(args.seed, 0)
    row_dist, col_dist = _dists_for(a, args.scheme, args.k)
    factors = randomized_cur(a, row_dist, col_dist, args.d1, args.d2, rng,
                             dedup=args.dedup, tol=args.tol)
    rel_f = approx_error(a, factors, "frobenius") / np.linalg.norm(a)
    rel_2 = approx_error(a, factors, "spectral") / np.linalg.norm(a, 2)
    _emit([
        f"scheme: {factors.scheme_tag}",
        "rows: " + " ".join(str(i) for i in factors.I),
        "cols: " + " ".join(str(j) for j in factors.J),
        f"rel_err_F: {rel_f:.17g}",
        f"rel_err_2: {rel_2:.17g}",
    ], args.out)
    return 0


def _cmd_deim(args):
    a = read_matrix(args.infile)
    factors = deim_cur(a, args.k, args.tol)
    rel_f = approx_error(a, factors, "frobenius") / np.linalg.norm(a)
    _emit([
        "rows: " + " ".join(str(i) for i in factors.I),
        "cols: " + " ".join(str(j) for j in factors.J),
        f"rel_err_F: {rel_f:.17g}",
    ], args.out)
    return 0


def _cmd_sample_size(args):
    lines = [
        f"replacement_sampling_d: {min_sample_size_rv(args.r, args.eps, args.delta, args.c)}"
    ]
    if args.k is not None:
        lines.append(
            f"leverage_dominated_d: {sample_size_leverage(args.k, args.beta, args.delta)}"
        )
        if args.kappa is not None:
            lines.append(
                "length_via_leverage_d: "
                f"{sample_size_length_via_lev(args.r, args.kappa, args.k, args.delta)}"
            )
    _emit(lines, args.out)
    return 0


def _summary_lines(summary):
    lines = []
    for group in summary.get("groups", []):
        parts = []
        for key, val in group.items():
            if isinstance(val, float):
                parts.append(f"{key}={val:.6g}")
            else:
                parts.append(f"{key}={val}")
        lines.append(" ".join(parts))
    return lines


def _cmd_experiment(args):
    if args.config:
        with open(args.config) as fh:
            cfg = config_from_text(fh.read())
        overrides = {}
        if args.seed is not None:
            overrides["master_seed"] = args.seed
        if args.out:
            overrides["out_path"] = args.out
        if overrides:
            mapping = {f: getattr(cfg, f) for f in cfg.__dataclass_fields__}
            mapping.update(overrides)
            cfg = ExperimentConfig(**mapping)
    else:
        mapping = {
            "kind": args.kind,
            "m": args.m,
            "n": args.n,
            "k": args.k,
            "sigma": args.sigma,
            "scheme": args.scheme,
            "trials": args.trials,
            "master_seed": args.seed if args.seed is not None else 0,
            "sparsity": args.sparsity,
            "dedup": args.dedup,
            "timing": args.timing,
        }
        if args.d:
            mapping["d_grid"] = tuple(args.d)
        if args.eps is not None:
            mapping["eps"] = args.eps
        if args.delta is not None:
            mapping["delta"] = args.delta
        if args.c is not None:
            mapping["big_c"] = args.c
        if args.kappa is not None:
            mapping["kappa"] = args.kappa
        if args.tol is not None:
            mapping["tol"] = args.tol
        if args.out:
            mapping["out_path"] = args.out
        cfg = config_from_mapping(mapping)
    records, summary = run_experiment(cfg)
    if cfg.out_path:
        emit_csv(records, summary, cfg.out_path)
    _emit(_summary_lines(summary), None)
    return 0


def _cmd_cluster(args):
    if args.spec:
        with open(args.spec) as fh:
            model = parse_model_spec(fh.read())
    else:
        if args.ambient is None or not args.dims or not args.points:
            raise ConfigError("give --spec or all of --ambient/--dims/--points", field="spec")
        from .cluster import SubspaceSpec

        model = SubspaceSpec(
            args.ambient,
            tuple(int(t) for t in args.dims.split(",")),
            tuple(int(t) for t in args.points.split(",")),
        )
    seed = args.seed if args.seed is not None else (model.seed or 0)
    mapping = {
        "kind": "clustering",
        "m": model.ambient_dim,
        "dims": model.dims,
        "points": model.points,
        "scheme": args.scheme,
        "trials": args.trials,
        "master_seed": seed,
        "dedup": args.dedup,
    }
    if args.d is not None:
        mapping["d_grid"] = (args.d,)
    if args.d_max is not None:
        mapping["d_max"] = args.d_max
    if args.tol is not None:
        mapping["tol"] = args.tol
    cfg = config_from_mapping(mapping)
    records, summary = run_experiment(cfg)
    if args.out:
        emit_csv(records, summary, args.out)
    _emit(_summary_lines(summary), None)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curlowrank",
        description="Exact CUR decompositions of low-rank matrices via sampling.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("svd", help="print rank, spectrum, stable rank, condition number")
    p.add_argument("--in", dest="infile", required=True, help="matrix file (.mtx)")
    _common_flags(p)
    p.set_defaults(func=_cmd_svd)

    p = sub.add_parser("cur", help="sample a CUR decomposition of a matrix file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--scheme", choices=("uniform", "length", "leverage"), default="length")
    p.add_argument("--d1", type=int, required=True, help="row draws")
    p.add_argument("--d2", type=int, required=True, help="column draws")
    p.add_argument("--k", type=int, default=None, help="leverage truncation rank")
    p.add_argument("--dedup", action="store_true", help="drop repeated indices")
    _common_flags(p)
    p.set_defaults(func=_cmd_cur)

    p = sub.add_parser("deim", help="deterministic greedy index selection")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--k", type=int, required=True)
    _common_flags(p)
    p.set_defaults(func=_cmd_deim)

    p = sub.add_parser("sample-size", help="print the sampling-count formulas")
    p.add_argument("--r", type=float, required=True, help="stable rank")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--c", type=float, default=1.0, help="leading constant")
    p.add_argument("--k", type=int, default=None, help="rank (enables the leverage bounds)")
    p.add_argument("--beta", type=float, default=1.0, help="leverage dominance floor")
    p.add_argument("--kappa", type=float, default=None, help="condition number")
    _common_flags(p)
    p.set_defaults(func=_cmd_sample_size)

    p = sub.add_parser("experiment", help="run a Monte Carlo experiment, write CSV")
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("--kind", choices=("success_prob", "noise_stability", "deim_check", "clustering"))
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--scheme", choices=("uniform", "length", "leverage"), default="length")
    p.add_argument("--d", type=int, nargs="*", default=None, help="draw-count grid")
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--c", type=float, default=None, help="leading constant")
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--sparsity", type=float, default=0.0, help="fraction of columns zeroed")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--dedup", action="store_true")
    p.add_argument("--timing", action="store_true",
                   help="record wall time per trial (breaks byte reproducibility)")
    _common_flags(p)
    p.set_defaults(func=_cmd_experiment, seed=None)

    p = sub.add_parser("cluster", help="union-of-subspaces clustering experiment")
    p.add_argument("--spec", default=None, help="model spec file (key=value block)")
    p.add_argument("--ambient", type=int, default=None)
    p.add_argument("--dims", default=None, help="comma list of subspace dims")
    p.add_argument("--points", default=None, help="comma list of points per subspace")
    p.add_argument("--scheme", choices=("uniform", "length", "leverage"), default="length")
    p.add_argument("--d", type=int, default=None, help="draw count per axis")
    p.add_argument("--d-max", dest="d_max", type=int, default=None)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--dedup", action="store_true")
    _common_flags(p)
    p.set_defaults(func=_cmd_cluster, seed=None)

    return parser


def cli_main(argv=None) -> int:
    """Entry point returning an exit code instead of raising SystemExit."""
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
