"""Command-line front end.

Four subcommands: ``estimate`` fits a model and prints the report,
``sweep`` repeats the fit for resultant orders 0..K and tabulates fit
quality, ``simulate`` writes a seeded synthetic dataset, ``validate``
checks a model against a dataset. Exit codes: 0 success, 1 estimation
or data error, 2 usage error. Output is deterministic byte for byte.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .data import (
    BUILTIN_MODELS,
    BUNDLED_NAMES,
    SimSpec,
    generate_interaction_sim,
    load_builtin_model,
    load_bundled_dataset,
    read_csv_dataset,
    write_report,
)
from .engine import factor_correlation, fit_report, run_estimation
from .errors import PlsPathError
from .model import EstimationConfig, parse_model_config, validate_model
from .report import render_text


def _add_common(parser: argparse.ArgumentParser, sweep: bool = False):
    parser.add_argument("--data", required=True,
                        help=f"bundled dataset name ({'|'.join(BUNDLED_NAMES)}) or CSV path")
    parser.add_argument("--model", required=True,
                        help=f"builtin:NAME ({'|'.join(BUILTIN_MODELS)}) or JSON path")
    parser.add_argument("--mode", choices=("lohmoller", "tcpm"), default=None)
    if not sweep:
        parser.add_argument("--k", type=int, default=None, help="resultant order")
    parser.add_argument("--alpha", type=float, default=None, help="resultant exponent")
    parser.add_argument("--skip-external", action="store_true", default=None)
    parser.add_argument("--interactions", action="store_true", default=None)
    parser.add_argument("--tol", type=float, default=None, help="convergence tolerance")
    parser.add_argument("--max-iter", type=int, default=None)
    parser.add_argument("--out", type=Path, default=None, help="write CSV tables to this directory")
    if sweep:
        parser.add_argument("--k-max", type=int, default=4, help="largest resultant order")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plspath",
                                     description="latent-variable path modelling")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("estimate", help="fit a model and print the report"))
    _add_common(sub.add_parser("sweep", help="fit for k = 0..K and compare"), sweep=True)
    sim = sub.add_parser("simulate", help="write a seeded interaction simulation as CSV")
    sim.add_argument("--seed", type=int, default=0, help="unsigned 64-bit seed")
    sim.add_argument("--n", type=int, default=100, help="observations")
    sim.add_argument("--out", type=Path, default=None, help="directory for simulated.csv")
    val = sub.add_parser("validate", help="check a model against a dataset")
    val.add_argument("--data", required=True)
    val.add_argument("--model", required=True)
    return parser


def _load_data(token: str):
    if token in BUNDLED_NAMES:
        return load_bundled_dataset(token).dataset
    return read_csv_dataset(token)


def _load_model(token: str, args) -> tuple:
    if token.startswith("builtin:"):
        spec = load_builtin_model(token.removeprefix("builtin:"))
        cfg = EstimationConfig()
    else:
        spec, cfg = parse_model_config(Path(token).read_text())
    overrides = {}
    if getattr(args, "mode", None) is not None:
        overrides["mode"] = args.mode
    if getattr(args, "k", None) is not None:
        overrides["resultant_order_k"] = args.k
    if getattr(args, "alpha", None) is not None:
        overrides["alpha"] = args.alpha
    if getattr(args, "skip_external", None):
        overrides["skip_external"] = True
    if getattr(args, "interactions", None):
        overrides["with_interactions"] = True
    if getattr(args, "tol", None) is not None:
        overrides["tolerance"] = args.tol
    if getattr(args, "max_iter", None) is not None:
        overrides["max_iter"] = args.max_iter
    if overrides:
        cfg = replace(cfg, **overrides)
    return spec, cfg


def _cmd_estimate(args) -> int:
    data = _load_data(args.data)
    spec, cfg = _load_model(args.model, args)
    result = run_estimation(spec, data, cfg)
    report = fit_report(result, spec, data)
    sys.stdout.write(render_text(report))
    if args.out is not None:
        write_report(report, "csv", args.out)
    return 0


def _cmd_sweep(args) -> int:
    data = _load_data(args.data)
    spec, cfg = _load_model(args.model, args)
    if args.k_max < 0:
        raise PlsPathError("--k-max must be non-negative")
    rows = []
    deps = None
    for k in range(args.k_max + 1):
        result = run_estimation(spec, data, replace(cfg, resultant_order_k=k))
        if deps is None:
            deps = [eq.dependent for eq in result.equations]
        rows.append((k, [eq.r_squared for eq in result.equations],
                     result.converged, result.iterations))
    header = "  k" + "".join(f"  r2[{d}]" for d in deps) + "  converged  iterations"
    sys.stdout.write(header + "\n")
    lines = []
    for k, r2s, conv, iters in rows:
        cells = "".join(f"  {v:8.4f}" for v in r2s)
        line = f"  {k}{cells}  {'yes' if conv else 'no':>9s}  {iters:10d}"
        sys.stdout.write(line + "\n")
        lines.append((k, r2s, conv, iters))
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        content = ",".join(["k"] + [f"r_squared_{d}" for d in deps] + ["converged", "iterations"]) + "\r\n"
        for k, r2s, conv, iters in lines:
            cells = [str(k)] + [f"{v:.12g}" for v in r2s] + [str(int(conv)), str(iters)]
            content += ",".join(cells) + "\r\n"
        (args.out / "sweep.csv").write_text(content)
    return 0


def _cmd_simulate(args) -> int:
    if not (0 <= args.seed < 2**64):
        raise PlsPathError("--seed must fit in an unsigned 64-bit integer")
    data = generate_interaction_sim(SimSpec(seed=args.seed, n=args.n))
    lines = [",".join(data.column_names)]
    for row in data.values:
        lines.append(",".join(f"{v:.17g}" for v in row))
    text = "\r\n".join(lines) + "\r\n"
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "simulated.csv").write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_validate(args) -> int:
    data = _load_data(args.data)
    spec, _cfg = _load_model(args.model, args)
    issues = validate_model(spec, data)
    for issue in issues:
        sys.stdout.write(str(issue) + "\n")
    errors = [i for i in issues if i.severity == "error"]
    if not issues:
        sys.stdout.write("ok\n")
    return 1 if errors else 0


_COMMANDS = {
    "estimate": _cmd_estimate,
    "sweep": _cmd_sweep,
    "simulate": _cmd_simulate,
    "validate": _cmd_validate,
}


def dispatch(argv) -> int:
    """Parse ``argv`` and run one command; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints its own message
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return _COMMANDS[args.command](args)
    except PlsPathError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


def main() -> None:
    raise SystemExit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
