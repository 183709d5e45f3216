"""Command-line entry point.

Exit codes: 0 success, 2 bad parameters or config, 3 unreadable or malformed data.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import json
import logging
import platform
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from decompfnn import __version__
from decompfnn.data import describe, load_csv
from decompfnn.exceptions import DataError
from decompfnn.experiment import ConfigError, format_summary, load_config, run_experiment, run_sensitivity
from decompfnn.transforms import dct_smooth, kept_count_for
from decompfnn.vmd import VmdConfig, vmd_decompose, write_modes_csv

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3

log = logging.getLogger("decompfnn")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on its own; keep that and the message on stderr
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def parse_range(text: str) -> list[float]:
    """``"2,5,9"`` or ``"start:stop[:step]"`` (inclusive stop)."""
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) not in (2, 3):
            raise UsageError(f"bad range {text!r}")
        start, stop = parts[0], parts[1]
        step = parts[2] if len(parts) == 3 else 1.0
        if step <= 0:
            raise UsageError("range step must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        values = [start + i * step for i in range(max(n, 0))]
    else:
        values = [float(p) for p in text.split(",") if p.strip()]
    return [int(v) if float(v).is_integer() else v for v in values]


def _write_meta(out_dir: Path, command: str, extra: dict | None = None) -> None:
    meta = {
        "command": command,
        "timestamp": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
    }
    meta.update(extra or {})
    (out_dir / "run_meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")


def cmd_decompose(args) -> int:
    try:
        ts = load_csv(args.input, args.column)
    except (OSError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.input).stem
    x = ts.values

    if args.method == "vmd":
        cfg = VmdConfig(
            num_modes=args.k, alpha=args.alpha, tau=args.tau, tolerance=args.tol,
            max_iterations=args.max_iter, init=args.init,
        )
        imfs = vmd_decompose(x, cfg)
        target = out_dir / f"{stem}_vmd_modes.csv"
        write_modes_csv(imfs, target, cfg)
        if not imfs.converged:
            log.warning("VMD stopped at the iteration limit (%d), residual %.3g",
                        imfs.iterations_used, imfs.final_residual)
        print(f"wrote {target} ({imfs.num_modes} modes, {x.size} rows)")
        return EXIT_OK

    recon = dct_smooth(x, args.lam)
    target = out_dir / f"{stem}_dct.csv"
    with target.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "reconstructed"])
        for d, v in zip(ts.dates, recon):
            writer.writerow([d.isoformat(), repr(float(v))])
    meta = {
        "method": "dct",
        "lambda": args.lam,
        "kept_count": kept_count_for(x.size, args.lam),
        "source_length": int(x.size),
        "column": args.column,
    }
    target.with_suffix(".json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {target} (kept_count={meta['kept_count']})")
    return EXIT_OK


def cmd_run(args) -> int:
    exp = load_config(args.config)
    out_dir = Path(args.out)
    report = run_experiment(exp, out_dir, jobs=args.jobs, plots=not args.no_plots)
    _write_meta(out_dir, "run", {"config_path": str(Path(args.config).resolve())})
    print(format_summary(report), end="")
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    exp = load_config(args.config)
    try:
        values = parse_range(args.range)
    except ValueError as exc:
        raise UsageError(f"bad range {args.range!r}: {exc}") from exc
    if not values:
        raise UsageError("empty sweep range")
    if args.runs is not None:
        exp = replace(exp, base=replace(exp.base, runs=args.runs))
    out_dir = Path(args.out)
    rows = run_sensitivity(exp, args.sweep, values, out_dir, jobs=args.jobs)
    _write_meta(out_dir, "sensitivity", {"sweep": args.sweep, "values": values})
    for r in rows:
        std = "" if r["rmse_std"] is None else f" ({r['rmse_std']:.2E})"
        print(f"{args.sweep}={r['value']}: RMSE {r['rmse_mean']:.2E}{std}")
    return EXIT_OK


def cmd_describe(args) -> int:
    try:
        ts = load_csv(args.input, args.column)
    except (OSError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    stats = describe(ts.values)
    stats["dropped_rows"] = ts.dropped_rows
    print(json.dumps(stats, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="decompfnn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decompose", help="VMD modes or DCT-smoothed series of a price CSV")
    p.add_argument("input")
    p.add_argument("--method", choices=("vmd", "dct"), required=True)
    p.add_argument("--column", default="Close")
    p.add_argument("--out", default=".")
    defaults = VmdConfig()
    p.add_argument("--k", type=int, default=defaults.num_modes)
    p.add_argument("--alpha", type=float, default=defaults.alpha)
    p.add_argument("--tau", type=float, default=defaults.tau)
    p.add_argument("--tol", type=float, default=defaults.tolerance)
    p.add_argument("--max-iter", type=int, default=defaults.max_iterations)
    p.add_argument("--init", choices=("uniform", "zero", "random"), default=defaults.init)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0, help="percent of DCT coefficients to zero")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("run", help="run a configured experiment")
    p.add_argument("config")
    p.add_argument("--out", default="results")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sensitivity", help="sweep the number of IMFs or lambda")
    p.add_argument("config")
    p.add_argument("--sweep", choices=("k", "lambda"), required=True)
    p.add_argument("--range", required=True, help="'2,5,9' or 'start:stop[:step]'")
    p.add_argument("--runs", type=int, default=None, help="override the config's run count")
    p.add_argument("--out", default="results")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("describe", help="sample count, min, max, mean, std of a price CSV")
    p.add_argument("input")
    p.add_argument("--column", default="Close")
    p.set_defaults(func=cmd_describe)
    return parser


def _validate_args(args) -> None:
    if args.command == "decompose":
        if args.method == "vmd":
            if args.k < 1:
                raise UsageError("--k must be >= 1")
            VmdConfig(num_modes=args.k, alpha=args.alpha, tau=args.tau, tolerance=args.tol,
                      max_iterations=args.max_iter, init=args.init)
        elif not 0.0 <= args.lam <= 100.0:
            raise UsageError("--lambda must lie in [0, 100]")
    if getattr(args, "jobs", 1) < 1:
        raise UsageError("--jobs must be >= 1")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        _validate_args(args)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.keys:
            print("offending keys: " + ", ".join(exc.keys), file=sys.stderr)
        return EXIT_CONFIG
    except (UsageError, ValueError) as exc:
        if isinstance(exc, DataError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
