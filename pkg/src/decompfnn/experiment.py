"""Experiment configuration, repeated-run execution and report artefacts.

A config is one JSON document::

    {
      "data": {"path": "sse.csv", "column": "Close", "splits": [1478, 370, 370]},
      "methods": ["mfrfnn", "dct-mfrfnn", "vmd-mfrfnn"],
      "horizons": [1, 3, 5],
      "runs": 20,
      "seed": 0,
      "vmd": {"num_modes": 9, "alpha": 2000},
      "dct": {"lambda": 85},
      "mfrfnn": {"per_imf_rules": [4, 4, 4, 3, 3, 3, 2, 2, 2], "state_rules": 4, "num_states": 2},
      "pso": {"max_fes": 800, "swarm": 20}
    }

``method`` / ``horizon`` are accepted as scalar aliases of ``methods`` /
``horizons``. Relative data paths resolve against the config file.
"""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import jsonschema
import numpy as np

from decompfnn import svg
from decompfnn.data import TimeSeries, load_csv, split_chronological
from decompfnn.exceptions import DegenerateComparisonError
from decompfnn.metrics import SIGNIFICANCE, mape, rmse, welch_t_test
from decompfnn.pipelines import METHODS, Forecast, PipelineConfig, decompose_series, resample_rules, run_method
from decompfnn.pso import PsoConfig
from decompfnn.vmd import VmdConfig

__all__ = [
    "CONFIG_SCHEMA",
    "ConfigError",
    "Experiment",
    "parse_config",
    "load_config",
    "run_experiment",
    "run_sensitivity",
    "read_predictions_csv",
    "sci",
]

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Config document does not validate; ``keys`` lists the offending paths."""

    def __init__(self, message: str, keys=()):
        super().__init__(message)
        self.keys = list(keys)


_POS_INT = {"type": "integer", "minimum": 1}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["data"],
    "properties": {
        "data": {
            "type": "object",
            "additionalProperties": False,
            "required": ["path", "splits"],
            "properties": {
                "path": {"type": "string", "minLength": 1},
                "column": {"type": "string", "minLength": 1},
                "splits": {"type": "array", "items": _POS_INT, "minItems": 3, "maxItems": 3},
            },
        },
        "method": {"enum": list(METHODS)},
        "methods": {"type": "array", "items": {"enum": list(METHODS)}, "minItems": 1, "uniqueItems": True},
        "horizon": _POS_INT,
        "horizons": {"type": "array", "items": _POS_INT, "minItems": 1, "uniqueItems": True},
        "runs": _POS_INT,
        "seed": {"type": "integer", "minimum": 0},
        "reference": {"enum": list(METHODS)},
        "strict": {"type": "boolean"},
        "vmd": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "num_modes": _POS_INT,
                "alpha": {"type": "number", "exclusiveMinimum": 0},
                "tau": {"type": "number", "minimum": 0},
                "tolerance": {"type": "number", "exclusiveMinimum": 0},
                "max_iterations": _POS_INT,
                "init": {"enum": ["uniform", "zero", "random"]},
                "seed": {"type": "integer", "minimum": 0},
            },
        },
        "dct": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"lambda": {"type": "number", "minimum": 0, "maximum": 100}},
        },
        "mfrfnn": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "per_imf_rules": {"type": "array", "items": _POS_INT, "minItems": 1},
                "output_rules": _POS_INT,
                "state_rules": _POS_INT,
                "num_states": _POS_INT,
            },
        },
        "pso": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"max_fes": _POS_INT, "swarm": {"type": "integer", "minimum": 2}},
        },
    },
}


@dataclass(frozen=True)
class Experiment:
    data_path: Path
    column: str
    splits: tuple[int, int, int]
    methods: tuple[str, ...]
    horizons: tuple[int, ...]
    base: PipelineConfig
    reference: str
    raw: dict

    def pipeline(self, method: str, horizon: int) -> PipelineConfig:
        return replace(self.base, method=method, horizon=horizon)

    def load_series(self) -> TimeSeries:
        """Read and split the data file. I/O and data errors propagate."""
        ts = load_csv(self.data_path, self.column)
        return split_chronological(ts, *self.splits)


def _error_path(err: jsonschema.ValidationError) -> str:
    parts = [str(p) for p in err.absolute_path]
    if err.validator == "additionalProperties":
        extra = sorted(set(err.instance) - set(err.schema.get("properties", {})))
        return ".".join(parts + [",".join(extra)]) if parts else ",".join(extra)
    if err.validator == "required":
        missing = [k for k in err.validator_value if k not in err.instance]
        return ".".join(parts + missing[:1])
    return ".".join(parts) or "<root>"


def parse_config(doc: dict, base_dir: Path | str = ".") -> Experiment:
    """Validate ``doc`` and build an :class:`Experiment`.

    Raises :class:`ConfigError` listing every offending key.
    """
    validator = jsonschema.Draft7Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        keys = sorted({_error_path(e) for e in errors})
        raise ConfigError("invalid config: " + "; ".join(f"{_error_path(e)}: {e.message}" for e in errors), keys)

    data = doc["data"]
    path = Path(data["path"])
    if not path.is_absolute():
        path = Path(base_dir) / path

    methods = tuple(doc.get("methods") or [doc.get("method", "vmd-mfrfnn")])
    horizons = tuple(doc.get("horizons") or [doc.get("horizon", 1)])
    if "method" in doc and "methods" in doc:
        raise ConfigError("give either 'method' or 'methods', not both", ["method", "methods"])
    if "horizon" in doc and "horizons" in doc:
        raise ConfigError("give either 'horizon' or 'horizons', not both", ["horizon", "horizons"])

    vmd_doc = doc.get("vmd", {})
    mf = doc.get("mfrfnn", {})
    pso_doc = doc.get("pso", {})
    try:
        vmd = VmdConfig(**vmd_doc)
        rules = tuple(mf.get("per_imf_rules", resample_rules((6, 6, 6, 5, 5, 5, 4, 4, 4), vmd.num_modes)))
        base = PipelineConfig(
            method=methods[0],
            horizon=horizons[0],
            lambda_pct=float(doc.get("dct", {}).get("lambda", 0.0)),
            vmd=vmd,
            per_imf_rules=rules,
            state_rules=mf.get("state_rules", 2),
            num_states=mf.get("num_states", 2),
            output_rules=mf.get("output_rules"),
            pso=PsoConfig(
                bounds=[(-5.0, 5.0)],
                max_fes=pso_doc.get("max_fes", 600),
                swarm_size=pso_doc.get("swarm", 20),
            ),
            runs=doc.get("runs", 1),
            seed=doc.get("seed", 0),
            strict=doc.get("strict", False),
        )
        # per-method validation (e.g. mode/rule count agreement)
        for m in methods:
            replace(base, method=m)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}", ["vmd", "mfrfnn", "pso"]) from exc

    reference = doc.get("reference") or ("vmd-mfrfnn" if "vmd-mfrfnn" in methods else methods[0])
    return Experiment(
        data_path=path,
        column=data.get("column", "Close"),
        splits=tuple(data["splits"]),
        methods=methods,
        horizons=horizons,
        base=base,
        reference=reference,
        raw=doc,
    )


def load_config(path) -> Experiment:
    """Read a JSON config file. ``OSError`` on unreadable files, :class:`ConfigError` otherwise."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})", ["<root>"]) from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object", ["<root>"])
    return parse_config(doc, path.parent)


def sci(v: float) -> str:
    """Table-style scientific notation, e.g. ``3.16E-01``."""
    return "-" if v is None or not np.isfinite(v) else f"{v:.2E}"


def _one_run(args) -> Forecast:
    series, cfg, seed, components = args
    return run_method(series, cfg, seed=seed, components=components)


def _run_forecasts(series, cfg, components, jobs) -> list[Forecast]:
    tasks = [(series, cfg, s, components) for s in cfg.run_seeds()]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_one_run, tasks))
    return [_one_run(t) for t in tasks]


def predictions_filename(method: str, horizon: int, seed: int) -> str:
    return f"predictions_{method}_{horizon}_{seed}.csv"


def write_predictions_csv(path: Path, forecast: Forecast, which: str = "test") -> None:
    y, yhat = forecast.subset(which)
    dates = forecast.split_dates(which)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "target", "prediction", "error"])
        for d, a, b in zip(dates, y, yhat):
            writer.writerow([d.isoformat(), repr(float(a)), repr(float(b)), repr(float(a - b))])


def read_predictions_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """``(target, prediction)`` columns of an emitted predictions file."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return (
        np.array([float(r["target"]) for r in rows]),
        np.array([float(r["prediction"]) for r in rows]),
    )


def _stats_entry(rmses, mapes_pct) -> dict:
    entry = {
        "runs": len(rmses),
        "rmse": list(rmses),
        "mape_pct": list(mapes_pct),
        "rmse_mean": float(np.mean(rmses)),
        "mape_mean": float(np.mean(mapes_pct)),
    }
    if len(rmses) >= 2:
        entry["rmse_std"] = float(np.std(rmses, ddof=1))
        entry["mape_std"] = float(np.std(mapes_pct, ddof=1))
    return entry


def _welch_entry(a, b) -> dict:
    try:
        res = welch_t_test(a, b)
    except DegenerateComparisonError as exc:
        return {"t": None, "dof": None, "p_value": None, "significant": False, "note": str(exc)}
    return {
        "t": res.t if np.isfinite(res.t) else None,
        "dof": res.dof,
        "p_value": res.p_value,
        "significant": bool(res.p_value < SIGNIFICANCE),
    }


def run_experiment(exp: Experiment, out_dir, jobs: int = 1, plots: bool = True) -> dict:
    """Run every method x horizon for ``runs`` seeds and write artefacts into ``out_dir``.

    Writes ``report.json`` (deterministic for a given config), one
    predictions CSV per run holding the test split, one SVG per method and
    horizon, and ``summary.txt``. Returns the report dict.
    """
    series = exp.load_series()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results: dict[str, dict[str, dict]] = {}

    decomp_cache: dict[tuple, np.ndarray] = {}
    for method in exp.methods:
        results[method] = {}
        for h in exp.horizons:
            cfg = exp.pipeline(method, h)
            key = (method, cfg.lambda_pct, cfg.vmd, cfg.strict)
            if key not in decomp_cache:
                decomp_cache[key] = decompose_series(series, cfg)
            forecasts = _run_forecasts(series, cfg, decomp_cache[key], jobs)

            files, rmses, mapes = [], [], []
            for fc in forecasts:
                name = predictions_filename(method, h, fc.seed)
                write_predictions_csv(out_dir / name, fc)
                y, yhat = read_predictions_csv(out_dir / name)
                rmses.append(rmse(y, yhat))
                mapes.append(100.0 * mape(y, yhat))
                files.append(name)
            entry = _stats_entry(rmses, mapes)
            entry["seeds"] = [fc.seed for fc in forecasts]
            entry["parameter_count"] = cfg.parameter_count()
            entry["predictions"] = files
            if plots:
                plot = f"plot_{method}_{h}.svg"
                y, yhat = forecasts[0].subset("test")
                (out_dir / plot).write_text(
                    svg.prediction_figure(y, yhat, title=f"{method}, h={h}, seed {forecasts[0].seed}"),
                    encoding="utf-8",
                )
                entry["plot"] = plot
            results[method][str(h)] = entry
            logger.info("%s h=%d: RMSE %s", method, h, sci(entry["rmse_mean"]))

    if exp.base.runs >= 2 and exp.reference in results:
        for method in exp.methods:
            if method == exp.reference:
                continue
            for h in exp.horizons:
                ref, other = results[exp.reference][str(h)], results[method][str(h)]
                results[method][str(h)]["t_test"] = {
                    "reference": exp.reference,
                    "rmse": _welch_entry(ref["rmse"], other["rmse"]),
                    "mape": _welch_entry(ref["mape_pct"], other["mape_pct"]),
                }

    report = {
        "config": exp.raw,
        "data": {
            "path": str(exp.data_path),
            "column": exp.column,
            "samples": len(series),
            "split": list(series.split),
            "dropped_rows": series.dropped_rows,
        },
        "reference": exp.reference,
        "results": results,
    }
    (out_dir / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out_dir / "summary.txt").write_text(format_summary(report), encoding="utf-8")
    return report


def format_summary(report: dict) -> str:
    """Plain-text table: method, step, MAPE (%), RMSE, p-values."""
    lines = [f"{'Method':<12} {'Step':>4}  {'MAPE (%)':>20}  {'p':>9}  {'RMSE':>20}  {'p':>9}"]
    for method, by_h in report["results"].items():
        for h, e in by_h.items():
            def cell(name):
                mean, std = e[f"{name}_mean"], e.get(f"{name}_std")
                return sci(mean) + (f" ({sci(std)})" if std is not None else "")

            tt = e.get("t_test", {})
            p_m = sci(tt["mape"]["p_value"]) if tt and tt["mape"]["p_value"] is not None else "-"
            p_r = sci(tt["rmse"]["p_value"]) if tt and tt["rmse"]["p_value"] is not None else "-"
            lines.append(f"{method:<12} {h:>4}  {cell('mape'):>20}  {p_m:>9}  {cell('rmse'):>20}  {p_r:>9}")
    return "\n".join(lines) + "\n"


SWEEPS = {"k": "vmd-mfrfnn", "lambda": "dct-mfrfnn"}


def sweep_config(exp: Experiment, sweep: str, value: float) -> PipelineConfig:
    method = SWEEPS[sweep]
    cfg = exp.pipeline(method, exp.horizons[0])
    if sweep == "k":
        K = int(value)
        return replace(cfg, vmd=replace(cfg.vmd, num_modes=K), per_imf_rules=resample_rules(cfg.per_imf_rules, K))
    return replace(cfg, lambda_pct=float(value))


def run_sensitivity(exp: Experiment, sweep: str, values, out_dir, jobs: int = 1) -> list[dict]:
    """Mean/std test RMSE over ``runs`` seeds for each sweep value.

    Writes ``sensitivity_<sweep>.csv`` and ``sensitivity_<sweep>.svg``.
    """
    if sweep not in SWEEPS:
        raise ConfigError(f"unknown sweep {sweep!r}", ["sweep"])
    if SWEEPS[sweep] not in exp.methods:
        raise ConfigError(
            f"sweep {sweep!r} needs method {SWEEPS[sweep]!r}; config has {list(exp.methods)}", ["method"]
        )
    values = list(values)
    if not values:
        raise ConfigError("empty sweep range", ["range"])
    series = exp.load_series()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    for value in values:
        try:
            cfg = sweep_config(exp, sweep, value)
        except ValueError as exc:
            raise ConfigError(f"sweep value {value}: {exc}", ["range"]) from exc
        comps = decompose_series(series, cfg)
        scores = [fc.metrics("test")["rmse"] for fc in _run_forecasts(series, cfg, comps, jobs)]
        rows.append({
            "value": value,
            "rmse_mean": float(np.mean(scores)),
            "rmse_std": float(np.std(scores, ddof=1)) if len(scores) > 1 else None,
            "rmse": scores,
        })
        logger.info("%s=%s: RMSE %s", sweep, value, sci(rows[-1]["rmse_mean"]))

    with (out_dir / f"sensitivity_{sweep}.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["value", "rmse_mean", "rmse_std"])
        for r in rows:
            writer.writerow([r["value"], repr(r["rmse_mean"]), "" if r["rmse_std"] is None else repr(r["rmse_std"])])
    label = "number of IMFs" if sweep == "k" else "lambda (%)"
    (out_dir / f"sensitivity_{sweep}.svg").write_text(
        svg.line_chart(
            [("RMSE", [r["value"] for r in rows], [r["rmse_mean"] for r in rows])],
            title=f"RMSE vs {label}", xlabel=label, ylabel="test RMSE", markers=True,
        ),
        encoding="utf-8",
    )
    return rows
