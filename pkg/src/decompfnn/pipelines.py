"""Composite forecasters: plain MFRFNN, DCT-MFRFNN, VMD-MFRFNN and persistence.

All methods use the direct multi-step strategy: a model maps ``x[t]`` to
``x[t + h]`` in one application. Predictions are produced for every target
index ``h .. p-1`` and carry the target's split, so metrics can be taken on
any of train, validation or test. Metrics always compare against the
original, undecomposed series.

By default the DCT smoothing and the VMD run once over the whole series.
That lets later samples influence earlier component values; set
``strict=True`` to decompose the training split only and extend the
components causally (expanding window, last sample kept).
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from decompfnn.data import TimeSeries
from decompfnn.metrics import mape, rmse
from decompfnn.mfrfnn import MfrfnnConfig, MfrfnnModel, train
from decompfnn.pso import PsoConfig
from decompfnn.transforms import dct_smooth, kept_count_for
from decompfnn.vmd import VmdConfig, vmd_decompose

__all__ = [
    "METHODS",
    "PipelineConfig",
    "Forecast",
    "decompose_series",
    "train_mfrfnn",
    "train_dct_mfrfnn",
    "train_vmd_mfrfnn",
    "persistence",
    "predict",
    "run_method",
    "resample_rules",
    "INDEX_RULES",
    "INDEX_SETTINGS",
    "index_config",
]

logger = logging.getLogger(__name__)

METHODS = ("mfrfnn", "dct-mfrfnn", "vmd-mfrfnn", "persistence")
SPLITS = ("train", "val", "test")

INDEX_RULES = {
    "hsi": (6, 6, 6, 5, 5, 5, 4, 4, 4),
    "sse": (4, 4, 4, 3, 3, 3, 2, 2, 2),
    "spx": (4, 4, 4, 3, 3, 3, 2, 2, 2),
}

# tuned per-index settings: state rules K2, states N, PSO budget, DCT lambda
INDEX_SETTINGS = {
    "hsi": {"state_rules": 2, "num_states": 2, "max_fes": 600, "lambda_pct": 80.0},
    "sse": {"state_rules": 4, "num_states": 2, "max_fes": 800, "lambda_pct": 85.0},
    "spx": {"state_rules": 2, "num_states": 2, "max_fes": 600, "lambda_pct": 86.0},
}


@dataclass(frozen=True)
class PipelineConfig:
    """Everything needed to train one method at one horizon.

    ``output_rules`` is the output-network rule count for the single-model
    methods (``mfrfnn``, ``dct-mfrfnn``); it defaults to the largest entry
    of ``per_imf_rules``.
    """

    method: str = "vmd-mfrfnn"
    horizon: int = 1
    lambda_pct: float = 0.0
    vmd: VmdConfig = field(default_factory=VmdConfig)
    per_imf_rules: tuple[int, ...] = INDEX_RULES["hsi"]
    state_rules: int = 2
    num_states: int = 2
    output_rules: int | None = None
    pso: PsoConfig = field(default_factory=lambda: PsoConfig(bounds=[(-5.0, 5.0)], max_fes=600))
    runs: int = 1
    seed: int = 0
    strict: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ValueError("horizon must be a positive integer")
        if not 0.0 <= self.lambda_pct <= 100.0:
            raise ValueError("lambda_pct must lie in [0, 100]")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        object.__setattr__(self, "per_imf_rules", tuple(int(r) for r in self.per_imf_rules))
        if self.method == "vmd-mfrfnn" and len(self.per_imf_rules) != self.vmd.num_modes:
            raise ValueError(
                f"per_imf_rules has {len(self.per_imf_rules)} entries but vmd.num_modes is {self.vmd.num_modes}"
            )

    @property
    def single_rules(self) -> int:
        return self.output_rules if self.output_rules is not None else max(self.per_imf_rules)

    def mfrfnn_config(self, output_rules: int) -> MfrfnnConfig:
        return MfrfnnConfig(output_rules, self.state_rules, self.num_states)

    def parameter_count(self) -> int:
        if self.method == "persistence":
            return 0
        if self.method == "vmd-mfrfnn":
            return sum((k1 + self.state_rules) * self.num_states for k1 in self.per_imf_rules)
        return (self.single_rules + self.state_rules) * self.num_states

    def run_seeds(self) -> list[int]:
        """Base seed of each independent run; model ``i`` of a run uses ``base + i``."""
        return [self.seed + 1000 * r for r in range(self.runs)]


@dataclass
class Forecast:
    """Aligned targets and predictions for target indices ``h .. p-1``.

    ``components`` holds the per-model predictions (one row per model);
    ``predictions`` is their sum.
    """

    method: str
    horizon: int
    seed: int
    target_index: np.ndarray
    targets: np.ndarray
    predictions: np.ndarray
    split: tuple[int, int]
    dates: tuple = ()
    components: np.ndarray | None = None
    models: list[MfrfnnModel] = field(default_factory=list, repr=False)

    def mask(self, which: str) -> np.ndarray:
        train_end, val_end = self.split
        idx = self.target_index
        if which == "train":
            return idx < train_end
        if which == "val":
            return (idx >= train_end) & (idx < val_end)
        if which == "test":
            return idx >= val_end
        if which == "all":
            return np.ones(idx.size, dtype=bool)
        raise ValueError(f"unknown split {which!r}")

    def subset(self, which: str) -> tuple[np.ndarray, np.ndarray]:
        m = self.mask(which)
        return self.targets[m], self.predictions[m]

    def metrics(self, which: str = "test") -> dict[str, float]:
        y, yhat = self.subset(which)
        return {"rmse": rmse(y, yhat), "mape": mape(y, yhat)}

    def split_dates(self, which: str) -> list:
        m = self.mask(which)
        return [self.dates[i] for i in self.target_index[m]] if self.dates else []

    @property
    def parameter_count(self) -> int:
        return sum(m.parameter_count for m in self.models)


def index_config(name: str, method: str = "vmd-mfrfnn", horizon: int = 1, **overrides) -> "PipelineConfig":
    """Pipeline settings tuned for one of the three index series (9 IMFs)."""
    key = name.lower()
    st = INDEX_SETTINGS[key]
    kw = dict(
        method=method,
        horizon=horizon,
        lambda_pct=st["lambda_pct"],
        vmd=VmdConfig(num_modes=9),
        per_imf_rules=INDEX_RULES[key],
        state_rules=st["state_rules"],
        num_states=st["num_states"],
        pso=PsoConfig(bounds=[(-5.0, 5.0)], max_fes=st["max_fes"]),
    )
    kw.update(overrides)
    return PipelineConfig(**kw)


def resample_rules(rules: Sequence[int], K: int) -> tuple[int, ...]:
    """Stretch a per-mode rule list to ``K`` modes, keeping its low-to-high shape."""
    rules = list(rules)
    if K == len(rules):
        return tuple(rules)
    return tuple(rules[min(len(rules) - 1, (i * len(rules)) // K)] for i in range(K))


def _causal_extend(values: np.ndarray, start: int, transform: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Rows of ``transform(values[:start])`` followed, for each later ``t``,
    by the last sample of ``transform(values[:t + 1])``."""
    head = np.atleast_2d(transform(values[:start]))
    out = np.empty((head.shape[0], values.size))
    out[:, :start] = head
    for t in range(start, values.size):
        out[:, t] = np.atleast_2d(transform(values[: t + 1]))[:, -1]
    return out


def decompose_series(series: TimeSeries, cfg: PipelineConfig) -> np.ndarray:
    """Component signals fed to the per-component models, shape ``(n_models, p)``."""
    x = np.asarray(series.values, dtype=float)
    if cfg.method in ("mfrfnn", "persistence"):
        return x[None, :].copy()

    if cfg.method == "dct-mfrfnn":
        def transform(v):
            return dct_smooth(v, cfg.lambda_pct)

        if kept_count_for(x.size, cfg.lambda_pct) == 1:
            warnings.warn(
                f"lambda={cfg.lambda_pct} zeroes every DCT coefficient; the smoothed input is constant",
                stacklevel=2,
            )
    else:
        def transform(v):
            return vmd_decompose(v, cfg.vmd).modes

    if cfg.strict:
        train_end = series.split[0] if series.split else x.size
        return _causal_extend(x, train_end, transform)
    return np.atleast_2d(transform(x))


def _train_component(
    signal: np.ndarray,
    cfg: PipelineConfig,
    train_end: int,
    output_rules: int,
    seed: int,
    map_fn,
) -> tuple[MfrfnnModel, np.ndarray]:
    h = cfg.horizon
    n_pairs = train_end - h
    if n_pairs < 1:
        raise ValueError(f"training split ({train_end}) too short for horizon {h}")
    model = train(
        cfg.mfrfnn_config(output_rules),
        signal[:n_pairs],
        signal[h:train_end],
        pso_cfg=cfg.pso,
        seed=seed,
        map_fn=map_fn,
    )
    return model, model.predict(signal[:-h])


def _require_split(series: TimeSeries) -> tuple[int, int]:
    if series.split is None:
        raise ValueError("series must be split into train/val/test first")
    return series.split


def _forecast(series, cfg, seed, predictions, components=None, models=()) -> Forecast:
    h = cfg.horizon
    x = np.asarray(series.values, dtype=float)
    return Forecast(
        method=cfg.method,
        horizon=h,
        seed=seed,
        target_index=np.arange(h, x.size),
        targets=x[h:].copy(),
        predictions=predictions,
        split=series.split,
        dates=series.dates,
        components=components,
        models=list(models),
    )


def _train_single(series, cfg, seed, components, map_fn) -> Forecast:
    train_end, _ = _require_split(series)
    if components is None:
        components = decompose_series(series, cfg)
    model, pred = _train_component(components[0], cfg, train_end, cfg.single_rules, seed, map_fn)
    return _forecast(series, cfg, seed, pred, pred[None, :], [model])


def train_mfrfnn(series: TimeSeries, cfg: PipelineConfig, seed: int | None = None,
                 components: np.ndarray | None = None, map_fn=map) -> Forecast:
    """One MFRFNN on the raw series."""
    cfg = replace(cfg, method="mfrfnn") if cfg.method != "mfrfnn" else cfg
    return _train_single(series, cfg, cfg.seed if seed is None else seed, components, map_fn)


def train_dct_mfrfnn(series: TimeSeries, cfg: PipelineConfig, seed: int | None = None,
                     components: np.ndarray | None = None, map_fn=map) -> Forecast:
    """DCT-truncate the series, then train one MFRFNN on the smoothed signal.

    Training pairs are ``(xs[t], xs[t + h])`` of the smoothed signal ``xs``
    inside the training split; reported targets are the original values.
    """
    cfg = replace(cfg, method="dct-mfrfnn") if cfg.method != "dct-mfrfnn" else cfg
    return _train_single(series, cfg, cfg.seed if seed is None else seed, components, map_fn)


def train_vmd_mfrfnn(series: TimeSeries, cfg: PipelineConfig, seed: int | None = None,
                     components: np.ndarray | None = None, map_fn=map) -> Forecast:
    """Decompose with VMD, train one MFRFNN per mode and sum their predictions.

    Modes are held in ascending centre frequency, but ``per_imf_rules`` is
    listed from the highest-frequency mode down, so mode ``i`` of ``K`` uses
    ``per_imf_rules[K - 1 - i]`` output rules. Its seed is ``seed + i``.
    """
    cfg = replace(cfg, method="vmd-mfrfnn") if cfg.method != "vmd-mfrfnn" else cfg
    seed = cfg.seed if seed is None else seed
    train_end, _ = _require_split(series)
    if components is None:
        components = decompose_series(series, cfg)
    if components.shape[0] != len(cfg.per_imf_rules):
        raise ValueError(
            f"{components.shape[0]} modes but {len(cfg.per_imf_rules)} per-mode rule counts"
        )
    models, preds = [], []
    # the rule list runs from the highest-frequency mode to the trend
    for i, (imf, k1) in enumerate(zip(components, cfg.per_imf_rules[::-1])):
        model, pred = _train_component(imf, cfg, train_end, k1, seed + i, map_fn)
        models.append(model)
        preds.append(pred)
    preds = np.vstack(preds)
    return _forecast(series, cfg, seed, _sum_rows(preds), preds, models)


def _sum_rows(rows: np.ndarray) -> np.ndarray:
    total = np.zeros(rows.shape[1])
    for row in rows:
        total = total + row
    return total


def persistence(series: TimeSeries, cfg: PipelineConfig, seed: int | None = None, **_) -> Forecast:
    """``x[t + h]`` is predicted as ``x[t]``."""
    cfg = replace(cfg, method="persistence") if cfg.method != "persistence" else cfg
    _require_split(series)
    x = np.asarray(series.values, dtype=float)
    pred = x[: -cfg.horizon].copy()
    return _forecast(series, cfg, cfg.seed if seed is None else seed, pred, pred[None, :])


def predict(models: Sequence[MfrfnnModel] | None, inputs, horizon: int) -> np.ndarray:
    """Direct ``h``-step predictions from per-component inputs.

    ``inputs`` has one row per model (or is 1-D for a single model).
    Prediction ``j`` targets index ``j + horizon``, so the last ``horizon``
    inputs produce forecasts beyond the series end. With ``models=None``
    this is the persistence forecast of a 1-D input.
    """
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if not models:
        return _sum_rows(inputs)
    if len(models) != inputs.shape[0]:
        raise ValueError(f"{len(models)} models for {inputs.shape[0]} input rows")
    return _sum_rows(np.vstack([m.predict(row) for m, row in zip(models, inputs)]))


_TRAINERS = {
    "mfrfnn": train_mfrfnn,
    "dct-mfrfnn": train_dct_mfrfnn,
    "vmd-mfrfnn": train_vmd_mfrfnn,
    "persistence": persistence,
}


def run_method(
    series: TimeSeries,
    cfg: PipelineConfig,
    seed: int | None = None,
    components: np.ndarray | None = None,
    map_fn: Callable[[Callable, Iterable], Iterable] = map,
) -> Forecast:
    """Dispatch on ``cfg.method``. Pass ``components`` to reuse a decomposition."""
    trainer = _TRAINERS[cfg.method]
    if cfg.method == "persistence":
        return trainer(series, cfg, seed)
    return trainer(series, cfg, seed, components=components, map_fn=map_fn)
