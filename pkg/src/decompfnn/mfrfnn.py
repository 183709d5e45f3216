"""Multi-functional recurrent fuzzy neural network (MFRFNN).

Two zero-order fuzzy networks share one scalar input. The output network
fires ``K1`` triangular rules and blends their consequents through a
latent state vector ``s`` on the probability simplex::

    y(t)   = phi(x(t))^T W s(t)                   W: K1 x N
    s(t+1) = softmax(V^T psi(x(t)) + s(t))        V: K2 x N

``W`` is fitted by ridge-regularised least squares with ``V`` fixed; ``V``
is searched by particle swarm optimisation, each candidate scored by the
training RMSE after its own least-squares fit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable

import numba
import numpy as np

from decompfnn.data import MinMaxScaler, minmax_scaler
from decompfnn.exceptions import InternalCorruptionError
from decompfnn.pso import PsoConfig, optimize

__all__ = [
    "FuzzyPartition",
    "MfrfnnConfig",
    "MfrfnnModel",
    "build_fuzzy_partition",
    "fire",
    "forward",
    "run_sequence",
    "feature_matrix",
    "fit_output_weights",
    "regularized_objective",
    "train",
]

FIRE_EPS = 1e-12
RIDGE = 1e-8


@dataclass(frozen=True)
class FuzzyPartition:
    """Triangular membership grid. With one rule the membership is constant 1."""

    centers: np.ndarray
    lo: float
    hi: float

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=float)
        if centers.ndim != 1 or centers.size < 1:
            raise ValueError("a partition needs at least one center")
        if not self.lo < self.hi:
            raise ValueError("partition requires lo < hi")
        if centers.size > 1 and np.any(np.diff(centers) <= 0):
            raise ValueError("centers must be strictly increasing")
        centers.setflags(write=False)
        object.__setattr__(self, "centers", centers)

    @property
    def size(self) -> int:
        return self.centers.size


def build_fuzzy_partition(lo: float, hi: float, K: int) -> FuzzyPartition:
    """``K`` evenly spaced triangle peaks from ``lo`` to ``hi``."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got lo={lo}, hi={hi}")
    if int(K) != K or K < 1:
        raise ValueError(f"need K >= 1, got {K}")
    centers = np.array([0.5 * (lo + hi)]) if K == 1 else np.linspace(lo, hi, int(K))
    return FuzzyPartition(centers, float(lo), float(hi))


def fire(p: FuzzyPartition, x) -> np.ndarray:
    """Normalised firing strengths.

    Scalar ``x`` gives a length-``K`` vector; an array of shape ``(T,)``
    gives a ``(T, K)`` matrix. The outermost rules are shoulder-extended so
    inputs outside the training range still fire.
    """
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    xs = np.atleast_1d(x_arr)
    K = p.size
    if K == 1:
        mu = np.ones((xs.size, 1))
    else:
        c = p.centers
        idx = np.clip(np.searchsorted(c, xs, side="right") - 1, 0, K - 2)
        frac = np.clip((xs - c[idx]) / (c[idx + 1] - c[idx]), 0.0, 1.0)
        mu = np.zeros((xs.size, K))
        rows = np.arange(xs.size)
        mu[rows, idx] = 1.0 - frac
        mu[rows, idx + 1] += frac
    mu /= np.maximum(mu.sum(axis=1, keepdims=True), FIRE_EPS)
    return mu[0] if scalar else mu


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max())
    return e / e.sum()


@numba.njit(cache=True)
def _roll_states(drive):
    # drive[t] = V^T psi(x(t)); returns the state feeding output t
    T, N = drive.shape
    out = np.empty((T, N))
    s = np.full(N, 1.0 / N)
    z = np.empty(N)
    for t in range(T):
        out[t] = s
        zmax = -np.inf
        for j in range(N):
            z[j] = drive[t, j] + s[j]
            if z[j] > zmax:
                zmax = z[j]
        total = 0.0
        for j in range(N):
            z[j] = np.exp(z[j] - zmax)
            total += z[j]
        for j in range(N):
            s[j] = z[j] / total
    return out


@dataclass(frozen=True)
class MfrfnnConfig:
    output_rules: int
    state_rules: int
    num_states: int
    v_bound: float = 5.0
    ridge: float = RIDGE

    def __post_init__(self):
        for name in ("output_rules", "state_rules", "num_states"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value}")

    @property
    def parameter_count(self) -> int:
        return (self.output_rules + self.state_rules) * self.num_states


@dataclass
class MfrfnnModel:
    output_partition: FuzzyPartition
    state_partition: FuzzyPartition
    W: np.ndarray
    V: np.ndarray
    num_states: int
    input_scaler: MinMaxScaler | None = None
    target_scaler: MinMaxScaler | None = None
    seed: int | None = None
    train_rmse: float | None = field(default=None, compare=False)

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=float)
        self.V = np.asarray(self.V, dtype=float)
        K1, K2, N = self.output_partition.size, self.state_partition.size, self.num_states
        if self.W.shape != (K1, N):
            raise ValueError(f"W has shape {self.W.shape}, expected {(K1, N)}")
        if self.V.shape != (K2, N):
            raise ValueError(f"V has shape {self.V.shape}, expected {(K2, N)}")

    @property
    def parameter_count(self) -> int:
        return self.W.size + self.V.size

    def check_finite(self):
        if not (np.all(np.isfinite(self.W)) and np.all(np.isfinite(self.V))):
            raise InternalCorruptionError("model weights contain non-finite values")

    def states(self, xs) -> np.ndarray:
        """State trajectory ``(T, N)`` for scaled inputs ``xs``."""
        xs = np.asarray(xs, dtype=float)
        if xs.size == 0:
            return np.empty((0, self.num_states))
        drive = fire(self.state_partition, xs) @ self.V
        return _roll_states(np.ascontiguousarray(drive))

    def predict(self, raw_inputs) -> np.ndarray:
        """Run from the uniform state over unscaled inputs; returns unscaled outputs."""
        xs = np.asarray(raw_inputs, dtype=float)
        if self.input_scaler is not None:
            xs = self.input_scaler.transform(xs)
        ys, _ = run_sequence(self, xs)
        return self.target_scaler.inverse(ys) if self.target_scaler is not None else ys

    def to_dict(self) -> dict:
        def part(p: FuzzyPartition):
            return {"centers": p.centers.tolist(), "lo": p.lo, "hi": p.hi}

        return {
            "kind": "mfrfnn",
            "num_states": self.num_states,
            "output_partition": part(self.output_partition),
            "state_partition": part(self.state_partition),
            "W": self.W.tolist(),
            "V": self.V.tolist(),
            "input_scaler": self.input_scaler.to_dict() if self.input_scaler else None,
            "target_scaler": self.target_scaler.to_dict() if self.target_scaler else None,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MfrfnnModel":
        def part(p):
            return FuzzyPartition(np.array(p["centers"], dtype=float), p["lo"], p["hi"])

        def scaler(s):
            return MinMaxScaler(s["lo"], s["hi"]) if s else None

        N = int(d["num_states"])
        op, sp = part(d["output_partition"]), part(d["state_partition"])
        return cls(
            output_partition=op,
            state_partition=sp,
            W=np.array(d["W"], dtype=float).reshape(op.size, N),
            V=np.array(d["V"], dtype=float).reshape(sp.size, N),
            num_states=N,
            input_scaler=scaler(d.get("input_scaler")),
            target_scaler=scaler(d.get("target_scaler")),
            seed=d.get("seed"),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "MfrfnnModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def empty_model(cfg: MfrfnnConfig, lo: float = 0.0, hi: float = 1.0) -> MfrfnnModel:
    """Model with zero weights on partitions spanning ``[lo, hi]``."""
    N = cfg.num_states
    return MfrfnnModel(
        output_partition=build_fuzzy_partition(lo, hi, cfg.output_rules),
        state_partition=build_fuzzy_partition(lo, hi, cfg.state_rules),
        W=np.zeros((cfg.output_rules, N)),
        V=np.zeros((cfg.state_rules, N)),
        num_states=N,
    )


def forward(m: MfrfnnModel, x: float, s) -> tuple[float, np.ndarray]:
    """One step: output for ``x`` under state ``s`` and the next state."""
    m.check_finite()
    s = np.asarray(s, dtype=float)
    phi = fire(m.output_partition, x)
    psi = fire(m.state_partition, x)
    y = float(phi @ m.W @ s)
    return y, _softmax(m.V.T @ psi + s)


def run_sequence(m: MfrfnnModel, xs) -> tuple[np.ndarray, np.ndarray]:
    """Outputs and the states that produced them, starting from the uniform state.

    ``states[t]`` is the state used for ``ys[t]``; the state after the last
    input is not returned.
    """
    m.check_finite()
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        return np.empty(0), np.empty((0, m.num_states))
    states = m.states(xs)
    phi = fire(m.output_partition, xs)
    ys = np.einsum("tk,kn,tn->t", phi, m.W, states)
    return ys, states


def feature_matrix(phi: np.ndarray, states: np.ndarray) -> np.ndarray:
    """Rows ``outer(phi(t), s(t))`` flattened in ``W``'s row-major order."""
    T = phi.shape[0]
    return (phi[:, :, None] * states[:, None, :]).reshape(T, -1)


def _solve_ridge(F: np.ndarray, y: np.ndarray, ridge: float) -> np.ndarray:
    n_feat = F.shape[1]
    A = np.vstack([F, np.sqrt(ridge) * np.eye(n_feat)])
    b = np.concatenate([y, np.zeros(n_feat)])
    w, *_ = np.linalg.lstsq(A, b, rcond=None)
    return w


def regularized_objective(F: np.ndarray, y: np.ndarray, w: np.ndarray, ridge: float = RIDGE) -> float:
    r = F @ w - y
    return float(r @ r + ridge * (w @ w))


def fit_output_weights(m: MfrfnnModel, xs, targets, ridge: float = RIDGE) -> np.ndarray:
    """Least-squares output weights for fixed state weights.

    Minimises ``||F vec(W) - targets||^2 + ridge ||vec(W)||^2`` where row
    ``t`` of ``F`` is ``outer(phi(x(t)), s(t))``. Inputs and targets are in
    scaled units. Returns ``W`` with shape ``(K1, N)``.
    """
    xs = np.asarray(xs, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if xs.size < 1:
        raise ValueError("need at least one sample")
    if xs.shape != targets.shape:
        raise ValueError(f"inputs {xs.shape} and targets {targets.shape} differ in shape")
    F = feature_matrix(fire(m.output_partition, xs), m.states(xs))
    return _solve_ridge(F, targets, ridge).reshape(m.output_partition.size, m.num_states)


def train(
    cfg: MfrfnnConfig,
    xs,
    targets,
    pso_cfg: PsoConfig | None = None,
    seed: int = 0,
    map_fn: Callable[[Callable, Iterable], Iterable] = map,
) -> MfrfnnModel:
    """Fit a model to unscaled training pairs ``(xs[t], targets[t])``.

    Min-max scalers come from the training arrays. ``V`` is searched by PSO
    over ``[-v_bound, v_bound]^(K2 N)``; ``pso_cfg`` supplies budget and
    swarm settings (its bounds are replaced, its seed by ``seed``). With a
    single state the recurrence is inert, so PSO is skipped and ``V = 0``.
    """
    xs = np.asarray(xs, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if xs.size < 1:
        raise ValueError("training series is empty")
    if xs.shape != targets.shape:
        raise ValueError("inputs and targets differ in shape")

    K1, K2, N = cfg.output_rules, cfg.state_rules, cfg.num_states
    dim = K2 * N
    pso_cfg = replace(
        pso_cfg or PsoConfig(bounds=[(-1.0, 1.0)]),
        bounds=[(-cfg.v_bound, cfg.v_bound)] * dim,
        seed=seed,
    )

    in_scaler = minmax_scaler(xs, allow_degenerate=True)
    out_scaler = minmax_scaler(targets, allow_degenerate=True)
    zx = in_scaler.transform(xs)
    zy = out_scaler.transform(targets)

    model = empty_model(cfg)
    model.input_scaler, model.target_scaler, model.seed = in_scaler, out_scaler, seed
    phi = fire(model.output_partition, zx)
    psi = fire(model.state_partition, zx)

    def fitted(v_flat):
        V = np.asarray(v_flat, dtype=float).reshape(K2, N)
        states = _roll_states(np.ascontiguousarray(psi @ V))
        F = feature_matrix(phi, states)
        w = _solve_ridge(F, zy, cfg.ridge)
        resid = F @ w - zy
        return V, w, float(np.sqrt(np.mean(resid * resid)))

    if N == 1:
        best_v = np.zeros(dim)
    else:
        best_v = optimize(lambda v: fitted(v)[2], pso_cfg, map_fn=map_fn).best_position

    V, w, score = fitted(best_v)
    model.V = V
    model.W = w.reshape(K1, N)
    model.train_rmse = score
    model.check_finite()
    return model
