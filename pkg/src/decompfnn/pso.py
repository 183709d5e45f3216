"""Global-best particle swarm optimisation with linearly decaying inertia."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = ["PsoConfig", "PsoResult", "optimize"]


@dataclass(frozen=True)
class PsoConfig:
    """Swarm settings.

    ``bounds`` is a sequence of ``(lo, hi)`` pairs, one per dimension.
    The inertia weight falls linearly from ``inertia_range[1]`` to
    ``inertia_range[0]`` as the evaluation budget is consumed.
    """

    bounds: Sequence[tuple[float, float]]
    max_fes: int = 800
    swarm_size: int = 20
    inertia_range: tuple[float, float] = (0.1, 1.1)
    c1: float = 1.49
    c2: float = 1.49
    velocity_clamp: float = 0.2
    seed: int = 0

    def __post_init__(self):
        bounds = np.asarray(self.bounds, dtype=float)
        if bounds.ndim != 2 or bounds.shape[1] != 2 or bounds.shape[0] < 1:
            raise ValueError("bounds must be a non-empty sequence of (lo, hi) pairs")
        if not np.all(np.isfinite(bounds)) or np.any(bounds[:, 0] >= bounds[:, 1]):
            raise ValueError("bounds must be finite with lo < hi")
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be >= 2")
        if self.max_fes < self.swarm_size:
            raise ValueError(
                f"max_fes ({self.max_fes}) must be at least swarm_size ({self.swarm_size})"
            )
        w_min, w_max = self.inertia_range
        if not w_min < w_max:
            raise ValueError("inertia_range must satisfy w_min < w_max")

    @property
    def dim(self) -> int:
        return len(self.bounds)

    @classmethod
    def box(cls, dim: int, lo: float, hi: float, **kwargs) -> "PsoConfig":
        """Config for the hypercube ``[lo, hi]^dim``."""
        return cls(bounds=[(lo, hi)] * dim, **kwargs)


@dataclass
class PsoResult:
    best_position: np.ndarray
    best_value: float
    fes_used: int
    history: list[float] = field(default_factory=list, repr=False)

    def __iter__(self):
        # allows ``pos, val, fes = optimize(...)``
        return iter((self.best_position, self.best_value, self.fes_used))


def optimize(
    objective: Callable[[np.ndarray], float],
    cfg: PsoConfig,
    map_fn: Callable[[Callable, Iterable], Iterable] = map,
) -> PsoResult:
    """Minimise ``objective`` over the box ``cfg.bounds``.

    Parameters
    ----------
    objective : callable
        Maps a position vector to a finite float.
    cfg : PsoConfig
        Swarm and budget settings.
    map_fn : callable, optional
        Used to evaluate one iteration's particles, e.g.
        ``ThreadPoolExecutor().map``. Results are consumed in particle
        order, so any order-preserving map gives the same trajectory.

    Returns
    -------
    PsoResult
        Best position, its value, the number of evaluations spent and the
        global-best value after every iteration.
    """
    rng = np.random.default_rng(cfg.seed)
    bounds = np.asarray(cfg.bounds, dtype=float)
    lo, hi = bounds[:, 0], bounds[:, 1]
    width = hi - lo
    vmax = cfg.velocity_clamp * width
    n, dim = cfg.swarm_size, bounds.shape[0]
    n_iter = cfg.max_fes // n
    w_min, w_max = cfg.inertia_range

    def evaluate(positions):
        return np.array([float(v) for v in map_fn(objective, list(positions))])

    x = lo + rng.random((n, dim)) * width
    v = np.zeros((n, dim))
    values = evaluate(x)
    fes = n
    pbest, pbest_val = x.copy(), values.copy()
    g = int(np.argmin(pbest_val))
    gbest, gbest_val = pbest[g].copy(), float(pbest_val[g])
    history = [gbest_val]

    for _ in range(1, n_iter):
        w = w_max - (w_max - w_min) * fes / cfg.max_fes
        r1 = rng.random((n, dim))
        r2 = rng.random((n, dim))
        v = w * v + cfg.c1 * r1 * (pbest - x) + cfg.c2 * r2 * (gbest - x)
        v = np.clip(v, -vmax, vmax)
        x = np.clip(x + v, lo, hi)
        values = evaluate(x)
        fes += n
        improved = values < pbest_val
        pbest[improved] = x[improved]
        pbest_val[improved] = values[improved]
        g = int(np.argmin(pbest_val))
        if pbest_val[g] < gbest_val:
            gbest, gbest_val = pbest[g].copy(), float(pbest_val[g])
        history.append(gbest_val)

    return PsoResult(gbest, gbest_val, fes, history)
