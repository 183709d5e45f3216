"""Forecast error metrics and Welch's unequal-variance t-test."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from decompfnn.exceptions import DegenerateComparisonError

__all__ = [
    "RunSet",
    "WelchResult",
    "mape",
    "rmse",
    "welch_t_test",
    "betainc_regularized",
    "student_t_sf2",
]

SIGNIFICANCE = 0.05


def _pair(y, yhat) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=float)
    yhat = np.asarray(yhat, dtype=float)
    if y.shape != yhat.shape:
        raise ValueError(f"length mismatch: {y.shape} vs {yhat.shape}")
    if y.size < 1:
        raise ValueError("need at least one sample")
    return y, yhat


def mape(y, yhat) -> float:
    """Mean absolute percentage error as a fraction (0.075 means 7.5 %)."""
    y, yhat = _pair(y, yhat)
    zeros = np.flatnonzero(y == 0)
    if zeros.size:
        raise ZeroDivisionError(f"target is zero at index {int(zeros[0])}")
    return float(np.mean(np.abs((y - yhat) / y)))


def rmse(y, yhat) -> float:
    y, yhat = _pair(y, yhat)
    d = y - yhat
    return float(np.sqrt(np.mean(d * d)))


@dataclass(frozen=True)
class RunSet:
    """One metric value per independent run."""

    values: tuple[float, ...]
    label: str = ""

    def __init__(self, values, label: str = ""):
        vals = tuple(float(v) for v in values)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("run values must be finite")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "label", label)

    def __len__(self):
        return len(self.values)

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def std(self) -> float:
        return float(np.std(self.values, ddof=1)) if len(self.values) > 1 else float("nan")


@dataclass(frozen=True)
class WelchResult:
    t: float
    dof: float
    p_value: float

    def significant(self, alpha: float = SIGNIFICANCE) -> bool:
        return self.p_value < alpha

    def __iter__(self):
        return iter((self.t, self.dof, self.p_value))


# Lentz's continued fraction for the incomplete beta function.
_CF_MAX_ITER = 500
_CF_EPS = 1e-16
_CF_TINY = 1e-300


def _beta_cf(a: float, b: float, x: float) -> float:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularised incomplete beta ``I_x(a, b)`` for ``a, b > 0`` and ``0 <= x <= 1``."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    # the fraction converges fast only below the mean; use symmetry above it
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def student_t_sf2(t: float, dof: float) -> float:
    """Two-tailed tail probability ``P(|T| >= |t|)`` for Student's t with ``dof`` degrees."""
    if math.isinf(t):
        return 0.0
    if t == 0.0:
        return 1.0
    x = dof / (dof + t * t)
    return min(1.0, max(0.0, betainc_regularized(0.5 * dof, 0.5, x)))


def welch_t_test(a, b) -> WelchResult:
    """Two-tailed Welch t-test of ``mean(a) == mean(b)``.

    ``a`` and ``b`` are :class:`RunSet` objects or plain sequences, each
    with at least two values. The statistic is positive when ``a`` has the
    larger mean.
    """
    xa = np.asarray(a.values if isinstance(a, RunSet) else a, dtype=float)
    xb = np.asarray(b.values if isinstance(b, RunSet) else b, dtype=float)
    n1, n2 = xa.size, xb.size
    if n1 < 2 or n2 < 2:
        raise ValueError("each run set needs at least two values")
    m1, m2 = float(xa.mean()), float(xb.mean())
    v1, v2 = float(xa.var(ddof=1)), float(xb.var(ddof=1))
    q1, q2 = v1 / n1, v2 / n2
    se2 = q1 + q2
    if se2 == 0.0:
        if m1 == m2:
            raise DegenerateComparisonError("both run sets are constant with equal means")
        return WelchResult(math.copysign(math.inf, m1 - m2), float(n1 + n2 - 2), 0.0)
    t = (m1 - m2) / math.sqrt(se2)
    dof = se2 * se2 / (q1 * q1 / (n1 - 1) + q2 * q2 / (n2 - 1))
    return WelchResult(t, dof, student_t_sf2(t, dof))
