"""Orthonormal DCT-II / DCT-III and high-frequency coefficient truncation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import fft

__all__ = [
    "SpectralCoefficients",
    "dct_forward",
    "dct_inverse",
    "truncate_high_freq",
    "dct_smooth",
    "kept_count_for",
]


@dataclass(frozen=True)
class SpectralCoefficients:
    """DCT coefficient vector plus truncation bookkeeping.

    ``kept_count`` is the 1-based index of the first zeroed coefficient, so
    ``kept_count == source_length + 1`` means the spectrum is untruncated.
    """

    values: np.ndarray
    kept_count: int
    source_length: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("coefficient vector must be 1-D and non-empty")
        if values.size != self.source_length:
            raise ValueError(
                f"values has {values.size} entries, source_length is {self.source_length}"
            )
        if not 1 <= self.kept_count <= self.source_length + 1:
            raise ValueError(f"kept_count {self.kept_count} outside [1, {self.source_length + 1}]")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def _as_signal(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("expected a 1-D signal")
    if x.size == 0:
        raise ValueError("signal is empty")
    if not np.all(np.isfinite(x)):
        raise ValueError("signal contains non-finite entries")
    return x


def dct_forward(x) -> SpectralCoefficients:
    """Orthonormal DCT-II of ``x``.

    ``y[k] = a(k) * sum_n x[n] cos(pi (2n+1) k / 2N)`` with ``a(0) = sqrt(1/N)``
    and ``a(k) = sqrt(2/N)`` otherwise.
    """
    x = _as_signal(x)
    y = fft.dct(x, type=2, norm="ortho")
    return SpectralCoefficients(y, kept_count=x.size + 1, source_length=x.size)


def dct_inverse(c: SpectralCoefficients) -> np.ndarray:
    """Orthonormal inverse (DCT-III) of a coefficient vector."""
    values = np.asarray(c.values, dtype=float)
    if values.size == 0:
        raise ValueError("coefficient vector is empty")
    return fft.idct(values, type=2, norm="ortho")


def kept_count_for(p: int, lambda_pct: float) -> int:
    """1-based index of the first zeroed coefficient: ``floor(p (100 - lambda) / 100) + 1``."""
    if not 0.0 <= lambda_pct <= 100.0:
        raise ValueError(f"lambda_pct must lie in [0, 100], got {lambda_pct}")
    # rounding guards against 0.1-style binary artefacts landing just below an integer
    return math.floor(round(p * (100.0 - lambda_pct) / 100.0, 9)) + 1


def truncate_high_freq(c: SpectralCoefficients, lambda_pct: float) -> SpectralCoefficients:
    """Zero the top ``lambda_pct`` percent of coefficients.

    Coefficients at 1-based indices ``n..p`` are set to zero where
    ``n = floor(p (100 - lambda_pct) / 100) + 1``. Truncating an
    already-truncated spectrum never un-zeroes anything.
    """
    p = c.source_length
    n = kept_count_for(p, lambda_pct)
    values = np.array(c.values, dtype=float)
    values[n - 1 :] = 0.0
    return SpectralCoefficients(values, kept_count=min(n, c.kept_count), source_length=p)


def dct_smooth(x, lambda_pct: float) -> np.ndarray:
    """Low-pass ``x`` by DCT truncation and return the reconstructed signal.

    When nothing is truncated the input is returned unchanged (a copy), so
    ``lambda_pct = 0`` is an exact identity rather than a round trip.
    """
    x = _as_signal(x)
    n = kept_count_for(x.size, lambda_pct)
    if n > x.size:
        return x.copy()
    return dct_inverse(truncate_high_freq(dct_forward(x), lambda_pct))
