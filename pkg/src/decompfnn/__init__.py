"""Decomposition-based financial time-series forecasting with recurrent fuzzy networks.

Two composite forecasters are provided: DCT smoothing followed by a
multi-functional recurrent fuzzy neural network (MFRFNN), and variational
mode decomposition with one MFRFNN per mode whose predictions are summed.
"""

from decompfnn.exceptions import (
    DataError,
    DataOrderError,
    DegenerateComparisonError,
    DegenerateScaleError,
    InternalCorruptionError,
    SchemaError,
    TooShortError,
)
from decompfnn.transforms import (
    SpectralCoefficients,
    dct_forward,
    dct_inverse,
    dct_smooth,
    truncate_high_freq,
)
from decompfnn.vmd import ImfSet, VmdConfig, vmd_decompose, vmd_reconstruct
from decompfnn.pso import PsoConfig, PsoResult, optimize
from decompfnn.mfrfnn import (
    FuzzyPartition,
    MfrfnnConfig,
    MfrfnnModel,
    build_fuzzy_partition,
    fire,
    fit_output_weights,
    train,
)
from decompfnn.metrics import RunSet, WelchResult, mape, rmse, welch_t_test
from decompfnn.data import MinMaxScaler, TimeSeries, load_csv, make_pairs, split_chronological

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "DataOrderError",
    "DegenerateComparisonError",
    "DegenerateScaleError",
    "FuzzyPartition",
    "ImfSet",
    "InternalCorruptionError",
    "MfrfnnConfig",
    "MfrfnnModel",
    "MinMaxScaler",
    "PsoConfig",
    "PsoResult",
    "RunSet",
    "SchemaError",
    "SpectralCoefficients",
    "TimeSeries",
    "TooShortError",
    "VmdConfig",
    "WelchResult",
    "build_fuzzy_partition",
    "dct_forward",
    "dct_inverse",
    "dct_smooth",
    "fire",
    "fit_output_weights",
    "load_csv",
    "make_pairs",
    "mape",
    "optimize",
    "rmse",
    "split_chronological",
    "train",
    "truncate_high_freq",
    "vmd_decompose",
    "vmd_reconstruct",
    "welch_t_test",
]
