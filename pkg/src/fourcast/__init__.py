"""fourcast: sinusoidal-network fitting and extrapolation for time series."""

from .fft import dft_naive, fft
from .init import InitConfig, fourier_init, perturb, random_init
from .model_io import FORMAT_VERSION, ModelFormatError
from .model_io import load as load_model
from .model_io import save as save_model
from .network import (
    DivergenceError,
    Layer,
    Network,
    TimeScale,
    UnitKind,
    activate,
    activate_deriv,
    forward,
    gradient,
    sgd_step,
)
from .postprocess import low_pass
from .regularize import l1_step, l2_step, reg_factor
from .rng import Xoshiro256StarStar
from .signal import (
    MackeyGlassParams,
    TimeSeries,
    gen_mackey_glass,
    gen_sine_trend,
    load_csv,
    rmse,
    split,
    write_csv,
)
from .trainer import TrainConfig, TrainLog, TrainState, baseline_train, train, tune

__version__ = "0.1.0"

__all__ = [
    "DivergenceError",
    "FORMAT_VERSION",
    "InitConfig",
    "Layer",
    "MackeyGlassParams",
    "ModelFormatError",
    "Network",
    "TimeScale",
    "TimeSeries",
    "TrainConfig",
    "TrainLog",
    "TrainState",
    "UnitKind",
    "Xoshiro256StarStar",
    "activate",
    "activate_deriv",
    "baseline_train",
    "dft_naive",
    "fft",
    "forward",
    "fourier_init",
    "gen_mackey_glass",
    "gen_sine_trend",
    "gradient",
    "l1_step",
    "l2_step",
    "load_csv",
    "load_model",
    "low_pass",
    "perturb",
    "random_init",
    "reg_factor",
    "rmse",
    "save_model",
    "sgd_step",
    "split",
    "train",
    "tune",
    "write_csv",
    "__version__",
]
