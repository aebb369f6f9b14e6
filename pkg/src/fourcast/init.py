"""Network construction: spectrum-seeded sinusoids plus identity scaffolding.

``fourier_init`` builds the four-layer network so that, before any
perturbation, evaluating it at input n/k returns training value n
exactly: the FFT of the training window fixes each sinusoid's
amplitude and phase, and the remaining units form exact (identity) or
near-exact (softplus) pass-through chains whose output weights start
at zero.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .fft import fft
from .network import Layer, Network, TimeScale, UnitKind
from .rng import Xoshiro256StarStar
from .signal import TimeSeries


@dataclass(frozen=True)
class InitConfig:
    """Construction parameters.

    sinusoids
        Sinusoid unit count; must be a power of 2 and match the
        training window length.
    aux_units
        Softplus units per layer, and equally many identity units.
    identity_shift
        Bias added to each softplus input so it operates on its nearly
        linear tail; compensated downstream.  Larger values make the
        pass-through more exact but slower to bend during training.
    perturb_sd
        Standard deviation of the post-construction weight noise.
    """

    sinusoids: int
    aux_units: int = 12
    identity_shift: float = 10.0
    perturb_sd: float = 1e-5
    seed: int = 0

    def __post_init__(self):
        k = self.sinusoids
        if k < 2 or k & (k - 1):
            raise ValueError(f"sinusoid count must be a power of 2 >= 2, got {k}")
        if self.aux_units < 1:
            raise ValueError("need at least one softplus/identity unit per group")
        if self.identity_shift <= 0:
            raise ValueError("identity_shift must be positive")
        if self.perturb_sd < 0:
            raise ValueError("perturb_sd must be >= 0")


def _kinds(identity: int, softplus: int, sinusoid: int = 0) -> np.ndarray:
    return np.array(
        [UnitKind.IDENTITY] * identity
        + [UnitKind.SOFTPLUS] * softplus
        + [UnitKind.SINUSOID] * sinusoid,
        dtype=np.int8,
    )


def _scaffold_layer(out_units: int, in_units: int, kinds: np.ndarray,
                    prev_kinds: np.ndarray | None, shift: float) -> Layer:
    """Identity/softplus pass-through layer.

    Weights get 1 on the (rectangular) main diagonal.  Softplus units
    get input bias +shift; any unit fed by a softplus source has its
    bias decremented by shift times the connecting weight, so the +shift
    riding on softplus activations cancels downstream.
    """
    w = np.zeros((out_units, in_units))
    for i in range(min(out_units, in_units)):
        w[i, i] = 1.0
    b = np.where(kinds == UnitKind.SOFTPLUS, shift, 0.0).astype(np.float64)
    if prev_kinds is not None:
        soft_cols = prev_kinds == UnitKind.SOFTPLUS
        b -= shift * w[:, soft_cols].sum(axis=1)
    return Layer(w, b, kinds)


def fourier_init(train: TimeSeries, cfg: InitConfig) -> Network:
    """Build a network that reproduces the training window exactly.

    The window's FFT determines the output-layer weights of the k
    sinusoid units (cosine/sine amplitude pairs per frequency, the
    top-frequency pair halved, output bias = mean); sinusoid unit j
    takes the time signal from the first layer-2 unit with input weight
    2*pi*ceil(j/2) and bias pi/2 (odd j, cosine) or pi (even j, sine).
    Identity and softplus units form pass-through chains with zero
    output weight, so they start with no influence.

    Training value n maps to input n/k.  If the series is longer than
    k, only the first k values are used (with a warning).
    """
    k = cfg.sinusoids
    h = cfg.aux_units
    s = cfg.identity_shift
    if len(train) < k:
        raise ValueError(
            f"training series has {len(train)} samples but {k} are needed")
    values = train.values
    if len(values) > k:
        warnings.warn(
            f"series longer than sinusoid count: using the first {k} "
            f"of {len(values)} samples")
        values = values[:k]

    spectrum = fft(values)

    kinds12 = _kinds(h, h)
    kinds3 = _kinds(h, h, k)
    layer1 = _scaffold_layer(2 * h, 1, kinds12, None, s)
    layer2 = _scaffold_layer(2 * h, 2 * h, kinds12, kinds12, s)
    layer3 = _scaffold_layer(2 * h + k, 2 * h, kinds3, kinds12, s)

    # Sinusoid frequency ladder: pair m = ceil(j/2) carries angular
    # frequency 2*pi*m; the only incoming weight taps layer-2 unit 0,
    # the exact identity chain of the time input.
    for j in range(1, k + 1):
        row = 2 * h + j - 1
        if j % 2 == 1:
            layer3.weights[row, 0] = 2.0 * math.pi * (j // 2 + 1)
            layer3.biases[row] = math.pi / 2.0
        else:
            layer3.weights[row, 0] = 2.0 * math.pi * (j // 2)
            layer3.biases[row] = math.pi

    w4 = np.zeros((1, 2 * h + k))
    for m in range(1, k // 2 + 1):
        w4[0, 2 * h + 2 * m - 2] = 2.0 * spectrum[m].real / k  # cosine, odd j
        w4[0, 2 * h + 2 * m - 1] = 2.0 * spectrum[m].imag / k  # sine, even j
    w4[0, 2 * h + k - 2] /= 2.0  # top-frequency pair counted once
    w4[0, 2 * h + k - 1] /= 2.0
    b4 = np.array([spectrum[0].real / k])
    layer4 = Layer(w4, b4, _kinds(1, 0))

    return Network(
        [layer1, layer2, layer3, layer4],
        time_scale=TimeScale(k, train.start_time, train.delta),
        identity_shift=s,
    )


def perturb(net: Network, seed: int, sd: float) -> Network:
    """Copy of the network with Normal(0, sd) noise on every parameter.

    Deterministic given the seed.  Draw order is fixed: per layer,
    weights in row-major order, then biases.  sd = 0 returns a
    bit-identical copy.
    """
    if sd < 0:
        raise ValueError("sd must be >= 0")
    out = net.copy()
    if sd == 0.0:
        return out
    rng = Xoshiro256StarStar(seed)
    for layer in out.layers:
        flat = layer.weights.reshape(-1)
        for i in range(flat.size):
            flat[i] += sd * rng.normal()
        for i in range(layer.biases.size):
            layer.biases[i] += sd * rng.normal()
    return out


def random_init(train: TimeSeries, cfg: InitConfig, weight_sd: float = 0.1) -> Network:
    """Same topology as ``fourier_init`` but with random weights.

    All weights are Normal(0, weight_sd) and all biases zero; nothing
    is seeded from the signal.  This is the reference point for
    demonstrating what the spectrum seeding buys.
    """
    k = cfg.sinusoids
    h = cfg.aux_units
    if len(train) < k:
        raise ValueError(
            f"training series has {len(train)} samples but {k} are needed")
    rng = Xoshiro256StarStar(cfg.seed)
    kinds12 = _kinds(h, h)
    kinds3 = _kinds(h, h, k)
    dims = [(2 * h, 1, kinds12), (2 * h, 2 * h, kinds12),
            (2 * h + k, 2 * h, kinds3), (1, 2 * h + k, _kinds(1, 0))]
    layers = []
    for out_units, in_units, kinds in dims:
        w = np.empty((out_units, in_units))
        flat = w.reshape(-1)
        for i in range(flat.size):
            flat[i] = weight_sd * rng.normal()
        layers.append(Layer(w, np.zeros(out_units), kinds))
    return Network(
        layers,
        time_scale=TimeScale(k, train.start_time, train.delta),
        identity_shift=cfg.identity_shift,
    )
