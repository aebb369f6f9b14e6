"""Four-layer feed-forward network with sinusoid, softplus and identity units.

The network maps a scalar time input to a scalar prediction.  Forward
evaluation keeps the per-layer pre-activations so reverse-mode
gradients of the squared-error loss L = 0.5*(prediction - target)**2
can be computed exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np


class UnitKind(enum.IntEnum):
    IDENTITY = 0
    SOFTPLUS = 1
    SINUSOID = 2


class DivergenceError(RuntimeError):
    """A weight update produced a non-finite parameter."""


@dataclass(frozen=True)
class TimeScale:
    """Maps data time to the network's input axis.

    Training sample n of a window of ``samples`` values sits at network
    input n/samples, so the whole training window occupies [0, 1) and
    anything past 1 is extrapolation.
    """

    samples: int
    start_time: float = 0.0
    delta: float = 1.0

    def to_input(self, t_data: float) -> float:
        """Data-time value -> network input."""
        return (t_data - self.start_time) / (self.samples * self.delta)

    def to_data(self, t_input: float) -> float:
        """Network input -> data-time value."""
        return self.start_time + t_input * self.samples * self.delta


def activate(kind: UnitKind, x: float) -> float:
    """Unit output for a pre-activation x.

    Softplus uses the overflow-safe form max(x, 0) + log1p(exp(-|x|)).
    """
    if kind == UnitKind.SINUSOID:
        return math.sin(x)
    if kind == UnitKind.SOFTPLUS:
        return max(x, 0.0) + math.log1p(math.exp(-abs(x)))
    return x


def activate_deriv(kind: UnitKind, x: float) -> float:
    """Derivative of ``activate`` at x."""
    if kind == UnitKind.SINUSOID:
        return math.cos(x)
    if kind == UnitKind.SOFTPLUS:
        if x >= 0:
            return 1.0 / (1.0 + math.exp(-x))
        e = math.exp(x)
        return e / (1.0 + e)
    return 1.0


def _activate_vec(kinds: np.ndarray, z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    m = kinds == UnitKind.SINUSOID
    out[m] = np.sin(z[m])
    m = kinds == UnitKind.SOFTPLUS
    zs = z[m]
    out[m] = np.maximum(zs, 0.0) + np.log1p(np.exp(-np.abs(zs)))
    m = kinds == UnitKind.IDENTITY
    out[m] = z[m]
    return out


def _activate_deriv_vec(kinds: np.ndarray, z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    m = kinds == UnitKind.SINUSOID
    out[m] = np.cos(z[m])
    m = kinds == UnitKind.SOFTPLUS
    zs = z[m]
    e = np.exp(-np.abs(zs))
    out[m] = np.where(zs >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    m = kinds == UnitKind.IDENTITY
    out[m] = 1.0
    return out


@dataclass
class Layer:
    """Dense layer: out_units x in_units weights, per-unit bias and kind."""

    weights: np.ndarray
    biases: np.ndarray
    kinds: np.ndarray

    def __post_init__(self):
        self.weights = np.ascontiguousarray(self.weights, dtype=np.float64)
        self.biases = np.ascontiguousarray(self.biases, dtype=np.float64)
        self.kinds = np.ascontiguousarray(self.kinds, dtype=np.int8)
        if self.weights.ndim != 2:
            raise ValueError("weights must be a 2-D matrix")
        out_units = self.weights.shape[0]
        if self.biases.shape != (out_units,) or self.kinds.shape != (out_units,):
            raise ValueError("biases/kinds length must match weight rows")
        if not np.all(np.isfinite(self.weights)) or not np.all(np.isfinite(self.biases)):
            raise ValueError("layer parameters must be finite")
        if not np.all(np.isin(self.kinds, (0, 1, 2))):
            raise ValueError("unknown unit kind")

    @property
    def out_units(self) -> int:
        return self.weights.shape[0]

    @property
    def in_units(self) -> int:
        return self.weights.shape[1]

    def copy(self) -> "Layer":
        return Layer(self.weights.copy(), self.biases.copy(), self.kinds.copy())


@dataclass
class Network:
    """Four dense layers from a scalar input to one identity output unit.

    ``sinusoids`` counts the sinusoid units in layer 3; ``time_scale``
    records how training indices map onto the input axis;
    ``identity_shift`` is the softplus bias used at construction (kept
    as metadata for serialization).
    """

    layers: list[Layer]
    time_scale: TimeScale = field(default=None)  # type: ignore[assignment]
    identity_shift: float = 10.0

    def __post_init__(self):
        if len(self.layers) != 4:
            raise ValueError("network must have exactly 4 layers")
        if self.layers[0].in_units != 1:
            raise ValueError("layer 1 must take the single time input")
        for prev, cur in zip(self.layers, self.layers[1:]):
            if cur.in_units != prev.out_units:
                raise ValueError("consecutive layer dimensions do not chain")
        out = self.layers[3]
        if out.out_units != 1 or out.kinds[0] != UnitKind.IDENTITY:
            raise ValueError("output layer must be a single identity unit")
        if self.time_scale is None:
            self.time_scale = TimeScale(max(self.sinusoids, 1))

    @property
    def sinusoids(self) -> int:
        return int(np.sum(self.layers[2].kinds == UnitKind.SINUSOID))

    @property
    def aux_units(self) -> int:
        """Softplus (equivalently identity) unit count per group in layer 1."""
        return self.layers[0].out_units // 2

    def copy(self) -> "Network":
        return Network(
            [layer.copy() for layer in self.layers],
            self.time_scale,
            self.identity_shift,
        )

    def parameter_count(self) -> int:
        return sum(l.weights.size + l.biases.size for l in self.layers)


def forward(net: Network, t: float) -> tuple[float, list[tuple[np.ndarray, np.ndarray]]]:
    """Evaluate the network at input t.

    Returns (prediction, trace) where trace holds each layer's
    (pre-activations, activations) for use by ``gradient``.  Read-only
    on the network; t may lie anywhere, including past the training
    window.
    """
    a = np.array([t], dtype=np.float64)
    trace = []
    for layer in net.layers:
        z = layer.weights @ a + layer.biases
        a = _activate_vec(layer.kinds, z)
        trace.append((z, a))
    return float(a[0]), trace


def gradient(
    net: Network, t: float, target: float
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Exact partials of L = 0.5*(prediction - target)^2 per layer.

    Returns [(dW, db), ...] in layer order, computed by reverse-mode
    accumulation over the forward trace.
    """
    pred, trace = forward(net, t)
    delta = np.array([pred - target])  # dL/d(output activation)
    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * 4  # type: ignore[list-item]
    for idx in range(3, -1, -1):
        layer = net.layers[idx]
        z, _ = trace[idx]
        dz = delta * _activate_deriv_vec(layer.kinds, z)
        a_prev = trace[idx - 1][1] if idx > 0 else np.array([t])
        grads[idx] = (np.outer(dz, a_prev), dz)
        if idx > 0:
            delta = layer.weights.T @ dz
    return grads


def sgd_step(net: Network, t: float, target: float, eta: float) -> Network:
    """One stochastic gradient descent update in place.

    Every weight and bias is decremented by eta times its partial.
    Raises DivergenceError if any parameter becomes non-finite.
    """
    if eta < 0:
        raise ValueError("learning rate must be >= 0")
    grads = gradient(net, t, target)
    for layer, (dw, db) in zip(net.layers, grads):
        layer.weights -= eta * dw
        layer.biases -= eta * db
        if not (np.all(np.isfinite(layer.weights)) and np.all(np.isfinite(layer.biases))):
            raise DivergenceError("non-finite parameter after update")
    return net
