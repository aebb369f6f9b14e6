"""Per-pattern L2 and L1 weight regularization with kind-dependent strength.

Each weight is classified by its *source* unit: the unit whose
activation it multiplies.  Sinusoid-sourced weights (their amplitudes)
decay fastest, softplus 10x slower, identity 100x slower, so fitting
capacity migrates toward the simpler units during training.  Weights
fed by the raw time input and all biases are exempt: biases carry the
phases and the constant offset, which decay should not erode.
"""

from __future__ import annotations

import numpy as np

from .network import Network, UnitKind

_FACTORS = {
    UnitKind.SINUSOID: 1.0,
    UnitKind.SOFTPLUS: 0.1,
    UnitKind.IDENTITY: 0.01,
}


def reg_factor(kind: UnitKind) -> float:
    """Decay multiplier on eta*lambda for weights sourced at this kind."""
    return _FACTORS[UnitKind(kind)]


def source_factors(net: Network) -> list[np.ndarray]:
    """Per-layer, per-input-column decay factors.

    Layer 1 columns (the raw time input) get 0, i.e. no decay.
    """
    factors = [np.zeros(1)]
    for layer in net.layers[:-1]:
        factors.append(
            np.array([_FACTORS[UnitKind(k)] for k in layer.kinds]))
    return factors


def _check_strength(eta: float, lam: float) -> float:
    if eta < 0 or lam < 0:
        raise ValueError("eta and lambda must be >= 0")
    strength = eta * lam
    if strength >= 1.0:
        raise ValueError(
            f"eta*lambda = {strength} would flip weight signs (must be < 1)")
    return strength


def l2_step(net: Network, eta: float, lam: float) -> Network:
    """Multiply each weight by 1 - reg_factor(source)*eta*lambda, in place."""
    strength = _check_strength(eta, lam)
    for layer, fac in zip(net.layers, source_factors(net)):
        layer.weights *= 1.0 - fac * strength
    return net


def l1_step(net: Network, eta: float, lam: float) -> Network:
    """Shrink each |weight| by reg_factor(source)*eta*lambda, clamped at 0.

    Soft threshold: w <- sign(w) * max(0, |w| - threshold), in place.
    """
    strength = _check_strength(eta, lam)
    for layer, fac in zip(net.layers, source_factors(net)):
        w = layer.weights
        np.copyto(w, np.sign(w) * np.maximum(np.abs(w) - fac * strength, 0.0))
    return net
