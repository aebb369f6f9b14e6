"""Shared fixtures: reference signals and small networks."""

import numpy as np
import pytest

from fourcast.init import InitConfig, fourier_init
from fourcast.network import Layer, Network, TimeScale, UnitKind
from fourcast.signal import gen_sine_trend


@pytest.fixture
def sine128():
    """128 samples of sin(t) + 0.1t spanning three oscillations."""
    return gen_sine_trend(128)


@pytest.fixture
def sine_net(sine128):
    """Un-perturbed spectrum-seeded network for the sine trend."""
    return fourier_init(sine128, InitConfig(sinusoids=128))


def make_random_net(rng, n1=4, n2=4, n3=4, scale=0.5, kinds=None):
    """Small 1-n1-n2-n3-1 network with random weights and mixed kinds.

    Guarantees all three unit kinds appear when layers have >= 3 units.
    """
    def draw_kinds(n):
        k = rng.integers(0, 3, size=n)
        if n >= 3:
            k[:3] = [UnitKind.IDENTITY, UnitKind.SOFTPLUS, UnitKind.SINUSOID]
        return k.astype(np.int8)

    if kinds is None:
        kinds = [draw_kinds(n1), draw_kinds(n2), draw_kinds(n3)]
    dims = [(n1, 1), (n2, n1), (n3, n2), (1, n3)]
    all_kinds = kinds + [np.array([UnitKind.IDENTITY], dtype=np.int8)]
    layers = [
        Layer(rng.normal(scale=scale, size=d),
              rng.normal(scale=scale, size=d[0]),
              kk)
        for d, kk in zip(dims, all_kinds)
    ]
    return Network(layers, time_scale=TimeScale(1))
