"""Forward evaluation and backpropagation against finite differences."""

import math

import numpy as np
import pytest

from fourcast.init import InitConfig, fourier_init, perturb
from fourcast.network import (
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

from conftest import make_random_net


def identity_chain_net(w4=0.0, b4=0.0):
    """1-1-1-1 network whose first three layers pass t through unchanged,
    so the output is w4*t + b4."""
    ident = np.array([UnitKind.IDENTITY], dtype=np.int8)
    layers = [
        Layer(np.array([[1.0]]), np.array([0.0]), ident),
        Layer(np.array([[1.0]]), np.array([0.0]), ident),
        Layer(np.array([[1.0]]), np.array([0.0]), ident),
        Layer(np.array([[w4]]), np.array([b4]), ident),
    ]
    return Network(layers, time_scale=TimeScale(1))


class TestActivate:
    def test_softplus_at_zero(self):
        assert activate(UnitKind.SOFTPLUS, 0.0) == pytest.approx(math.log(2.0))

    def test_sinusoid_quarter_turn(self):
        assert activate(UnitKind.SINUSOID, math.pi / 2) == pytest.approx(1.0)

    def test_identity(self):
        assert activate(UnitKind.IDENTITY, -3.7) == -3.7

    def test_softplus_no_overflow(self):
        assert activate(UnitKind.SOFTPLUS, 1000.0) == 1000.0
        assert activate(UnitKind.SOFTPLUS, -1000.0) == 0.0

    def test_softplus_finite_and_monotone_over_huge_range(self):
        xs = np.linspace(-1e6, 1e6, 20001)
        ys = np.array([activate(UnitKind.SOFTPLUS, x) for x in xs])
        assert np.all(np.isfinite(ys))
        assert np.all(np.diff(ys) >= 0)


class TestActivateDeriv:
    def test_sinusoid_at_zero(self):
        assert activate_deriv(UnitKind.SINUSOID, 0.0) == 1.0

    def test_softplus_at_zero(self):
        assert activate_deriv(UnitKind.SOFTPLUS, 0.0) == 0.5

    def test_identity(self):
        assert activate_deriv(UnitKind.IDENTITY, 123.0) == 1.0

    @pytest.mark.parametrize("kind", list(UnitKind))
    def test_matches_central_difference(self, kind):
        rng = np.random.default_rng(0)
        eps = 1e-6
        for x in rng.uniform(-5, 5, 50):
            fd = (activate(kind, x + eps) - activate(kind, x - eps)) / (2 * eps)
            assert activate_deriv(kind, x) == pytest.approx(fd, abs=1e-6)


class TestForward:
    def test_all_zero_parameters(self):
        net = make_random_net(np.random.default_rng(1))
        for layer in net.layers:
            layer.weights[:] = 0.0
            layer.biases[:] = 0.0
        pred, _ = forward(net, 0.7)
        # softplus of 0 feeds zero-weight rows, so the output is exactly 0
        assert pred == 0.0

    def test_single_sinusoid_path(self):
        """Identity chain into one sinusoid: sin(2*pi*t + pi/2) at t=0.25."""
        ident = np.array([UnitKind.IDENTITY], dtype=np.int8)
        sin = np.array([UnitKind.SINUSOID], dtype=np.int8)
        layers = [
            Layer(np.array([[1.0]]), np.array([0.0]), ident),
            Layer(np.array([[1.0]]), np.array([0.0]), ident),
            Layer(np.array([[2 * math.pi]]), np.array([math.pi / 2]), sin),
            Layer(np.array([[1.0]]), np.array([0.0]), ident),
        ]
        net = Network(layers, time_scale=TimeScale(1))
        pred, _ = forward(net, 0.25)
        assert pred == pytest.approx(0.0, abs=1e-15)

    def test_no_side_effects(self):
        rng = np.random.default_rng(2)
        net = make_random_net(rng)
        before = [(l.weights.copy(), l.biases.copy()) for l in net.layers]
        forward(net, 1.3)
        for layer, (w, b) in zip(net.layers, before):
            assert np.array_equal(layer.weights, w)
            assert np.array_equal(layer.biases, b)

    def test_trace_shapes(self):
        net = make_random_net(np.random.default_rng(3), n1=5, n2=4, n3=6)
        _, trace = forward(net, 0.1)
        assert [z.shape[0] for z, _ in trace] == [5, 4, 6, 1]

    def test_extrapolation_inputs_allowed(self):
        net = make_random_net(np.random.default_rng(4))
        pred, _ = forward(net, 25.0)
        assert math.isfinite(pred)


class TestNetworkInvariants:
    def test_requires_four_layers(self):
        ident = np.array([UnitKind.IDENTITY], dtype=np.int8)
        with pytest.raises(ValueError):
            Network([Layer(np.eye(1), np.zeros(1), ident)] * 3)

    def test_output_must_be_identity(self):
        net = make_random_net(np.random.default_rng(5))
        layers = [l.copy() for l in net.layers]
        layers[3].kinds[0] = UnitKind.SINUSOID
        with pytest.raises(ValueError):
            Network(layers)

    def test_dimension_chain_checked(self):
        rng = np.random.default_rng(6)
        net = make_random_net(rng)
        layers = [l.copy() for l in net.layers]
        layers[1] = Layer(rng.normal(size=(3, 7)), np.zeros(3),
                          np.zeros(3, dtype=np.int8))
        with pytest.raises(ValueError):
            Network(layers)

    def test_no_oscillation_without_sinusoid_output(self, sine128):
        """Silencing the sinusoid bank leaves a curve built from softplus
        and identity compositions: few curvature sign changes."""
        net = fourier_init(sine128, InitConfig(sinusoids=128))
        net = perturb(net, seed=7, sd=1e-2)
        kinds = net.layers[2].kinds
        net.layers[3].weights[0, kinds == UnitKind.SINUSOID] = 0.0
        grid = np.linspace(0.0, 1.0, 1000)
        preds = np.array([forward(net, t)[0] for t in grid])
        curict = np.diff(preds, n=2)
        curict = curict[np.abs(curict) > 1e-12 * max(1.0, np.abs(curict).max())]
        flips = int(np.sum(curict[:-1] * curict[1:] < 0))
        assert flips <= 12 * 4


class TestGradient:
    def test_zero_when_prediction_matches_target(self):
        net = identity_chain_net(w4=2.0, b4=0.5)
        target, _ = forward(net, 0.3)
        grads = gradient(net, 0.3, target)
        for dw, db in grads:
            assert np.all(dw == 0.0)
            assert np.all(db == 0.0)

    def test_single_unit_chain_rule(self):
        """Output w*t + b with w=b=0: at t=1, target=1 both partials are -1."""
        net = identity_chain_net()
        grads = gradient(net, 1.0, 1.0)
        dw4, db4 = grads[3]
        assert dw4[0, 0] == -1.0
        assert db4[0] == -1.0

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(42)
        eps = 1e-6
        for case in range(100):
            net = make_random_net(rng)
            t = rng.uniform(-1.5, 1.5)
            target = rng.uniform(-2, 2)
            grads = gradient(net, t, target)

            def loss():
                pred, _ = forward(net, t)
                return 0.5 * (pred - target) ** 2

            for li, layer in enumerate(net.layers):
                for arr, g in ((layer.weights, grads[li][0]),
                               (layer.biases, grads[li][1])):
                    flat = arr.reshape(-1)
                    gflat = g.reshape(-1)
                    for i in range(flat.size):
                        orig = flat[i]
                        flat[i] = orig + eps
                        up = loss()
                        flat[i] = orig - eps
                        down = loss()
                        flat[i] = orig
                        fd = (up - down) / (2 * eps)
                        assert abs(gflat[i] - fd) <= 1e-7 + 1e-4 * abs(fd), (
                            f"case {case}, layer {li}, param {i}: "
                            f"{gflat[i]} vs {fd}")


class TestSgdStep:
    def test_zero_eta_is_identity(self):
        rng = np.random.default_rng(8)
        net = make_random_net(rng)
        before = [(l.weights.copy(), l.biases.copy()) for l in net.layers]
        sgd_step(net, 0.4, 1.0, 0.0)
        for layer, (w, b) in zip(net.layers, before):
            assert np.array_equal(layer.weights, w)
            assert np.array_equal(layer.biases, b)

    def test_single_unit_update(self):
        net = identity_chain_net()
        sgd_step(net, 1.0, 1.0, 0.1)
        assert net.layers[3].weights[0, 0] == pytest.approx(0.1)
        assert net.layers[3].biases[0] == pytest.approx(0.1)

    def test_descent_on_fixed_pattern(self):
        rng = np.random.default_rng(9)
        net = make_random_net(rng)
        t, target = 0.6, 1.5

        def loss():
            return 0.5 * (forward(net, t)[0] - target) ** 2

        prev = loss()
        for _ in range(100):
            sgd_step(net, t, target, 1e-3)
            cur = loss()
            assert cur <= prev + 1e-12
            prev = cur

    def test_divergence_detected(self):
        net = identity_chain_net(w4=1e300, b4=0.0)
        with np.errstate(over="ignore"), pytest.raises(DivergenceError):
            sgd_step(net, 1e10, 0.0, 1e200)
