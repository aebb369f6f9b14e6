"""Model persistence: bit-exact round trips and strict validation."""

import json
import struct

import numpy as np
import pytest

from fourcast.init import InitConfig, fourier_init, perturb
from fourcast.model_io import ModelFormatError, load, save
from fourcast.network import forward
from fourcast.signal import gen_sine_trend
from fourcast.trainer import flatten_params

from conftest import make_random_net


def random_finite_doubles(rng, n):
    """Doubles drawn from raw bit patterns, filtered to finite values.

    Includes subnormals and extreme exponents that naive formatting
    would mangle.
    """
    out = np.empty(n)
    i = 0
    while i < n:
        bits = rng.integers(0, 2**64, dtype=np.uint64)
        val = struct.unpack("<d", struct.pack("<Q", bits))[0]
        if np.isfinite(val):
            out[i] = val
            i += 1
    return out


class TestRoundTrip:
    def test_fourier_net_round_trip_bit_exact(self, tmp_path, sine_net):
        net = perturb(sine_net, seed=1, sd=1e-5)
        path = tmp_path / "model.json"
        save(net, path)
        back = load(path)
        assert np.array_equal(flatten_params(back), flatten_params(net))
        assert back.time_scale == net.time_scale
        assert back.identity_shift == net.identity_shift

    def test_round_trip_preserves_reconstruction(self, tmp_path, sine128, sine_net):
        path = tmp_path / "model.json"
        save(sine_net, path)
        back = load(path)
        k = len(sine128)
        for n in range(k):
            assert forward(back, n / k)[0] == forward(sine_net, n / k)[0]

    def test_fuzzed_networks_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        for case in range(100):
            n1, n2, n3 = rng.integers(1, 7, size=3)
            net = make_random_net(rng, n1=int(n1), n2=int(n2), n3=int(n3))
            flat = flatten_params(net)
            fuzzed = random_finite_doubles(rng, flat.size)
            offset = 0
            for layer in net.layers:
                w = layer.weights
                w[...] = fuzzed[offset:offset + w.size].reshape(w.shape)
                offset += w.size
                layer.biases[...] = fuzzed[offset:offset + layer.biases.size]
                offset += layer.biases.size
            path = tmp_path / f"fuzz{case}.json"
            save(net, path)
            back = load(path)
            assert np.array_equal(flatten_params(back), flatten_params(net)), (
                f"case {case} round trip not bit-exact")

    def test_subnormal_survives(self, tmp_path):
        net = make_random_net(np.random.default_rng(1))
        net.layers[0].weights[0, 0] = 5e-324  # smallest positive double
        net.layers[1].weights[0, 0] = -0.0
        path = tmp_path / "sub.json"
        save(net, path)
        back = load(path)
        assert back.layers[0].weights[0, 0] == 5e-324
        assert np.signbit(back.layers[1].weights[0, 0])


class TestFileFormat:
    def test_version_is_first_field(self, tmp_path, sine_net):
        path = tmp_path / "m.json"
        save(sine_net, path)
        doc = json.loads(path.read_text())
        assert doc["format_version"] == 1
        assert path.read_text().lstrip("{\n ").startswith('"format_version"')

    def test_trained_scale_model_under_a_megabyte(self, tmp_path, sine_net):
        path = tmp_path / "m.json"
        save(sine_net, path)
        assert path.stat().st_size < 1_000_000

    def test_reals_are_strings(self, tmp_path, sine_net):
        path = tmp_path / "m.json"
        save(sine_net, path)
        doc = json.loads(path.read_text())
        assert isinstance(doc["layers"][0]["weights"][0], str)
        assert doc["float_format"] == "decimal17"


class TestLoadErrors:
    def test_truncated_file_names_byte_offset(self, tmp_path, sine_net):
        path = tmp_path / "m.json"
        save(sine_net, path)
        clipped = tmp_path / "clipped.json"
        clipped.write_text(path.read_text()[: 200])
        with pytest.raises(ModelFormatError, match=r"byte \d+"):
            load(clipped)

    def test_nan_weight_names_layer_and_index(self, tmp_path, sine_net):
        path = tmp_path / "m.json"
        save(sine_net, path)
        doc = json.loads(path.read_text())
        doc["layers"][2]["weights"][5] = "nan"
        bad = tmp_path / "nan.json"
        bad.write_text(json.dumps(doc))
        with pytest.raises(ModelFormatError, match=r"layer 3, weight 5"):
            load(bad)

    def test_version_mismatch(self, tmp_path, sine_net):
        path = tmp_path / "m.json"
        save(sine_net, path)
        doc = json.loads(path.read_text())
        doc["format_version"] = 99
        bad = tmp_path / "v99.json"
        bad.write_text(json.dumps(doc))
        with pytest.raises(ModelFormatError, match="99"):
            load(bad)

    def test_dimension_mismatch_rejected(self, tmp_path, sine_net):
        path = tmp_path / "m.json"
        save(sine_net, path)
        doc = json.loads(path.read_text())
        doc["layers"][1]["weights"] = doc["layers"][1]["weights"][:-1]
        bad = tmp_path / "dims.json"
        bad.write_text(json.dumps(doc))
        with pytest.raises(ModelFormatError, match="layer 2"):
            load(bad)

    def test_unknown_kind_rejected(self, tmp_path, sine_net):
        path = tmp_path / "m.json"
        save(sine_net, path)
        doc = json.loads(path.read_text())
        doc["layers"][0]["kinds"][0] = "relu"
        bad = tmp_path / "kind.json"
        bad.write_text(json.dumps(doc))
        with pytest.raises(ModelFormatError, match="relu"):
            load(bad)

    def test_broken_topology_rejected(self, tmp_path, sine_net):
        """Files violating network invariants are refused, not repaired."""
        path = tmp_path / "m.json"
        save(sine_net, path)
        doc = json.loads(path.read_text())
        doc["layers"][3]["kinds"] = ["sinusoid"]
        bad = tmp_path / "topo.json"
        bad.write_text(json.dumps(doc))
        with pytest.raises(ModelFormatError, match="identity"):
            load(bad)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load(tmp_path / "absent.json")
