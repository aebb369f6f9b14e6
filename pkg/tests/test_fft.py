"""FFT against the naive-DFT oracle and its algebraic invariants."""

import numpy as np
import pytest

from fourcast.fft import dft_naive, fft


def random_complex(rng, n):
    return rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)


class TestFft:
    def test_zeros(self):
        out = fft(np.zeros(8, dtype=complex))
        assert np.all(out == 0)

    def test_constant_hits_dc_bin_only(self):
        k = 16
        out = fft(np.full(k, 3.5 + 0j))
        assert out[0] == pytest.approx(k * 3.5)
        assert abs(out[0].imag) == 0
        assert np.max(np.abs(out[1:])) < 1e-12

    def test_matches_naive_on_random_input(self):
        rng = np.random.default_rng(0)
        x = random_complex(rng, 16)
        assert np.max(np.abs(fft(x) - dft_naive(x))) < 1e-12

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            fft(np.ones(12, dtype=complex))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            fft(np.array([], dtype=complex))

    def test_length_one_is_identity(self):
        out = fft(np.array([2.5 - 1.5j]))
        assert out[0] == 2.5 - 1.5j

    def test_input_not_mutated(self):
        x = np.arange(8, dtype=complex)
        kept = x.copy()
        fft(x)
        assert np.array_equal(x, kept)


class TestDftNaive:
    def test_length_one_is_identity(self):
        out = dft_naive([3.0 + 4.0j])
        assert out[0] == pytest.approx(3.0 + 4.0j)

    def test_cosine_bins(self):
        """cos(2*pi*n/k) concentrates in bins 1 and k-1 with value k/2."""
        k = 8
        x = np.cos(2 * np.pi * np.arange(k) / k).astype(complex)
        out = dft_naive(x)
        assert out[1] == pytest.approx(k / 2, abs=1e-12)
        assert out[k - 1] == pytest.approx(k / 2, abs=1e-12)
        others = np.delete(out, [1, k - 1])
        assert np.max(np.abs(others)) < 1e-12

    def test_any_length_accepted(self):
        rng = np.random.default_rng(1)
        for n in (3, 5, 7, 12):
            out = dft_naive(random_complex(rng, n))
            assert out.shape == (n,)


class TestInvariants:
    def test_linearity(self):
        rng = np.random.default_rng(2)
        x = random_complex(rng, 64)
        y = random_complex(rng, 64)
        a, b = 1.7 - 0.3j, -2.2 + 0.9j
        lhs = fft(a * x + b * y)
        rhs = a * fft(x) + b * fft(y)
        assert np.max(np.abs(lhs - rhs)) < 1e-10

    def test_conjugate_symmetry_for_real_input(self):
        rng = np.random.default_rng(3)
        x = rng.uniform(-1, 1, 32).astype(complex)
        out = fft(x)
        k = len(x)
        for m in range(1, k):
            assert abs(out[k - m] - np.conj(out[m])) < 1e-10

    def test_parseval(self):
        rng = np.random.default_rng(4)
        x = random_complex(rng, 128)
        out = fft(x)
        time_energy = np.sum(np.abs(x) ** 2)
        freq_energy = np.sum(np.abs(out) ** 2) / len(x)
        assert freq_energy == pytest.approx(time_energy, rel=1e-8)

    def test_agrees_with_naive_across_sizes(self):
        rng = np.random.default_rng(5)
        for p in range(1, 11):
            n = 2 ** p
            x = random_complex(rng, n)
            assert np.max(np.abs(fft(x) - dft_naive(x))) < 1e-12
