"""Radix-2 fast Fourier transform and a naive DFT used as its test oracle.

Forward transform convention: output bin m holds
``R_m = sum_n x_n * exp(-2*pi*i*m*n/N)`` with no 1/N scaling.  This is
the convention the sinusoid seeding arithmetic depends on, so it is
fixed here rather than configurable.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def _bit_reverse_indices(n: int) -> np.ndarray:
    """Permutation taking natural order to bit-reversed order (n = 2**p)."""
    rev = np.zeros(n, dtype=np.intp)
    for i in range(1, n):
        rev[i] = (rev[i >> 1] >> 1) | ((i & 1) * (n >> 1))
    rev.setflags(write=False)
    return rev


@lru_cache(maxsize=None)
def _twiddles(size: int) -> np.ndarray:
    """Twiddle factors exp(-2*pi*i*k/size) for k < size/2."""
    k = np.arange(size // 2)
    w = np.exp(-2j * np.pi * k / size)
    w.setflags(write=False)
    return w


def fft(values) -> np.ndarray:
    """Forward FFT of a complex sequence whose length is a power of two.

    Iterative Cooley-Tukey: bit-reversal permutation followed by
    butterfly stages of doubling size, twiddles precomputed per size.
    """
    x = np.asarray(values, dtype=np.complex128)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("fft input must be a nonempty 1-D sequence")
    n = x.size
    if n & (n - 1):
        raise ValueError(f"fft length must be a power of 2, got {n}")

    out = x[_bit_reverse_indices(n)]
    size = 2
    while size <= n:
        half = size // 2
        w = _twiddles(size)
        blocks = out.reshape(-1, size)
        top = blocks[:, :half]
        bot = blocks[:, half:] * w
        summed = top + bot
        blocks[:, half:] = top - bot
        blocks[:, :half] = summed
        size *= 2
    return out


@lru_cache(maxsize=16)
def _dft_kernel(n: int) -> np.ndarray:
    """exp(-2*pi*i*m*j/n) matrix; index products reduced mod n keep the
    angles small and accurate."""
    idx = np.arange(n)
    roots = np.exp(-2j * np.pi * idx / n)
    kernel = roots[np.outer(idx, idx) % n]
    kernel.setflags(write=False)
    return kernel


def dft_naive(values) -> np.ndarray:
    """Direct O(n^2) DFT with the same kernel and scaling as ``fft``.

    Accepts any length >= 1.  Kept deliberately independent of the
    radix-2 implementation so the two can check each other.
    """
    x = np.asarray(values, dtype=np.complex128)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("dft input must be a nonempty 1-D sequence")
    return _dft_kernel(x.size) @ x
