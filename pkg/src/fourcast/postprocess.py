"""Post-training low-pass filtering of the sinusoid bank."""

from __future__ import annotations

import math

import numpy as np

from .network import Network, UnitKind


def _sinusoid_block(net: Network) -> tuple[int, int]:
    """Start index and count of layer 3's trailing sinusoid block.

    Raises ValueError when the topology is not a contiguous trailing
    block of an even number of sinusoid units (cosine/sine pairs).
    """
    kinds = net.layers[2].kinds
    sin_mask = kinds == UnitKind.SINUSOID
    k = int(np.sum(sin_mask))
    if k < 2 or k % 2:
        raise ValueError("network has no cosine/sine pair bank to filter")
    start = kinds.size - k
    if not np.all(sin_mask[start:]) or np.any(sin_mask[:start]):
        raise ValueError("sinusoid units are not a contiguous trailing block")
    return start, k


def low_pass(net: Network, keep_fraction: float) -> Network:
    """Copy of the network with its highest-frequency pairs silenced.

    The sinusoid units come in cosine/sine pairs of ascending frequency;
    the output-layer weights of the top ``round((1 - keep_fraction) *
    pairs)`` pairs are set to exactly 0.  Whole pairs only, so no
    frequency loses half its phase information.  Everything else is
    untouched; keep_fraction = 1 returns an identical copy.
    """
    if not 0.0 < keep_fraction <= 1.0:
        raise ValueError("keep_fraction must be in (0, 1]")
    start, k = _sinusoid_block(net)
    pairs = k // 2
    zero_pairs = math.floor((1.0 - keep_fraction) * pairs + 0.5)
    out = net.copy()
    w4 = out.layers[3].weights
    first_zeroed = start + 2 * (pairs - zero_pairs)
    w4[0, first_zeroed:start + k] = 0.0
    return out
