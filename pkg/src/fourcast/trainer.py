"""Epoch loop with dynamic learning-rate and decay control.

Each epoch presents every training value once, in freshly shuffled
order; each presentation regularizes the weights (L2 during the first
half of the epochs, L1 during the second) and then applies one
stochastic gradient descent update.  At every epoch end the controller
measures the training RMSE and:

* nudges lambda up when the fit is tighter than ``target_ratio * sigma``
  and down otherwise,
* always grows eta geometrically,
* snapshots the weights while the RMSE stays under
  ``guard_ratio * sigma``, and otherwise restores the last snapshot and
  cuts eta

so the fit hovers near the target while eta rides as high as stability
allows.  ``baseline_train`` is the same loop with all of the above
disabled (fixed eta/lambda, uniform decay, no rollback).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .network import Network, UnitKind
from .regularize import reg_factor
from .rng import seed_state
from .signal import TimeSeries

logger = logging.getLogger(__name__)

_CHUNK_EPOCHS = 20_000

_EVENT_NAMES = {-1: "", 0: "backup", 1: "restore"}


@dataclass(frozen=True)
class TrainConfig:
    """Controller constants; defaults hold the fit near 0.1 sigma.

    ``epochs`` defaults to a desk-scale run; production-quality fits
    use orders of magnitude more.
    """

    epochs: int = 200_000
    target_ratio: float = 0.1
    guard_ratio: float = 0.2
    lambda0: float = 1.0
    eta0: float = 1e-9
    lambda_gain: float = 1.001
    eta_gain: float = 1.01
    eta_cut: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if not 0.0 < self.target_ratio < self.guard_ratio:
            raise ValueError("need 0 < target_ratio < guard_ratio")
        if self.lambda_gain <= 1.0 or self.eta_gain <= 1.0:
            raise ValueError("gains must be > 1")
        if not 0.0 < self.eta_cut < 1.0:
            raise ValueError("eta_cut must be in (0, 1)")
        if self.eta0 <= 0 or self.lambda0 < 0:
            raise ValueError("eta0 must be > 0 and lambda0 >= 0")


@dataclass
class TrainLog:
    """Per-epoch controller records.

    ``events`` codes: 0 backup, 1 restore, -1 none (baseline runs).
    ``aborted`` marks a run cut short because the RMSE stayed
    non-finite even after a rollback; ``diverged`` marks a baseline run
    stopped by its divergence check.
    """

    rmse: np.ndarray
    eta: np.ndarray
    lam: np.ndarray
    events: np.ndarray
    sigma: float
    aborted: bool = False
    diverged: bool = False

    def __len__(self) -> int:
        return self.rmse.size

    def event_names(self) -> list[str]:
        return [_EVENT_NAMES[int(code)] for code in self.events]

    def write_csv(self, path) -> None:
        """Emit "epoch,rmse,eta,lambda,event" rows."""
        with open(path, "w", newline="") as fh:
            fh.write("epoch,rmse,eta,lambda,event\n")
            for i in range(len(self)):
                fh.write(
                    f"{i},{self.rmse[i]:.17g},{self.eta[i]:.17g},"
                    f"{self.lam[i]:.17g},{_EVENT_NAMES[int(self.events[i])]}\n")


def flatten_params(net: Network) -> np.ndarray:
    """All parameters as one vector: per layer, weights row-major, then biases."""
    parts = []
    for layer in net.layers:
        parts.append(layer.weights.reshape(-1))
        parts.append(layer.biases)
    return np.concatenate(parts)


def unflatten_params(theta: np.ndarray, net: Network) -> Network:
    """Write a flat parameter vector back into the network, in place."""
    offset = 0
    for layer in net.layers:
        size = layer.weights.size
        layer.weights[...] = theta[offset:offset + size].reshape(layer.weights.shape)
        offset += size
        size = layer.biases.size
        layer.biases[...] = theta[offset:offset + size]
        offset += size
    if offset != theta.size:
        raise ValueError("parameter vector does not match the network")
    return net


def _flat_reg_factors(net: Network, uniform: bool) -> np.ndarray:
    """Per-parameter decay factors in flat layout.

    Biases are always exempt (factor 0).  Non-uniform mode applies the
    source-kind factors, with layer-1 weights (fed by the raw time
    input) exempt; uniform mode applies factor 1 to every weight.
    """
    parts = []
    prev_kinds = None
    for layer in net.layers:
        if uniform:
            col = np.ones(layer.in_units)
        elif prev_kinds is None:
            col = np.zeros(layer.in_units)
        else:
            col = np.array([reg_factor(UnitKind(k)) for k in prev_kinds])
        parts.append(np.broadcast_to(col, layer.weights.shape).reshape(-1))
        parts.append(np.zeros(layer.biases.size))
        prev_kinds = layer.kinds
    return np.ascontiguousarray(np.concatenate(parts))


def _layer_meta(net: Network):
    l1, l2, l3, _ = net.layers
    return (l1.out_units, l2.out_units, l3.out_units,
            l1.kinds, l2.kinds, l3.kinds)


def _check_series(net: Network, series: TimeSeries) -> float:
    if len(series) != net.sinusoids:
        raise ValueError(
            f"series length {len(series)} != network sinusoid count "
            f"{net.sinusoids}")
    sigma = series.std_dev()
    if sigma <= 0.0:
        raise ValueError("constant series: sigma is zero, nothing to fit")
    return sigma


def train(net: Network, series: TimeSeries, cfg: TrainConfig) -> tuple[Network, TrainLog]:
    """Run the tuned training loop; mutates and returns the network.

    The returned network is the live end-of-run state (which equals the
    last snapshot when the final epoch triggered a restore).
    Deterministic given cfg.seed.
    """
    sigma = _check_series(net, series)
    n1, n2, n3, kin1, kin2, kin3 = _layer_meta(net)
    theta = flatten_params(net)
    backup = theta.copy()
    regfac = _flat_reg_factors(net, uniform=False)
    rng_state = seed_state(cfg.seed)
    values = np.ascontiguousarray(series.values)

    log_rmse = np.empty(cfg.epochs)
    log_eta = np.empty(cfg.epochs)
    log_lam = np.empty(cfg.epochs)
    log_event = np.empty(cfg.epochs, dtype=np.int8)

    eta, lam = cfg.eta0, cfg.lambda0
    half = cfg.epochs // 2
    consec_bad = 0
    done_total = 0
    aborted = False
    epoch = 0
    while epoch < cfg.epochs:
        count = min(_CHUNK_EPOCHS, cfg.epochs - epoch)
        done, eta, lam, consec_bad, aborted = _kernels.train_chunk(
            theta, backup, n1, n2, n3, kin1, kin2, kin3, regfac, values,
            epoch, count, half, sigma,
            cfg.target_ratio, cfg.guard_ratio, eta, lam,
            cfg.eta_gain, cfg.lambda_gain, cfg.eta_cut, consec_bad, rng_state,
            log_rmse[epoch:], log_eta[epoch:], log_lam[epoch:],
            log_event[epoch:])
        done_total += done
        epoch += done
        if aborted:
            logger.warning(
                "training aborted at epoch %d: RMSE stayed non-finite "
                "after rollback", epoch)
            break
        logger.info(
            "epoch %d/%d  rmse/sigma=%.4f  eta=%.3g  lambda=%.3g",
            epoch, cfg.epochs, log_rmse[epoch - 1] / sigma if epoch else 0.0,
            eta, lam)

    unflatten_params(theta, net)
    log = TrainLog(
        rmse=log_rmse[:done_total].copy(),
        eta=log_eta[:done_total].copy(),
        lam=log_lam[:done_total].copy(),
        events=log_event[:done_total].copy(),
        sigma=sigma,
        aborted=aborted,
    )
    return net, log


def baseline_train(net: Network, series: TimeSeries, cfg: TrainConfig) -> tuple[Network, TrainLog]:
    """Plain SGD: fixed eta/lambda, uniform decay, no tuning, no rollback.

    Divergence (non-finite or exploding RMSE) stops the run and is
    flagged on the log, not repaired.
    """
    sigma = _check_series(net, series)
    n1, n2, n3, kin1, kin2, kin3 = _layer_meta(net)
    theta = flatten_params(net)
    regfac = _flat_reg_factors(net, uniform=True)
    rng_state = seed_state(cfg.seed)
    values = np.ascontiguousarray(series.values)

    log_rmse = np.empty(cfg.epochs)
    log_eta = np.empty(cfg.epochs)
    log_lam = np.empty(cfg.epochs)

    half = cfg.epochs // 2
    done_total = 0
    diverged = False
    epoch = 0
    while epoch < cfg.epochs:
        count = min(_CHUNK_EPOCHS, cfg.epochs - epoch)
        done, diverged = _kernels.baseline_chunk(
            theta, n1, n2, n3, kin1, kin2, kin3, regfac, values,
            epoch, count, half, sigma, cfg.eta0, cfg.lambda0, rng_state,
            log_rmse[epoch:], log_eta[epoch:], log_lam[epoch:])
        done_total += done
        epoch += done
        if diverged:
            logger.warning("baseline training diverged at epoch %d", epoch)
            break

    unflatten_params(theta, net)
    log = TrainLog(
        rmse=log_rmse[:done_total].copy(),
        eta=log_eta[:done_total].copy(),
        lam=log_lam[:done_total].copy(),
        events=np.full(done_total, -1, dtype=np.int8),
        sigma=sigma,
        diverged=diverged,
    )
    return net, log


@dataclass
class TrainState:
    """Mutable controller state for stepwise use of the tuning rules."""

    net: Network
    sigma: float
    config: TrainConfig
    eta: float = None  # type: ignore[assignment]
    lam: float = None  # type: ignore[assignment]
    epoch: int = 0
    backup: np.ndarray = None  # type: ignore[assignment]
    events: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.eta is None:
            self.eta = self.config.eta0
        if self.lam is None:
            self.lam = self.config.lambda0
        if self.backup is None:
            self.backup = flatten_params(self.net)


def tune(state: TrainState, eps: float) -> str:
    """Apply the end-of-epoch tuning rules for a measured RMSE.

    In order: lambda is nudged up (fit tighter than target) or down;
    eta always grows by eta_gain; then either the weights are
    snapshotted (RMSE under the guard) or restored from the snapshot
    with eta cut.  A non-finite RMSE counts as over every threshold.
    Returns the recorded event, "backup" or "restore".
    """
    cfg = state.config
    if eps < cfg.target_ratio * state.sigma:
        state.lam = state.lam * cfg.lambda_gain
    else:
        state.lam = state.lam / cfg.lambda_gain
    state.eta = state.eta * cfg.eta_gain
    if eps < cfg.guard_ratio * state.sigma:
        state.backup = flatten_params(state.net)
        event = "backup"
    else:
        unflatten_params(state.backup, state.net)
        state.eta = state.eta * cfg.eta_cut
        event = "restore"
    state.epoch += 1
    state.events.append(event)
    return event
