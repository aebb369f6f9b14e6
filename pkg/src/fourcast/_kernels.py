"""Compiled inner loops for the trainer.

All parameters live in one flat vector (per layer: weights row-major,
then biases) so regularization, updates and snapshots are single
passes.  The xoshiro256** stream here must match ``rng.py`` exactly;
the cross-check lives in the test suite.

Flag discipline: everything runs under the numpy error model (IEEE
inf/nan propagation, no raised ZeroDivisionError mid-epoch), and
fastmath is restricted to the backward/regularize arithmetic.  The
epoch-end RMSE, the forward pass it uses, and the controller scalar
updates stay strict: divergence detection must see real infs/nans, and
the logged eta/lambda sequences must be exact IEEE two-step products.

Epoch chunks are resumable: the caller passes the mutable state
(parameters, backup, rng state, eta/lambda) back in, and results are
bit-identical regardless of how epochs are chunked.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# unit kind codes, mirroring network.UnitKind
_IDENTITY = 0
_SOFTPLUS = 1
_SINUSOID = 2

_U5 = np.uint64(5)
_U7 = np.uint64(7)
_U9 = np.uint64(9)
_U17 = np.uint64(17)
_U19 = np.uint64(19)
_U45 = np.uint64(45)
_U57 = np.uint64(57)

_strict = njit(cache=True, error_model="numpy", nogil=True)
_fast = njit(cache=True, error_model="numpy", fastmath=True, nogil=True)


@_strict
def _next_u64(state):
    s0, s1, s2, s3 = state[0], state[1], state[2], state[3]
    tmp = s1 * _U5
    result = ((tmp << _U7) | (tmp >> _U57)) * _U9
    t = s1 << _U17
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = (s3 << _U45) | (s3 >> _U19)
    state[0], state[1], state[2], state[3] = s0, s1, s2, s3
    return result


@_strict
def shuffle_indices(state, order):
    """Fisher-Yates over ``order`` using next_u64() % (i+1)."""
    n = order.shape[0]
    for i in range(n - 1, 0, -1):
        j = np.int64(_next_u64(state) % np.uint64(i + 1))
        order[i], order[j] = order[j], order[i]


@_strict
def _act(code, x):
    if code == _SINUSOID:
        return np.sin(x)
    if code == _SOFTPLUS:
        if x > 0.0:
            return x + np.log1p(np.exp(-x))
        return np.log1p(np.exp(x))
    return x


@_strict
def _act_deriv(code, x):
    if code == _SINUSOID:
        return np.cos(x)
    if code == _SOFTPLUS:
        if x >= 0.0:
            return 1.0 / (1.0 + np.exp(-x))
        e = np.exp(x)
        return e / (1.0 + e)
    return 1.0


def _forward_body(w1, b1, kin1, w2, b2, kin2, w3, b3, kin3, w4, b4,
                  t, z1, a1, z2, a2, z3, a3):
    # matvec reductions run 4 accumulators deep: a fixed deterministic
    # order that breaks the add-latency chain even without fastmath
    n1 = b1.shape[0]
    n2 = b2.shape[0]
    n3 = b3.shape[0]
    for i in range(n1):
        z1[i] = w1[i] * t + b1[i]
        a1[i] = _act(kin1[i], z1[i])
    for i in range(n2):
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        s3 = 0.0
        j = 0
        while j + 4 <= n1:
            s0 += w2[i, j] * a1[j]
            s1 += w2[i, j + 1] * a1[j + 1]
            s2 += w2[i, j + 2] * a1[j + 2]
            s3 += w2[i, j + 3] * a1[j + 3]
            j += 4
        acc = b2[i] + ((s0 + s1) + (s2 + s3))
        while j < n1:
            acc += w2[i, j] * a1[j]
            j += 1
        z2[i] = acc
        a2[i] = _act(kin2[i], z2[i])
    for i in range(n3):
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        s3 = 0.0
        j = 0
        while j + 4 <= n2:
            s0 += w3[i, j] * a2[j]
            s1 += w3[i, j + 1] * a2[j + 1]
            s2 += w3[i, j + 2] * a2[j + 2]
            s3 += w3[i, j + 3] * a2[j + 3]
            j += 4
        acc = b3[i] + ((s0 + s1) + (s2 + s3))
        while j < n2:
            acc += w3[i, j] * a2[j]
            j += 1
        z3[i] = acc
        a3[i] = _act(kin3[i], z3[i])
    s0 = 0.0
    s1 = 0.0
    s2 = 0.0
    s3 = 0.0
    j = 0
    while j + 4 <= n3:
        s0 += w4[j] * a3[j]
        s1 += w4[j + 1] * a3[j + 1]
        s2 += w4[j + 2] * a3[j + 2]
        s3 += w4[j + 3] * a3[j + 3]
        j += 4
    pred = b4[0] + ((s0 + s1) + (s2 + s3))
    while j < n3:
        pred += w4[j] * a3[j]
        j += 1
    return pred


# strict twin feeds the divergence detector; fast twin is the hot path
_forward = _strict(_forward_body)
_forward_fast = _fast(_forward_body)


@_fast
def _backward_update(w1, b1, kin1, w2, b2, kin2, w3, b3, kin3, w4, b4,
                     t, target, pred, z1, a1, z2, a2, z3, a3,
                     d1, d2, d3, eta):
    n1 = b1.shape[0]
    n2 = b2.shape[0]
    n3 = b3.shape[0]
    d4 = pred - target
    for j in range(n3):
        d3[j] = w4[j] * d4 * _act_deriv(kin3[j], z3[j])
    for i in range(n2):
        d2[i] = 0.0
    for j in range(n3):
        dj = d3[j]
        for i in range(n2):
            d2[i] += w3[j, i] * dj
    for i in range(n2):
        d2[i] *= _act_deriv(kin2[i], z2[i])
    for i in range(n1):
        d1[i] = 0.0
    for j in range(n2):
        dj = d2[j]
        for i in range(n1):
            d1[i] += w2[j, i] * dj
    for i in range(n1):
        d1[i] *= _act_deriv(kin1[i], z1[i])

    # deltas fixed; apply the updates
    for j in range(n3):
        w4[j] -= eta * d4 * a3[j]
    b4[0] -= eta * d4
    for j in range(n3):
        step = eta * d3[j]
        for i in range(n2):
            w3[j, i] -= step * a2[i]
        b3[j] -= step
    for j in range(n2):
        step = eta * d2[j]
        for i in range(n1):
            w2[j, i] -= step * a1[i]
        b2[j] -= step
    for i in range(n1):
        w1[i] -= eta * d1[i] * t
        b1[i] -= eta * d1[i]


@_fast
def _regularize_flat(theta, regfac, strength, use_l1):
    p = theta.shape[0]
    if use_l1:
        for i in range(p):
            v = theta[i]
            mag = abs(v) - regfac[i] * strength
            if mag < 0.0:
                mag = 0.0
            theta[i] = np.sign(v) * mag
    else:
        for i in range(p):
            theta[i] = theta[i] * (1.0 - regfac[i] * strength)


@_strict
def _training_rmse(w1, b1, kin1, w2, b2, kin2, w3, b3, kin3, w4, b4,
                   values, z1, a1, z2, a2, z3, a3):
    k = values.shape[0]
    sse = 0.0
    for n in range(k):
        pred = _forward(w1, b1, kin1, w2, b2, kin2, w3, b3, kin3, w4, b4,
                        n / k, z1, a1, z2, a2, z3, a3)
        diff = pred - values[n]
        sse += diff * diff
    return np.sqrt(sse / k)


@_strict
def _tune_scalars(eps, sigma, target_ratio, guard_ratio,
                  eta, lam, eta_gain, lam_gain, eta_cut):
    """End-of-epoch rule arithmetic; IEEE-exact so logs are assertable.

    Non-finite eps compares false everywhere, i.e. lands in the loosen
    and restore branches.  Returns (eta, lam, restore).
    """
    if eps < target_ratio * sigma:
        lam = lam * lam_gain
    else:
        lam = lam / lam_gain
    eta = eta * eta_gain
    restore = not (eps < guard_ratio * sigma)
    if restore:
        eta = eta * eta_cut
    return eta, lam, restore


@_strict
def train_chunk(theta, backup, n1, n2, n3, kin1, kin2, kin3, regfac, values,
                epoch_start, epoch_count, half_epoch, sigma,
                target_ratio, guard_ratio, eta, lam,
                eta_gain, lam_gain, eta_cut, consec_bad, rng_state,
                log_rmse, log_eta, log_lam, log_event):
    """Run ``epoch_count`` tuned training epochs starting at ``epoch_start``.

    Per pattern (in shuffled order): regularize (L2 before half_epoch,
    L1 after), forward, backprop update.  Per epoch end: fresh-forward
    RMSE, then lambda nudge, eta growth, and backup-or-restore with the
    eta cut.  Aborts after two consecutive non-finite RMSE epochs.

    Returns (epochs_done, eta, lam, consec_bad, aborted).
    """
    k = values.shape[0]
    o = 0
    w1 = theta[o:o + n1]
    o += n1
    b1 = theta[o:o + n1]
    o += n1
    w2 = theta[o:o + n2 * n1].reshape(n2, n1)
    o += n2 * n1
    b2 = theta[o:o + n2]
    o += n2
    w3 = theta[o:o + n3 * n2].reshape(n3, n2)
    o += n3 * n2
    b3 = theta[o:o + n3]
    o += n3
    w4 = theta[o:o + n3]
    o += n3
    b4 = theta[o:o + 1]

    z1 = np.empty(n1)
    a1 = np.empty(n1)
    z2 = np.empty(n2)
    a2 = np.empty(n2)
    z3 = np.empty(n3)
    a3 = np.empty(n3)
    d1 = np.empty(n1)
    d2 = np.empty(n2)
    d3 = np.empty(n3)
    order = np.empty(k, dtype=np.int64)

    aborted = False
    done = 0
    for e_local in range(epoch_count):
        epoch = epoch_start + e_local
        use_l1 = epoch >= half_epoch
        strength = eta * lam
        for i in range(k):
            order[i] = i
        shuffle_indices(rng_state, order)
        for idx in range(k):
            n = order[idx]
            _regularize_flat(theta, regfac, strength, use_l1)
            t = n / k
            pred = _forward_fast(w1, b1, kin1, w2, b2, kin2, w3, b3, kin3,
                                 w4, b4, t, z1, a1, z2, a2, z3, a3)
            _backward_update(w1, b1, kin1, w2, b2, kin2, w3, b3, kin3, w4, b4,
                             t, values[n], pred, z1, a1, z2, a2, z3, a3,
                             d1, d2, d3, eta)

        eps = _training_rmse(w1, b1, kin1, w2, b2, kin2, w3, b3, kin3, w4, b4,
                             values, z1, a1, z2, a2, z3, a3)
        log_rmse[e_local] = eps
        log_eta[e_local] = eta
        log_lam[e_local] = lam

        eta, lam, restore = _tune_scalars(
            eps, sigma, target_ratio, guard_ratio,
            eta, lam, eta_gain, lam_gain, eta_cut)
        if restore:
            theta[:] = backup
            log_event[e_local] = 1
            if np.isfinite(eps):
                consec_bad = 0
            else:
                consec_bad += 1
        else:
            backup[:] = theta
            log_event[e_local] = 0
            consec_bad = 0
        done = e_local + 1
        if consec_bad >= 2:
            aborted = True
            break
    return done, eta, lam, consec_bad, aborted


@_strict
def baseline_chunk(theta, n1, n2, n3, kin1, kin2, kin3, regfac, values,
                   epoch_start, epoch_count, half_epoch, sigma,
                   eta, lam, rng_state, log_rmse, log_eta, log_lam):
    """Plain SGD epochs: fixed eta/lambda, no tuning, no rollback.

    Stops early (diverged=True) once the epoch RMSE is non-finite or
    exceeds 1e9 * max(sigma, 1).

    Returns (epochs_done, diverged).
    """
    k = values.shape[0]
    o = 0
    w1 = theta[o:o + n1]
    o += n1
    b1 = theta[o:o + n1]
    o += n1
    w2 = theta[o:o + n2 * n1].reshape(n2, n1)
    o += n2 * n1
    b2 = theta[o:o + n2]
    o += n2
    w3 = theta[o:o + n3 * n2].reshape(n3, n2)
    o += n3 * n2
    b3 = theta[o:o + n3]
    o += n3
    w4 = theta[o:o + n3]
    o += n3
    b4 = theta[o:o + 1]

    z1 = np.empty(n1)
    a1 = np.empty(n1)
    z2 = np.empty(n2)
    a2 = np.empty(n2)
    z3 = np.empty(n3)
    a3 = np.empty(n3)
    d1 = np.empty(n1)
    d2 = np.empty(n2)
    d3 = np.empty(n3)
    order = np.empty(k, dtype=np.int64)

    limit = 1e9 * max(sigma, 1.0)
    strength = eta * lam
    diverged = False
    done = 0
    for e_local in range(epoch_count):
        epoch = epoch_start + e_local
        use_l1 = epoch >= half_epoch
        for i in range(k):
            order[i] = i
        shuffle_indices(rng_state, order)
        for idx in range(k):
            n = order[idx]
            _regularize_flat(theta, regfac, strength, use_l1)
            t = n / k
            pred = _forward_fast(w1, b1, kin1, w2, b2, kin2, w3, b3, kin3,
                                 w4, b4, t, z1, a1, z2, a2, z3, a3)
            _backward_update(w1, b1, kin1, w2, b2, kin2, w3, b3, kin3, w4, b4,
                             t, values[n], pred, z1, a1, z2, a2, z3, a3,
                             d1, d2, d3, eta)

        eps = _training_rmse(w1, b1, kin1, w2, b2, kin2, w3, b3, kin3, w4, b4,
                             values, z1, a1, z2, a2, z3, a3)
        log_rmse[e_local] = eps
        log_eta[e_local] = eta
        log_lam[e_local] = lam
        done = e_local + 1
        if not np.isfinite(eps) or eps > limit:
            diverged = True
            break
    return done, diverged
