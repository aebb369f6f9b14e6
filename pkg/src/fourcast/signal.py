"""Univariate time series: loading, generation, splitting, summary stats.

A :class:`TimeSeries` is a sequence of samples on an implicit uniform
grid.  ``start_time`` and ``delta`` only label the grid for CSV output
and plotting; all fitting operates on the sample index.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled series with immutable values.

    Parameters
    ----------
    values : array_like
        Sample values, all finite, at least one.
    start_time : float, optional
        Time label of the first sample.  Default 0.
    delta : float, optional
        Grid spacing used for time labels.  Default 1.
    """

    values: np.ndarray
    start_time: float = 0.0
    delta: float = 1.0

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size < 1:
            raise ValueError("a time series needs at least one sample")
        if not np.all(np.isfinite(vals)):
            raise ValueError("time series values must all be finite")
        if not (math.isfinite(self.start_time) and math.isfinite(self.delta)):
            raise ValueError("start_time and delta must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size

    def times(self) -> np.ndarray:
        """Time labels start_time + n*delta for n = 0..len-1."""
        return self.start_time + np.arange(len(self)) * self.delta

    def mean(self) -> float:
        return float(np.mean(self.values))

    def std_dev(self) -> float:
        """Population standard deviation sqrt(mean((v - mean)^2))."""
        mu = np.mean(self.values)
        return float(np.sqrt(np.mean((self.values - mu) ** 2)))


@dataclass(frozen=True)
class MackeyGlassParams:
    """Delay differential equation parameters for the chaotic generator.

    dx/dt = beta * x(t - tau) / (1 + x(t - tau)**exponent) - gamma * x(t)

    Defaults are the standard chaotic regime with constant history x0.
    """

    beta: float = 0.2
    gamma: float = 0.1
    exponent: float = 10.0
    tau: float = 17.0
    step: float = 0.1
    x0: float = 1.2

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("integration step must be positive")
        if self.tau < 1:
            raise ValueError("delay tau must be >= 1")


def load_csv(path, column: int = 0) -> TimeSeries:
    """Read one column of a CSV file as a time series.

    A single non-numeric first row is treated as a header and skipped.
    When a different column 0 holds ascending numeric time labels, the
    first two are used to recover start_time and delta; the labels are
    otherwise ignored (values are taken in file order, no resampling).

    Raises ValueError for an unparsable cell (reporting row and column)
    or fewer than 2 data rows.
    """
    if column < 0:
        raise ValueError("column index must be >= 0")
    with open(path, "r", newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise ValueError(f"{path}: empty file")

    def parse(row, row_no):
        if column >= len(row):
            raise ValueError(
                f"{path}: row {row_no} has no column {column}")
        cell = row[column].strip()
        try:
            v = float(cell)
        except ValueError:
            raise ValueError(
                f"{path}: row {row_no}, column {column}: "
                f"not a number: {cell!r}") from None
        if not math.isfinite(v):
            raise ValueError(
                f"{path}: row {row_no}, column {column}: "
                f"non-finite value {cell!r}")
        return v

    start_row = 0
    try:
        float(rows[0][column] if column < len(rows[0]) else "x")
    except ValueError:
        start_row = 1  # header

    data_rows = rows[start_row:]
    if len(data_rows) < 2:
        raise ValueError(f"{path}: need at least 2 data rows")
    values = [parse(row, start_row + i + 1) for i, row in enumerate(data_rows)]

    start_time, delta = 0.0, 1.0
    if column != 0:
        try:
            t0 = float(data_rows[0][0])
            t1 = float(data_rows[1][0])
            if math.isfinite(t0) and math.isfinite(t1) and t1 > t0:
                start_time, delta = t0, t1 - t0
        except (ValueError, IndexError):
            pass
    return TimeSeries(values, start_time=start_time, delta=delta)


def write_csv(series: TimeSeries, path) -> None:
    """Write a series as a two-column "t,value" CSV.

    Reals use 17-significant-digit formatting so a round trip through
    ``load_csv`` restores them bit-exactly.
    """
    times = series.times()
    with open(path, "w", newline="") as fh:
        fh.write("t,value\n")
        for t, v in zip(times, series.values):
            fh.write(f"{t:.17g},{v:.17g}\n")


def gen_sine_trend(n: int, delta: float | None = None) -> TimeSeries:
    """Sine wave plus linear trend: values[i] = sin(t_i) + 0.1*t_i.

    The grid is t_i = i*delta.  The default delta of 6*pi/n makes the
    n samples span exactly three oscillations.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if delta is None:
        delta = 6.0 * math.pi / n
    if delta <= 0:
        raise ValueError("delta must be positive")
    t = np.arange(n) * delta
    return TimeSeries(np.sin(t) + 0.1 * t, start_time=0.0, delta=delta)


def gen_mackey_glass(
    n: int,
    params: MackeyGlassParams | None = None,
    burn_in: int = 1000,
    stride: int = 10,
) -> TimeSeries:
    """Sample the Mackey-Glass delay differential equation.

    Integrates with fourth-order Runge-Kutta at ``params.step``, holding
    the delayed term fixed across each step (read from the integration
    history; constant x0 before t=0).  The first ``burn_in`` steps are
    discarded, then every ``stride``-th state is emitted, so sample m is
    the state after ``burn_in + m*stride`` steps.

    Deterministic: no randomness is involved.  Raises ValueError if the
    state leaves the finite range (a sign of bad parameters).
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if burn_in < 0 or stride < 1:
        raise ValueError("burn_in must be >= 0 and stride >= 1")
    p = params if params is not None else MackeyGlassParams()
    delay_steps = int(round(p.tau / p.step))
    if delay_steps < 1:
        raise ValueError("integration step exceeds the delay tau")

    total = burn_in + (n - 1) * stride
    states = np.empty(total + 1)
    states[0] = p.x0
    h = p.step

    def deriv(x: float, x_delayed: float) -> float:
        return p.beta * x_delayed / (1.0 + x_delayed ** p.exponent) - p.gamma * x

    for i in range(total):
        xd = states[i - delay_steps] if i >= delay_steps else p.x0
        x = states[i]
        k1 = deriv(x, xd)
        k2 = deriv(x + 0.5 * h * k1, xd)
        k3 = deriv(x + 0.5 * h * k2, xd)
        k4 = deriv(x + h * k3, xd)
        nxt = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not math.isfinite(nxt):
            raise ValueError(
                f"state became non-finite at step {i + 1}; "
                "check the generator parameters")
        states[i + 1] = nxt

    samples = states[burn_in::stride][:n]
    return TimeSeries(
        samples,
        start_time=burn_in * h,
        delta=stride * h,
    )


def split(series: TimeSeries, fraction: float) -> tuple[TimeSeries, TimeSeries]:
    """Split into leading and trailing parts at floor(fraction * len).

    The second part's start_time is offset so time labels continue the
    grid.  Raises ValueError when either part would be empty.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must be in (0, 1)")
    n = len(series)
    n_head = math.floor(fraction * n)
    if n_head < 1 or n - n_head < 1:
        raise ValueError(
            f"split of {n} samples at fraction {fraction} leaves an empty part")
    head = TimeSeries(series.values[:n_head], series.start_time, series.delta)
    tail = TimeSeries(
        series.values[n_head:],
        series.start_time + n_head * series.delta,
        series.delta,
    )
    return head, tail


def rmse(pred, actual) -> float:
    """Root mean squared error between two equal-length sequences."""
    p = np.asarray(pred, dtype=np.float64)
    a = np.asarray(actual, dtype=np.float64)
    if p.shape != a.shape or p.ndim != 1 or p.size == 0:
        raise ValueError(
            f"need equal nonzero lengths, got {p.shape} vs {a.shape}")
    return float(np.sqrt(np.mean((p - a) ** 2)))
