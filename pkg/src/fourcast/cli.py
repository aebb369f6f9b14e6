"""Command-line pipeline: generate | train | predict | filter | eval.

Exit codes: 0 success, 1 runtime failure, 2 usage error.  All
randomness sits behind --seed.  Set FOURCAST_LOG=debug|info|... to
control log verbosity.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys

import numpy as np

from . import model_io, signal
from .init import InitConfig, fourier_init, perturb, random_init
from .network import forward
from .postprocess import low_pass
from .trainer import TrainConfig, baseline_train, train


def _largest_pow2_at_most(n: int) -> int:
    p = 1
    while p * 2 <= n:
        p *= 2
    return p


def _sniff_value_column(path) -> int:
    """Default data column: 1 for multi-column files ("t,value"), else 0."""
    import csv

    with open(path, "r", newline="") as fh:
        for row in csv.reader(fh):
            if row:
                return 1 if len(row) >= 2 else 0
    return 0


def _load_series(path, column):
    col = _sniff_value_column(path) if column is None else column
    return signal.load_csv(path, column=col)


def _cmd_generate(args) -> int:
    if args.series == "sine-trend":
        series = signal.gen_sine_trend(args.n, delta=args.delta)
    else:
        params = signal.MackeyGlassParams(
            beta=args.mg_beta, gamma=args.mg_gamma, exponent=args.mg_exponent,
            tau=args.mg_tau, step=args.mg_step, x0=args.mg_x0)
        series = signal.gen_mackey_glass(
            args.n, params, burn_in=args.burn_in, stride=args.stride)
    signal.write_csv(series, args.out)
    print(f"wrote {len(series)} samples to {args.out}")
    return 0


def _cmd_train(args) -> int:
    data = _load_series(args.data, args.column)
    k = args.k if args.k is not None else _largest_pow2_at_most(len(data))
    if k > len(data):
        raise ValueError(f"--k {k} exceeds the {len(data)} available samples")
    if len(data) > k:
        print(f"note: training on the first {k} of {len(data)} samples",
              file=sys.stderr)
    window = signal.TimeSeries(data.values[:k], data.start_time, data.delta)

    init_cfg = InitConfig(
        sinusoids=k, aux_units=args.aux_units, identity_shift=args.s,
        perturb_sd=args.perturb_sd, seed=args.seed)
    cfg = TrainConfig(
        epochs=args.epochs, target_ratio=args.target_ratio,
        guard_ratio=args.guard_ratio, lambda0=args.lambda0, eta0=args.eta0,
        lambda_gain=args.lambda_gain, eta_gain=args.eta_gain,
        eta_cut=args.eta_cut, seed=args.seed)

    if args.no_fourier_init:
        net = random_init(window, init_cfg)
        net, log = baseline_train(net, window, cfg)
    else:
        net = fourier_init(window, init_cfg)
        net = perturb(net, init_cfg.seed, init_cfg.perturb_sd)
        net, log = train(net, window, cfg)

    model_io.save(net, args.out_model)
    if args.out_log:
        log.write_csv(args.out_log)

    if len(log):
        final = log.rmse[-1] / log.sigma
    else:
        preds = [forward(net, n / k)[0] for n in range(k)]
        final = signal.rmse(preds, window.values) / window.std_dev()
    print(f"final_rmse_over_sigma {final:.17g}")
    if log.aborted or log.diverged:
        print("warning: training diverged", file=sys.stderr)
    return 0


def _cmd_predict(args) -> int:
    net = model_io.load(args.model)
    if args.step <= 0:
        raise UsageError("--step must be positive")
    if args.to < args.frm:
        raise UsageError("--to must be >= --from")
    count = math.floor((args.to - args.frm) / args.step) + 1
    with open(args.out, "w", newline="") as fh:
        fh.write("t,prediction\n")
        for i in range(count):
            t_in = args.frm + i * args.step
            pred, _ = forward(net, t_in)
            if not math.isfinite(pred):
                raise ValueError(f"non-finite prediction at input {t_in}")
            fh.write(f"{net.time_scale.to_data(t_in):.17g},{pred:.17g}\n")
    print(f"wrote {count} predictions to {args.out}")
    return 0


def _cmd_filter(args) -> int:
    net = model_io.load(args.model)
    filtered = low_pass(net, args.keep_fraction)
    model_io.save(filtered, args.out_model)
    print(f"wrote filtered model to {args.out_model}")
    return 0


def _cmd_eval(args) -> int:
    net = model_io.load(args.model)
    col = _sniff_value_column(args.data) if args.column is None else args.column
    data = signal.load_csv(args.data, column=col)
    k = net.time_scale.samples
    if col == 0:
        # no time labels: rows start at sample index --offset
        inputs = [(args.offset + i) / k for i in range(len(data))]
    else:
        inputs = [net.time_scale.to_input(t) for t in data.times()]
    preds = [forward(net, t)[0] for t in inputs]
    err = signal.rmse(preds, data.values)
    sigma = data.std_dev()
    print(f"rmse {err:.17g}")
    if sigma > 0:
        print(f"rmse_over_sigma {err / sigma:.17g}")
    else:
        print("rmse_over_sigma inf")
    return 0


class UsageError(Exception):
    """Bad flag values detected after argparse."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fourcast",
        description="Fit a sinusoidal network to a series and extrapolate it.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic series as CSV")
    gen.add_argument("--series", required=True,
                     choices=["sine-trend", "mackey-glass"])
    gen.add_argument("--n", type=int, required=True, help="sample count")
    gen.add_argument("--seed", type=int, default=0,
                     help="reserved; current generators are deterministic")
    gen.add_argument("--out", required=True)
    gen.add_argument("--delta", type=float, default=None,
                     help="sine-trend grid step (default 6*pi/n)")
    gen.add_argument("--mg-beta", type=float, default=0.2)
    gen.add_argument("--mg-gamma", type=float, default=0.1)
    gen.add_argument("--mg-exponent", type=float, default=10.0)
    gen.add_argument("--mg-tau", type=float, default=17.0)
    gen.add_argument("--mg-step", type=float, default=0.1)
    gen.add_argument("--mg-x0", type=float, default=1.2)
    gen.add_argument("--burn-in", type=int, default=1000,
                     help="integration steps discarded before sampling")
    gen.add_argument("--stride", type=int, default=10,
                     help="integration steps per emitted sample")
    gen.set_defaults(func=_cmd_generate)

    tr = sub.add_parser("train", help="fit a model to a CSV series")
    tr.add_argument("--data", required=True)
    tr.add_argument("--column", type=int, default=None,
                    help="value column (default: 1 if multi-column, else 0)")
    tr.add_argument("--epochs", type=int, default=200_000)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--k", type=int, default=None,
                    help="sinusoid count (default: largest power of 2 <= data length)")
    tr.add_argument("--no-fourier-init", action="store_true",
                    help="random init + plain SGD (no spectral seeding, no tuning)")
    tr.add_argument("--out-model", required=True)
    tr.add_argument("--out-log", default=None)
    tr.add_argument("--target-ratio", type=float, default=0.1)
    tr.add_argument("--guard-ratio", type=float, default=0.2)
    tr.add_argument("--lambda0", type=float, default=1.0)
    tr.add_argument("--eta0", type=float, default=1e-9)
    tr.add_argument("--lambda-gain", type=float, default=1.001)
    tr.add_argument("--eta-gain", type=float, default=1.01)
    tr.add_argument("--eta-cut", type=float, default=0.1)
    tr.add_argument("--aux-units", type=int, default=12)
    tr.add_argument("--s", type=float, default=10.0,
                    help="softplus identity shift")
    tr.add_argument("--perturb-sd", type=float, default=1e-5)
    tr.set_defaults(func=_cmd_train)

    pr = sub.add_parser("predict", help="evaluate a model over an input range")
    pr.add_argument("--model", required=True)
    pr.add_argument("--from", dest="frm", type=float, required=True,
                    help="start, in model time (training window = [0, 1))")
    pr.add_argument("--to", type=float, required=True)
    pr.add_argument("--step", type=float, required=True)
    pr.add_argument("--out", required=True)
    pr.set_defaults(func=_cmd_predict)

    fi = sub.add_parser("filter", help="low-pass filter a model's sinusoids")
    fi.add_argument("--model", required=True)
    fi.add_argument("--keep-fraction", type=float, default=0.5)
    fi.add_argument("--out-model", required=True)
    fi.set_defaults(func=_cmd_filter)

    ev = sub.add_parser("eval", help="print a model's RMSE on a CSV series")
    ev.add_argument("--model", required=True)
    ev.add_argument("--data", required=True)
    ev.add_argument("--column", type=int, default=None)
    ev.add_argument("--offset", type=int, default=0,
                    help="sample index of the first row (files without time labels)")
    ev.set_defaults(func=_cmd_eval)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("FOURCAST_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.exit(2, f"{parser.prog}: error: {exc}\n")
    except (ValueError, OSError, model_io.ModelFormatError) as exc:
        print(f"{parser.prog}: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
