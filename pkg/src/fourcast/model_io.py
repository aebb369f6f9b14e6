"""Versioned JSON persistence with bit-exact parameter round trips.

Schema (format_version 1):

    {
      "format_version": 1,
      "float_format": "decimal17",
      "sinusoids": <int>,
      "aux_units": <int>,
      "identity_shift": <float string>,
      "time_scale": {"samples": <int>,
                     "start_time": <float string>,
                     "delta": <float string>},
      "layers": [
        {"out_units": <int>, "in_units": <int>,
         "kinds": ["identity" | "softplus" | "sinusoid", ...],
         "weights": [<float string>, ...],   # row-major, out*in entries
         "biases": [<float string>, ...]},
        ...  # exactly 4
      ]
    }

Every real is serialized as a 17-significant-digit decimal string
("decimal17"), which restores the exact double on load.  Loading
validates the document against the network invariants instead of
repairing it.
"""

from __future__ import annotations

import json

import numpy as np

from .network import Layer, Network, TimeScale, UnitKind

FORMAT_VERSION = 1

_KIND_NAMES = {
    UnitKind.IDENTITY: "identity",
    UnitKind.SOFTPLUS: "softplus",
    UnitKind.SINUSOID: "sinusoid",
}
_KIND_CODES = {name: kind for kind, name in _KIND_NAMES.items()}


class ModelFormatError(ValueError):
    """The model file is unreadable, inconsistent, or unsupported."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save(net: Network, path) -> None:
    """Write the network as a format_version 1 JSON document."""
    doc = {
        "format_version": FORMAT_VERSION,
        "float_format": "decimal17",
        "sinusoids": net.sinusoids,
        "aux_units": net.aux_units,
        "identity_shift": _fmt(net.identity_shift),
        "time_scale": {
            "samples": net.time_scale.samples,
            "start_time": _fmt(net.time_scale.start_time),
            "delta": _fmt(net.time_scale.delta),
        },
        "layers": [
            {
                "out_units": layer.out_units,
                "in_units": layer.in_units,
                "kinds": [_KIND_NAMES[UnitKind(k)] for k in layer.kinds],
                "weights": [_fmt(w) for w in layer.weights.reshape(-1)],
                "biases": [_fmt(b) for b in layer.biases],
            }
            for layer in net.layers
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _parse_real(raw, where: str) -> float:
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise ModelFormatError(f"{where}: not a number: {raw!r}") from None
    if not np.isfinite(value):
        raise ModelFormatError(f"{where}: non-finite value {raw!r}")
    return value


def load(path) -> Network:
    """Read a model file back into a validated Network.

    Raises ModelFormatError naming the offending field: parse errors
    include the byte offset, a version mismatch names the version, and
    dimension or finiteness violations name the layer and index.
    """
    with open(path, "r") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(
            f"{path}: JSON parse error at byte {exc.pos}: {exc.msg}") from None

    if not isinstance(doc, dict):
        raise ModelFormatError(f"{path}: expected a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(
            f"{path}: unsupported format_version {version!r} "
            f"(supported: {FORMAT_VERSION})")

    raw_layers = doc.get("layers")
    if not isinstance(raw_layers, list) or len(raw_layers) != 4:
        raise ModelFormatError(f"{path}: expected exactly 4 layers")

    layers = []
    for li, spec in enumerate(raw_layers, start=1):
        where = f"{path}: layer {li}"
        try:
            out_units = int(spec["out_units"])
            in_units = int(spec["in_units"])
            kind_names = spec["kinds"]
            raw_w = spec["weights"]
            raw_b = spec["biases"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"{where}: missing or bad field ({exc})") from None
        if len(kind_names) != out_units:
            raise ModelFormatError(
                f"{where}: {len(kind_names)} kinds for {out_units} units")
        if len(raw_w) != out_units * in_units:
            raise ModelFormatError(
                f"{where}: {len(raw_w)} weights, expected "
                f"{out_units}*{in_units}")
        if len(raw_b) != out_units:
            raise ModelFormatError(
                f"{where}: {len(raw_b)} biases for {out_units} units")
        try:
            kinds = [_KIND_CODES[name] for name in kind_names]
        except KeyError as exc:
            raise ModelFormatError(f"{where}: unknown unit kind {exc}") from None
        weights = np.array(
            [_parse_real(w, f"{where}, weight {i}") for i, w in enumerate(raw_w)]
        ).reshape(out_units, in_units)
        biases = np.array(
            [_parse_real(b, f"{where}, bias {i}") for i, b in enumerate(raw_b)])
        layers.append(Layer(weights, biases, np.array(kinds, dtype=np.int8)))

    raw_scale = doc.get("time_scale")
    if not isinstance(raw_scale, dict):
        raise ModelFormatError(f"{path}: missing time_scale")
    try:
        scale = TimeScale(
            samples=int(raw_scale["samples"]),
            start_time=_parse_real(raw_scale["start_time"], f"{path}: start_time"),
            delta=_parse_real(raw_scale["delta"], f"{path}: delta"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(f"{path}: bad time_scale ({exc})") from None

    shift = _parse_real(doc.get("identity_shift", "10"), f"{path}: identity_shift")
    try:
        net = Network(layers, time_scale=scale, identity_shift=shift)
    except ValueError as exc:
        raise ModelFormatError(f"{path}: {exc}") from None
    return net
