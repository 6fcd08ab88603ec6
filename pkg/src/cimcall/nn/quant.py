from __future__ import annotations

import logging
from dataclasses import replace
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from cimcall.nn.models import NetworkModel, QuantSpec

_log = logging.getLogger(__name__)


def tensor_scale(w: np.ndarray, bits: int) -> float:
    """Symmetric per-tensor scale ``max|w| / (2^(bits-1) - 1)``.

    An all-zero tensor gets scale 1 so that it stays exactly zero.
    """
    peak = float(np.max(np.abs(w), initial=0.0))
    if peak == 0.0:
        return 1.0
    return peak / ((1 << (bits - 1)) - 1)


def quantize_tensor(
    w: np.ndarray, bits: int, scale: float | None = None
) -> tuple[np.ndarray, float]:
    """Round to the nearest grid point (ties to even); return integers and scale."""
    if scale is None:
        scale = tensor_scale(w, bits)
    limit = (1 << (bits - 1)) - 1
    q = np.clip(np.rint(np.asarray(w, dtype=np.float64) / scale), -limit, limit)
    return q.astype(np.int64), scale


def fake_quantize(w: np.ndarray, bits: int, scale: float | None = None) -> np.ndarray:
    q, scale = quantize_tensor(w, bits, scale)
    return q * scale


def activation_scale(value_range: float, bits: int) -> float:
    return value_range / ((1 << (bits - 1)) - 1)


def quantize_activation(
    x: np.ndarray, spec: QuantSpec, value_range: float
) -> tuple[np.ndarray, float | None]:
    """Snap activations onto the static grid of ``value_range``.

    Returns the quantised values and the grid step, or the input untouched and
    ``None`` for floating-point specs.
    """
    if spec.is_float:
        return x, None
    scale = activation_scale(value_range, spec.activation_bits)
    return fake_quantize(x, spec.activation_bits, scale), scale


def quantize_params(
    params: dict[str, np.ndarray],
    names: tuple[str, ...],
    spec: QuantSpec,
) -> tuple[dict[str, np.ndarray], dict[str, float]]:
    """Fake-quantise the named weight matrices; biases stay in full precision."""
    out = dict(params)
    scales: dict[str, float] = {}
    for name in names:
        q, scale = quantize_tensor(params[name], spec.weight_bits)
        out[name] = q * scale
        scales[name] = scale
    return out, scales


def quantize_model(model: NetworkModel, spec: QuantSpec) -> NetworkModel:
    """Return ``model`` with its VMM weights snapped to ``spec``.

    Float specs return the model unchanged apart from the recorded format.
    Biases are added in the digital periphery and keep full precision.
    """
    if spec.is_float:
        return replace(model, quant=spec, weight_scales={})

    params, scales = quantize_params(model.params, model.vmm_layers(), spec)
    _log.debug("Quantized model to %s with scales %r", spec.label, scales)
    return replace(model, params=params, quant=spec, weight_scales=scales)


def integer_weights(model: NetworkModel, name: str) -> np.ndarray:
    """Integer grid values of a quantised weight matrix."""
    q, _ = quantize_tensor(
        model.params[name],
        model.quant.weight_bits,
        model.weight_scales[name],
    )
    return q
