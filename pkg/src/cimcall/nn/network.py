from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from cimcall.nn.backend import ExactBackend
from cimcall.nn.exceptions import ShapeMismatchError
from cimcall.nn.layers import (
    Activation,
    Conv1d,
    ForwardContext,
    Layer,
    Linear,
    Recurrent,
    Softmax,
    log_softmax,
    softmax,
)
from cimcall.nn.models import GradientSet

if TYPE_CHECKING:
    from cimcall.nn.backend import VmmBackend
    from cimcall.nn.models import NetworkModel

_log = logging.getLogger(__name__)

IGNORE_LABEL = -1


def build_layers(model: NetworkModel) -> list[Layer]:
    """Ordered layer graph: conv, activation, recurrent, linear, softmax."""
    shape = model.shape
    return [
        Conv1d("conv", shape.kernel, shape.in_channels, shape.channels),
        Activation("act", model.activation),
        Recurrent("rec", shape.channels, shape.hidden),
        Linear("out", shape.hidden, shape.classes),
        Softmax("softmax"),
    ]


def _as_batch(signal: np.ndarray, model: NetworkModel) -> np.ndarray:
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim == 2:
        x = x[..., None]
    if x.ndim != 3 or x.shape[-1] != model.shape.in_channels:
        raise ShapeMismatchError(
            expected="(frames,), (batch, frames) or (batch, frames, channels)",
            actual=np.shape(signal),
            operation="forward",
        )
    if x.shape[1] < model.receptive_field:
        raise ShapeMismatchError(
            expected=f">= {model.receptive_field} frames",
            actual=x.shape[1],
            operation="forward",
        )
    return x


def _run(
    model: NetworkModel,
    signal: np.ndarray,
    backend: VmmBackend | None,
) -> tuple[np.ndarray, list[tuple[Layer, dict]]]:
    ctx = ForwardContext(
        backend=backend or ExactBackend(),
        spec=model.quant,
        input_range=model.input_range,
    )
    x = _as_batch(signal, model)
    caches: list[tuple[Layer, dict]] = []
    for layer in build_layers(model)[:-1]:
        x, cache = layer.forward(model.params, x, ctx)
        caches.append((layer, cache))
    return x, caches


def forward_logits(
    model: NetworkModel,
    signal: np.ndarray,
    backend: VmmBackend | None = None,
) -> np.ndarray:
    """Pre-softmax scores, shape ``(batch, frames, classes)``."""
    logits, _ = _run(model, signal, backend)
    return logits


def forward(
    model: NetworkModel,
    signal: np.ndarray,
    backend: VmmBackend | None = None,
) -> np.ndarray:
    """Per-frame class distribution for one signal or a padded batch.

    Args:
        model: Network to run; its ``quant`` spec sets activation quantisation.
        signal: Shape ``(frames,)``, ``(batch, frames)`` or
            ``(batch, frames, channels)``.
        backend: VMM backend; defaults to exact floating point.

    Returns:
        Probabilities of shape ``(batch, frames, classes)``.
    """
    return softmax(forward_logits(model, signal, backend))


@dataclass(frozen=True)
class DistillationTargets:
    """Teacher logits and the softening applied to them."""

    logits: np.ndarray
    temperature: float = 2.0
    mix: float = 0.5


def _check_labels(labels: np.ndarray, logits: np.ndarray) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim == 1:
        labels = labels[None, :]
    if labels.shape != logits.shape[:2]:
        raise ShapeMismatchError(
            expected=logits.shape[:2],
            actual=labels.shape,
            operation="loss",
        )
    return labels


def loss_from_logits(
    logits: np.ndarray,
    labels: np.ndarray,
    distill: DistillationTargets | None = None,
) -> tuple[float, np.ndarray]:
    """Mean framewise cross-entropy, optionally mixed with a distillation term.

    Frames labelled ``-1`` are padding and ignored. With distillation the loss
    is ``mix * CE + (1 - mix) * T^2 * CE(student / T, softmax(teacher / T))``.

    Returns:
        The scalar loss and its gradient with respect to ``logits``.
    """
    labels = _check_labels(labels, logits)
    valid = labels != IGNORE_LABEL
    count = max(int(valid.sum()), 1)

    log_p = log_softmax(logits)
    safe = np.where(valid, labels, 0)
    picked = np.take_along_axis(log_p, safe[..., None], axis=-1)[..., 0]
    ce = float(-(picked * valid).sum() / count)

    one_hot = np.zeros_like(logits)
    np.put_along_axis(one_hot, safe[..., None], 1.0, axis=-1)
    d_ce = (np.exp(log_p) - one_hot) * valid[..., None] / count

    if distill is None:
        return ce, d_ce

    t = distill.temperature
    log_p_t = log_softmax(logits / t)
    q_t = softmax(distill.logits / t)
    soft = float(-(q_t * log_p_t).sum(axis=-1)[valid].sum() / count)
    d_soft = (np.exp(log_p_t) - q_t) * valid[..., None] / count

    lam = distill.mix
    loss = lam * ce + (1.0 - lam) * t * t * soft
    d_logits = lam * d_ce + (1.0 - lam) * t * d_soft
    return loss, d_logits


def loss_and_grads(
    model: NetworkModel,
    signal: np.ndarray,
    frame_labels: np.ndarray,
    *,
    distill: DistillationTargets | None = None,
    backend: VmmBackend | None = None,
) -> tuple[float, GradientSet]:
    """Loss and reverse-mode gradients of one forward pass.

    With a ``backend`` the products of the forward pass come from it while
    the backward pass uses the model's weights, so backend errors act as
    straight-through perturbations.
    """
    logits, caches = _run(model, signal, backend)
    loss, dy = loss_from_logits(logits, frame_labels, distill)

    grads = model.zeros_like().grads
    for layer, cache in reversed(caches):
        dy, layer_grads = layer.backward(model.params, cache, dy)
        for name, grad in layer_grads.items():
            grads[name] = grads[name] + grad
    return loss, GradientSet(grads)


def backward(
    model: NetworkModel,
    signal: np.ndarray,
    frame_labels: np.ndarray,
) -> tuple[float, GradientSet]:
    """Mean per-frame cross-entropy and its gradients.

    Raises:
        ShapeMismatchError: If the labels do not cover every output frame.
    """
    return loss_and_grads(model, signal, frame_labels)
