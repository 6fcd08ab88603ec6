from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, override

import numpy as np

from cimcall.nn.exceptions import NnConfigurationError, ShapeMismatchError
from cimcall.nn.quant import quantize_activation

if TYPE_CHECKING:
    from cimcall.nn.backend import VmmBackend
    from cimcall.nn.models import QuantSpec

_log = logging.getLogger(__name__)

Cache = dict[str, Any]
Grads = dict[str, np.ndarray]


@dataclass(frozen=True)
class ForwardContext:
    """What every layer needs besides its own parameters."""

    backend: VmmBackend
    spec: QuantSpec
    input_range: float = 2.0


def sigmoid(a: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * a))


class Layer(ABC):
    """One stage of the sequential surrogate network.

    Layers are stateless; ``forward`` returns whatever ``backward`` needs in a
    cache. Tensors are ``(batch, frames, features)``.
    """

    kind: str = "layer"

    def __init__(self, name: str) -> None:
        self.name = name

    @property
    def parameter_names(self) -> tuple[str, ...]:
        return ()

    @abstractmethod
    def forward(
        self,
        params: dict[str, np.ndarray],
        x: np.ndarray,
        ctx: ForwardContext,
    ) -> tuple[np.ndarray, Cache]:
        """Compute the layer output and the cache for ``backward``."""

    @abstractmethod
    def backward(
        self,
        params: dict[str, np.ndarray],
        cache: Cache,
        dy: np.ndarray,
    ) -> tuple[np.ndarray, Grads]:
        """Return the input gradient and this layer's parameter gradients.

        Quantisers are treated as identities (straight-through estimator).
        """

    def describe(self) -> dict[str, Any]:
        return {"kind": self.kind, "name": self.name}


class Conv1d(Layer):
    """Same-padded 1-D convolution executed as one unrolled VMM."""

    kind = "conv1d"

    def __init__(
        self, name: str, kernel: int, in_channels: int, out_channels: int
    ) -> None:
        super().__init__(name)
        if kernel % 2 == 0:
            raise NnConfigurationError(
                issue=f"kernel {kernel} must be odd for same padding",
                stage="conv_construction",
            )
        self.kernel = kernel
        self.in_channels = in_channels
        self.out_channels = out_channels

    @property
    @override
    def parameter_names(self) -> tuple[str, ...]:
        return (f"{self.name}.w", f"{self.name}.b")

    def unroll(self, x: np.ndarray) -> np.ndarray:
        """Patches of shape ``(B, T, kernel * C)`` in (position, channel) order."""
        pad = self.kernel // 2
        frames = x.shape[1]
        padded = np.pad(x, ((0, 0), (pad, pad), (0, 0)))
        patches = [padded[:, k : k + frames, :] for k in range(self.kernel)]
        return np.concatenate(patches, axis=-1)

    def fold(self, d_patches: np.ndarray) -> np.ndarray:
        pad = self.kernel // 2
        batch, frames, _ = d_patches.shape
        dx = np.zeros((batch, frames + 2 * pad, self.in_channels))
        for k in range(self.kernel):
            chunk = d_patches[..., k * self.in_channels : (k + 1) * self.in_channels]
            dx[:, k : k + frames, :] += chunk
        return dx[:, pad : pad + frames, :]

    @override
    def forward(self, params, x, ctx):
        if x.ndim != 3 or x.shape[-1] != self.in_channels:
            raise ShapeMismatchError(
                expected=f"(batch, frames, {self.in_channels})",
                actual=x.shape,
                operation=f"{self.name}.forward",
            )
        x_q, x_scale = quantize_activation(x, ctx.spec, ctx.input_range)
        patches = self.unroll(x_q)
        w, b = params[f"{self.name}.w"], params[f"{self.name}.b"]
        y = ctx.backend.matmul(f"{self.name}.w", patches, w, x_scale) + b
        return y, {"patches": patches}

    @override
    def backward(self, params, cache, dy):
        patches = cache["patches"]
        w = params[f"{self.name}.w"]
        grads = {
            f"{self.name}.w": np.einsum("btk,btc->kc", patches, dy),
            f"{self.name}.b": dy.sum(axis=(0, 1)),
        }
        return self.fold(dy @ w.T), grads

    @override
    def describe(self) -> dict[str, Any]:
        return {
            **super().describe(),
            "kernel": self.kernel,
            "in_channels": self.in_channels,
            "out_channels": self.out_channels,
        }


class Activation(Layer):
    """Elementwise tanh, sigmoid or relu."""

    kind = "activation"

    _FUNCTIONS = ("tanh", "sigmoid", "relu")

    def __init__(self, name: str, function: str = "tanh") -> None:
        super().__init__(name)
        if function not in self._FUNCTIONS:
            raise NnConfigurationError(
                issue=f"unknown activation '{function}'",
                stage="activation_construction",
            )
        self.function = function

    @override
    def forward(self, params, x, ctx):
        if self.function == "tanh":
            y = np.tanh(x)
        elif self.function == "sigmoid":
            y = sigmoid(x)
        else:
            y = np.maximum(x, 0.0)
        return y, {"x": x, "y": y}

    @override
    def backward(self, params, cache, dy):
        x, y = cache["x"], cache["y"]
        if self.function == "tanh":
            return dy * (1.0 - y * y), {}
        if self.function == "sigmoid":
            return dy * y * (1.0 - y), {}
        return dy * (x > 0.0), {}

    @override
    def describe(self) -> dict[str, Any]:
        return {**super().describe(), "function": self.function}


class Recurrent(Layer):
    """Unidirectional single-gate GRU-style cell.

    ``z = sigmoid(x Wx_z + h Wh_z + b_z)``, ``c = tanh(x Wx_c + h Wh_c + b_c)``
    and ``h' = (1 - z) h + z c``, starting from ``h = 0``. The input products
    for all frames run as one VMM; the hidden product runs once per frame.
    """

    kind = "recurrent"

    def __init__(self, name: str, in_features: int, hidden: int) -> None:
        super().__init__(name)
        self.in_features = in_features
        self.hidden = hidden

    @property
    @override
    def parameter_names(self) -> tuple[str, ...]:
        return (f"{self.name}.wx", f"{self.name}.wh", f"{self.name}.b")

    @override
    def forward(self, params, x, ctx):
        batch, frames, _ = x.shape
        hidden = self.hidden
        wx = params[f"{self.name}.wx"]
        wh = params[f"{self.name}.wh"]
        b = params[f"{self.name}.b"]

        x_q, x_scale = quantize_activation(x, ctx.spec, 1.0)
        xw = ctx.backend.matmul(f"{self.name}.wx", x_q, wx, x_scale) + b

        h = np.zeros((batch, hidden))
        hs = np.empty((batch, frames, hidden))
        h_prev_q = np.empty((batch, frames, hidden))
        h_prev = np.empty((batch, frames, hidden))
        zs = np.empty((batch, frames, hidden))
        cs = np.empty((batch, frames, hidden))
        for t in range(frames):
            h_q, h_scale = quantize_activation(h, ctx.spec, 1.0)
            a = xw[:, t, :] + ctx.backend.matmul(f"{self.name}.wh", h_q, wh, h_scale)
            z = sigmoid(a[:, :hidden])
            c = np.tanh(a[:, hidden:])
            h_prev[:, t] = h
            h_prev_q[:, t] = h_q
            h = (1.0 - z) * h + z * c
            hs[:, t], zs[:, t], cs[:, t] = h, z, c

        cache = {"x_q": x_q, "h_prev": h_prev, "h_prev_q": h_prev_q, "z": zs, "c": cs}
        return hs, cache

    @override
    def backward(self, params, cache, dy):
        wx = params[f"{self.name}.wx"]
        wh = params[f"{self.name}.wh"]
        x_q, h_prev, h_prev_q = cache["x_q"], cache["h_prev"], cache["h_prev_q"]
        zs, cs = cache["z"], cache["c"]
        batch, frames, hidden = zs.shape

        da = np.empty((batch, frames, 2 * hidden))
        d_wh = np.zeros_like(wh)
        dh_next = np.zeros((batch, hidden))
        for t in reversed(range(frames)):
            dh = dy[:, t] + dh_next
            z, c = zs[:, t], cs[:, t]
            dz = dh * (c - h_prev[:, t])
            dc = dh * z
            da_t = np.concatenate([dz * z * (1.0 - z), dc * (1.0 - c * c)], axis=-1)
            da[:, t] = da_t
            d_wh += h_prev_q[:, t].T @ da_t
            dh_next = dh * (1.0 - z) + da_t @ wh.T

        grads = {
            f"{self.name}.wx": np.einsum("bti,btj->ij", x_q, da),
            f"{self.name}.wh": d_wh,
            f"{self.name}.b": da.sum(axis=(0, 1)),
        }
        return da @ wx.T, grads

    @override
    def describe(self) -> dict[str, Any]:
        return {
            **super().describe(),
            "in_features": self.in_features,
            "hidden": self.hidden,
        }


class Linear(Layer):
    """Framewise affine map."""

    kind = "linear"

    def __init__(self, name: str, in_features: int, out_features: int) -> None:
        super().__init__(name)
        self.in_features = in_features
        self.out_features = out_features

    @property
    @override
    def parameter_names(self) -> tuple[str, ...]:
        return (f"{self.name}.w", f"{self.name}.b")

    @override
    def forward(self, params, x, ctx):
        x_q, x_scale = quantize_activation(x, ctx.spec, 1.0)
        w, b = params[f"{self.name}.w"], params[f"{self.name}.b"]
        y = ctx.backend.matmul(f"{self.name}.w", x_q, w, x_scale) + b
        return y, {"x_q": x_q}

    @override
    def backward(self, params, cache, dy):
        w = params[f"{self.name}.w"]
        grads = {
            f"{self.name}.w": np.einsum("bti,btj->ij", cache["x_q"], dy),
            f"{self.name}.b": dy.sum(axis=(0, 1)),
        }
        return dy @ w.T, grads

    @override
    def describe(self) -> dict[str, Any]:
        return {
            **super().describe(),
            "in_features": self.in_features,
            "out_features": self.out_features,
        }


class Softmax(Layer):
    """Class distribution per frame."""

    kind = "softmax"

    @override
    def forward(self, params, x, ctx):
        y = softmax(x)
        return y, {"y": y}

    @override
    def backward(self, params, cache, dy):
        y = cache["y"]
        return y * (dy - (dy * y).sum(axis=-1, keepdims=True)), {}


def softmax(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
