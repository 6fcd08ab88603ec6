from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field, replace
from typing import Literal, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from cimcall.nn.exceptions import NnConfigurationError, ShapeMismatchError

_log = logging.getLogger(__name__)

QuantMode = Literal["float32", "fixed"]
CLASSES = ("A", "C", "G", "T")
BLANK = len(CLASSES)
VMM_PARAMETERS = ("conv.w", "rec.wx", "rec.wh", "out.w")

_FORMAT = re.compile(r"^\s*(\d+)\s*-\s*(\d+)\s*$")


class QuantSpec(BaseModel):
    """Fixed-point precision pair written ``X-Y`` (weight bits, activation bits)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    weight_bits: int = Field(default=32, ge=2, le=32)
    activation_bits: int = Field(default=32, ge=2, le=32)
    mode: QuantMode = "float32"

    @model_validator(mode="after")
    def _check_bits(self) -> Self:
        if self.mode == "fixed":
            for bits in (self.weight_bits, self.activation_bits):
                if bits & (bits - 1):
                    raise ValueError(
                        f"fixed-point widths must be powers of two, got {bits}"
                    )
            if self.weight_bits > 16 or self.activation_bits > 16:
                raise ValueError("fixed-point widths above 16 bits are not supported")
        return self

    @classmethod
    def parse(cls, text: str) -> QuantSpec:
        """Parse ``"16-16"`` style notation; ``"32-32"`` is floating point."""
        match = _FORMAT.match(text)
        if match is None:
            raise NnConfigurationError(
                issue=f"quantization format '{text}' is not of the form X-Y",
                stage="quant_parse",
            )
        weight_bits, activation_bits = map(int, match.groups())
        if weight_bits == 32 and activation_bits == 32:
            return cls()
        try:
            return cls(
                weight_bits=weight_bits,
                activation_bits=activation_bits,
                mode="fixed",
            )
        except ValueError as exc:
            raise NnConfigurationError(issue=str(exc), stage="quant_parse") from exc

    @property
    def is_float(self) -> bool:
        return self.mode == "float32"

    @property
    def label(self) -> str:
        return f"{self.weight_bits}-{self.activation_bits}"

    @property
    def weight_levels(self) -> int:
        """Largest representable weight magnitude in integer units."""
        return (1 << (self.weight_bits - 1)) - 1

    @property
    def activation_levels(self) -> int:
        return (1 << (self.activation_bits - 1)) - 1


FLOAT32 = QuantSpec()


@dataclass(frozen=True)
class ModelShape:
    """Layer widths of the surrogate basecaller."""

    in_channels: int = 1
    kernel: int = 5
    channels: int = 8
    hidden: int = 16
    classes: int = BLANK + 1

    def parameter_shapes(self) -> dict[str, tuple[int, ...]]:
        return {
            "conv.w": (self.kernel * self.in_channels, self.channels),
            "conv.b": (self.channels,),
            "rec.wx": (self.channels, 2 * self.hidden),
            "rec.wh": (self.hidden, 2 * self.hidden),
            "rec.b": (2 * self.hidden,),
            "out.w": (self.hidden, self.classes),
            "out.b": (self.classes,),
        }


@dataclass(frozen=True)
class NetworkModel:
    """Parameters and layer configuration of the surrogate basecaller.

    ``conv.w`` is the conv kernel unrolled to matrix form with rows ordered
    (kernel position, channel); ``rec.wx`` and ``rec.wh`` hold the update gate
    in their first ``hidden`` columns and the candidate in the rest.
    """

    params: dict[str, np.ndarray]
    shape: ModelShape = field(default_factory=ModelShape)
    activation: str = "tanh"
    input_range: float = 2.0
    quant: QuantSpec = FLOAT32
    weight_scales: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        expected = self.shape.parameter_shapes()
        if set(self.params) != set(expected):
            raise ShapeMismatchError(
                expected=sorted(expected),
                actual=sorted(self.params),
                operation="model_construction",
            )
        for name, shape in expected.items():
            if self.params[name].shape != shape:
                raise ShapeMismatchError(
                    expected=shape,
                    actual=self.params[name].shape,
                    operation=f"model_construction:{name}",
                )

    @classmethod
    def initialize(
        cls,
        rng: np.random.Generator,
        shape: ModelShape | None = None,
        **options: object,
    ) -> NetworkModel:
        """Glorot-uniform weights and zero biases."""
        shape = shape or ModelShape()
        params: dict[str, np.ndarray] = {}
        for name, dims in shape.parameter_shapes().items():
            if len(dims) == 1:
                params[name] = np.zeros(dims)
            else:
                limit = np.sqrt(6.0 / sum(dims))
                params[name] = rng.uniform(-limit, limit, size=dims)
        return cls(params=params, shape=shape, **options)  # type: ignore[arg-type]

    @property
    def receptive_field(self) -> int:
        return self.shape.kernel

    def vmm_layers(self) -> tuple[str, ...]:
        return VMM_PARAMETERS

    def with_params(self, params: dict[str, np.ndarray]) -> NetworkModel:
        return replace(self, params=params)

    def copy(self) -> NetworkModel:
        return self.with_params({k: v.copy() for k, v in self.params.items()})

    def zeros_like(self) -> GradientSet:
        return GradientSet({k: np.zeros_like(v) for k, v in self.params.items()})

    def rounded_to_float32(self) -> NetworkModel:
        """Snap every parameter to float32 so checkpoints reload bit-identically."""
        return self.with_params(
            {k: v.astype(np.float32).astype(np.float64) for k, v in self.params.items()}
        )

    def parameter_count(self) -> int:
        return sum(v.size for v in self.params.values())


@dataclass
class GradientSet:
    """Per-parameter gradients mirroring a model's parameter shapes."""

    grads: dict[str, np.ndarray]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.grads[name]

    def __iter__(self):
        return iter(self.grads.items())

    def check_congruent(self, model: NetworkModel) -> None:
        for name, value in model.params.items():
            grad = self.grads.get(name)
            if grad is None or grad.shape != value.shape:
                raise ShapeMismatchError(
                    expected=value.shape,
                    actual=None if grad is None else grad.shape,
                    operation=f"gradient:{name}",
                )

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(g)) for g in self.grads.values())

    def masked(self, masks: dict[str, np.ndarray]) -> GradientSet:
        """Zero every entry outside ``masks``; parameters without a mask are frozen."""
        return GradientSet(
            {
                name: np.where(masks[name], grad, 0.0)
                if name in masks
                else np.zeros_like(grad)
                for name, grad in self.grads.items()
            }
        )
