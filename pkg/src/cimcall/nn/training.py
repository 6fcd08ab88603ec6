from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from cimcall.nn.exceptions import NnConfigurationError, TrainingDivergenceError
from cimcall.nn.network import DistillationTargets, forward_logits, loss_and_grads
from cimcall.nn.optim import make_optimizer
from cimcall.nn.quant import quantize_params

if TYPE_CHECKING:
    from cimcall.device import RngStream
    from cimcall.nn.backend import VmmBackend
    from cimcall.nn.data import Batch
    from cimcall.nn.models import NetworkModel, QuantSpec
    from cimcall.nn.optim import Optimizer

_log = logging.getLogger(__name__)

ParamTransform = Callable[[dict[str, np.ndarray], "RngStream"], dict[str, np.ndarray]]
EpochHook = Callable[["NetworkModel", int], "NetworkModel"]
BackendFactory = Callable[["NetworkModel", "RngStream"], "VmmBackend | None"]


class TrainingOptions(BaseModel):
    """Optimiser and loop settings shared by every training routine."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    optimizer: Literal["adam", "sgd"] = "adam"
    learning_rate: float = Field(default=0.01, ge=0.0)
    batch_size: int = Field(default=32, ge=1)
    epochs: int = Field(default=30, ge=1)

    def trainer(
        self, rng: RngStream, *, epochs: int | None = None, **kwargs: Any
    ) -> Trainer:
        """Build a Trainer with a fresh optimiser."""
        return Trainer(
            optimizer=make_optimizer(self.optimizer, self.learning_rate),
            epochs=self.epochs if epochs is None else epochs,
            batch_size=self.batch_size,
            rng=rng,
            **kwargs,
        )


def fake_quant_transform(spec: QuantSpec, names: tuple[str, ...]) -> ParamTransform:
    """Straight-through fake quantisation of the VMM weights."""

    def transform(
        params: dict[str, np.ndarray], rng: RngStream
    ) -> dict[str, np.ndarray]:
        if spec.is_float:
            return params
        quantized, _ = quantize_params(params, names, spec)
        return quantized

    return transform


def chain(*transforms: ParamTransform | None) -> ParamTransform:
    """Apply transforms left to right, each with its own sub-stream."""
    active = [t for t in transforms if t is not None]

    def transform(
        params: dict[str, np.ndarray], rng: RngStream
    ) -> dict[str, np.ndarray]:
        for index, fn in enumerate(active):
            params = fn(params, rng.child(index))
        return params

    return transform


@dataclass
class TrainResult:
    model: NetworkModel
    losses: list[float] = field(default_factory=list)
    epochs: int = 0

    @property
    def final_loss(self) -> float:
        return self.losses[-1] if self.losses else math.nan


class Trainer:
    """Minibatch trainer over a padded batch.

    Every step computes the forward pass on ``param_transform(master)``,
    through the backend ``forward_backend`` builds for that view when one is
    set, and applies the resulting gradients to the master parameters, so
    quantisation and injected noise act as straight-through perturbations.
    """

    def __init__(
        self,
        *,
        optimizer: Optimizer,
        epochs: int,
        batch_size: int,
        rng: RngStream,
        param_transform: ParamTransform | None = None,
        forward_backend: BackendFactory | None = None,
        grad_masks: dict[str, np.ndarray] | None = None,
        teacher: NetworkModel | None = None,
        temperature: float = 2.0,
        mix: float = 0.5,
        after_epoch: EpochHook | None = None,
    ) -> None:
        if epochs < 1:
            raise NnConfigurationError(
                issue=f"epochs={epochs} must be >= 1", stage="trainer"
            )
        if batch_size < 1:
            raise NnConfigurationError(
                issue=f"batch_size={batch_size} must be >= 1",
                stage="trainer",
            )
        if teacher is not None and temperature <= 0.0:
            raise NnConfigurationError(
                issue=f"temperature {temperature} must be positive",
                stage="trainer",
            )
        if not 0.0 <= mix <= 1.0:
            raise NnConfigurationError(
                issue=f"mix {mix} not in [0, 1]", stage="trainer"
            )

        self.optimizer = optimizer
        self.epochs = epochs
        self.batch_size = batch_size
        self.rng = rng
        self.param_transform = param_transform
        self.forward_backend = forward_backend
        self.grad_masks = grad_masks
        self.teacher = teacher
        self.temperature = temperature
        self.mix = mix
        self.after_epoch = after_epoch

        _log.debug(
            "%s initialized with epochs=%d, batch_size=%d, distill=%s",
            self.__class__.__name__,
            epochs,
            batch_size,
            teacher is not None,
        )

    def _distill(self, batch: Batch) -> DistillationTargets | None:
        if self.teacher is None:
            return None
        return DistillationTargets(
            logits=forward_logits(self.teacher, batch.signals),
            temperature=self.temperature,
            mix=self.mix,
        )

    def step(
        self, model: NetworkModel, batch: Batch, rng: RngStream
    ) -> tuple[NetworkModel, float]:
        view = model
        if self.param_transform is not None:
            view = model.with_params(self.param_transform(model.params, rng.child(0)))
        backend = None
        if self.forward_backend is not None:
            backend = self.forward_backend(view, rng.child(1))

        loss, grads = loss_and_grads(
            view,
            batch.signals,
            batch.labels,
            distill=self._distill(batch),
            backend=backend,
        )
        if not math.isfinite(loss):
            raise TrainingDivergenceError(
                issue=f"loss is {loss}", step=self.optimizer.steps
            )
        if self.grad_masks is not None:
            grads = grads.masked(self.grad_masks)
        return self.optimizer.step(model, grads), loss

    def fit(self, model: NetworkModel, data: Batch) -> TrainResult:
        """Train for the configured number of epochs.

        Minibatch order for epoch ``e`` comes from ``rng.child(e)``; for step
        ``s`` of epoch ``e`` the transform draws from ``rng.child(e, s, 0)``
        and the forward backend from ``rng.child(e, s, 1)``.

        Raises:
            TrainingDivergenceError: If the loss or a gradient becomes non-finite.
        """
        result = TrainResult(model=model)
        for epoch in range(self.epochs):
            order = self.rng.child(epoch).generator().permutation(len(data))
            epoch_losses: list[float] = []
            for step, start in enumerate(range(0, len(data), self.batch_size)):
                batch = data.take(order[start : start + self.batch_size])
                model, loss = self.step(model, batch, self.rng.child(epoch, step))
                epoch_losses.append(loss)
                result.losses.append(loss)

            if self.after_epoch is not None:
                model = self.after_epoch(model, epoch)
            result.epochs = epoch + 1
            _log.debug(
                "Epoch %d/%d mean loss %.6f",
                epoch + 1,
                self.epochs,
                float(np.mean(epoch_losses)),
            )

        result.model = model
        _log.info(
            "Training finished after %d epochs, final loss %.6f",
            result.epochs,
            result.final_loss,
        )
        return result
